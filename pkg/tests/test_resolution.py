from __future__ import annotations

import pytest

from trackhom.errors import CyclicSupport, GateNotPassed, IndexOutOfRange, NotComposable, TooLarge
from trackhom.services.cache_service import CacheService
from trackhom.services.resolution import (
    ResolutionCache,
    check_simplicial_identities,
    enumerate_level,
    evaluate_gate,
    finiteness_gate,
    hom_discrete_levels,
    predicted_counts,
    resolution_report,
    support_matrix,
    term_ops,
)
from trackhom.services.terms import CellTerm, OneCellTerm


def test_support_matrix_counts_non_identity_cells(fixture):
    assert support_matrix(fixture("loop2").track).to_lists() == [[0, 2], [0, 0]]
    assert support_matrix(fixture("rp2").track).to_lists() == [[0, 2, 2], [0, 0, 2], [0, 0, 0]]


@pytest.mark.parametrize(
    "name,expected",
    [
        ("loop2", [2, 8, 32, 128]),
        ("arrow2", [4, 16, 64, 256]),
        ("rp2", [6, 88, 1376]),
        ("points", [0, 0, 0]),
    ],
)
def test_predicted_counts(fixture, name, expected):
    assert predicted_counts(fixture(name).track, len(expected) - 1) == expected


def test_gate_rejects_cyclic_support(fixture):
    report = evaluate_gate(fixture("bz2").track, 2)

    assert not report.accepted
    assert report.witness
    assert report.reason == "cyclic 2-cell support"
    with pytest.raises(CyclicSupport) as excinfo:
        finiteness_gate(fixture("bz2").track, 2)
    assert excinfo.value.witness == report.witness


def test_gate_bound(fixture):
    report = evaluate_gate(fixture("rp2").track, 1, bound=100)

    assert not report.accepted
    assert report.predicted_counts == [6, 88, 1376]
    assert "100" in report.reason
    with pytest.raises(TooLarge):
        finiteness_gate(fixture("rp2").track, 1, bound=100)
    assert finiteness_gate(fixture("loop2").track, 2).accepted


def test_level_counts_match_prediction(resolution):
    cache = resolution("loop2", 2)

    assert [len(cache.level(m)) for m in range(4)] == [2, 8, 32, 128]
    report = resolution_report(cache, 2)
    assert all(level.matches for level in report.levels)
    assert report.simplicial_identities_ok, report.violations


def test_projective_plane_levels_match_prediction(resolution):
    cache = resolution("rp2", 1)

    assert [len(cache.level(m)) for m in range(3)] == [6, 88, 1376]
    assert cache.gate.predicted_counts == [6, 88, 1376]


def test_levels_outside_the_gate_are_refused(resolution, fixture):
    cache = resolution("loop2", 1)
    with pytest.raises(GateNotPassed):
        cache.level(3)
    with pytest.raises(IndexOutOfRange):
        cache.level(-1)
    with pytest.raises(GateNotPassed):
        ResolutionCache(fixture("bz2").track, 1).level(0)


@pytest.mark.parametrize("name,depth", [("loop2", 2), ("arrow2", 2), ("dag3", 2), ("rp2", 1)])
def test_simplicial_identities(resolution, name, depth):
    assert check_simplicial_identities(resolution(name, depth), depth) == []


def test_faces_commute_with_augmentation(resolution):
    cache = resolution("arrow2", 1)
    for c in cache.level(1).generators:
        assert cache.augment(cache.face(0, 1, c)) == cache.augment(c)
    with pytest.raises(IndexOutOfRange):
        cache.face(1, 1, cache.level(1).generators[0])


def test_resolution_levels_are_homotopically_discrete(resolution):
    assert hom_discrete_levels(resolution("loop2", 2), 2) == []
    assert hom_discrete_levels(resolution("arrow2", 1), 1) == []


def test_term_operations(resolution):
    cache = resolution("loop2", 1)
    beta = cache.wrap("beta")
    st = CellTerm(1, "0", "1", letters=((beta, "st"),))
    ts = CellTerm(1, "0", "1", letters=((beta, "ts"),))

    assert term_ops("vinv", st) == ts
    assert term_ops("vcomp", st, ts) == CellTerm(1, "0", "1", letters=((beta, "ss"),))
    assert term_ops("d0", st) == OneCellTerm(1, "0", "1", letters=((beta, "s"),))
    assert term_ops("d1", st) == OneCellTerm(1, "0", "1", letters=((beta, "t"),))
    with pytest.raises(NotComposable):
        term_ops("vcomp", st, st)
    with pytest.raises(NotComposable):
        term_ops("hcompose", st, st)
    with pytest.raises(ValueError):
        term_ops("twist", st)


def test_levels_are_persisted_and_reloaded(fixture, tmp_path):
    track = fixture("loop2").track
    store = CacheService(tmp_path)
    cold = ResolutionCache(track, 2, store=store, key="loop2")
    generators = [list(cold.level(m).generators) for m in range(4)]

    assert store.levels("loop2") == [1, 2, 3]
    assert store.misses == 3

    warm_store = CacheService(tmp_path)
    warm = ResolutionCache(track, 2, store=warm_store, key="loop2")
    assert [list(warm.level(m).generators) for m in range(4)] == generators
    assert warm_store.hits == 3
    assert warm_store.misses == 0


def test_enumerate_level_returns_the_cached_level(resolution):
    cache = resolution("arrow2", 1)
    level = enumerate_level(cache, 1)

    assert level is cache.level(1)
    assert len(level) == 16
    assert all(level.index[g] == i for i, g in enumerate(level.generators))
