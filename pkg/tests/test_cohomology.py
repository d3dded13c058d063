from __future__ import annotations

import pytest

from trackhom.errors import FiberMismatch
from trackhom.services.cohomology import (
    COMONAD,
    SO_BASE,
    SO_TOTAL,
    THEORIES,
    CochainBuilder,
    build_A,
    build_B,
    build_C,
    compute_H,
    free_shift_comparison,
    les_verify,
    s_construction_comparison,
    theory_table,
    theta_map,
    verify_ses_level,
    xi_map,
)
from trackhom.services.coeff import constant_module
from trackhom.services.resolution import DEFAULT_BOUND, ResolutionCache
from trackhom.services.zmod import FinAbGroup


def builder_for(fixture, name, max_level, group=None):
    source = fixture(name)
    cache = ResolutionCache(source.track, max_level)
    module = source.module if group is None else constant_module(source.track, group)
    return CochainBuilder(cache, module)


@pytest.mark.parametrize("build", [build_A, build_B, build_C])
@pytest.mark.parametrize(
    "name,depth",
    [
        ("loop2", 1),
        ("dag3", 1),
        pytest.param("loop2", 2, marks=pytest.mark.slow),
        pytest.param("arrow2", 2, marks=pytest.mark.slow),
    ],
)
def test_cosimplicial_identities(fixture, name, depth, build):
    source = fixture(name)
    cosimplicial = build(ResolutionCache(source.track, depth), source.module, depth)

    assert cosimplicial.identity_violations() == []
    complex_ = cosimplicial.cochain_complex()
    for first, second in zip(complex_.differentials, complex_.differentials[1:]):
        assert first.then(second).is_zero()


def test_builder_rejects_foreign_module(fixture):
    cache = ResolutionCache(fixture("loop2").track, 1)
    with pytest.raises(FiberMismatch):
        CochainBuilder(cache, fixture("arrow2").module)
    with pytest.raises(ValueError):
        CochainBuilder(cache, fixture("loop2").module).layout("singular", 0)


@pytest.mark.parametrize("group", [FinAbGroup.free(1), FinAbGroup.cyclic(2), FinAbGroup.cyclic(4)])
@pytest.mark.parametrize("name", ["loop2", "arrow2"])
def test_short_exact_sequence_constant_modules(fixture, name, group):
    builder = builder_for(fixture, name, 1, group)
    for n in range(3):
        report = verify_ses_level(builder, n)
        assert report.ok, report


@pytest.mark.slow
@pytest.mark.parametrize("group", [FinAbGroup.free(1), FinAbGroup.cyclic(4)])
@pytest.mark.parametrize("name", ["loop2", "arrow2"])
def test_short_exact_sequence_at_level_three(fixture, name, group):
    builder = builder_for(fixture, name, 2, group)
    report = verify_ses_level(builder, 3)

    assert report.ok, report
    assert report.sizes[COMONAD] == len(builder.cache.level(3))


@pytest.mark.parametrize("name", ["loop2", "arrow2", "dag3", "poset3"])
def test_comparison_maps_commute_with_cofaces(fixture, name):
    builder = builder_for(fixture, name, 1)
    for n in range(2):
        xi_now, xi_next = builder.xi(n), builder.xi(n + 1)
        theta_now, theta_next = builder.theta(n), builder.theta(n + 1)
        cofaces = zip(builder.cofaces(SO_TOTAL, n), builder.cofaces(SO_BASE, n), builder.cofaces(COMONAD, n))
        for i, (ca, cb, cc) in enumerate(cofaces):
            assert xi_now.then(cb).equals(ca.then(xi_next)), (n, i)
            assert theta_now.then(cc).equals(cb.then(theta_next)), (n, i)


def test_short_exact_sequence_mixed_fibers(fixture):
    builder = builder_for(fixture, "dag3", 1)
    reports = [verify_ses_level(builder, n) for n in range(3)]

    assert all(r.ok for r in reports)
    assert reports[0].sizes[COMONAD] == len(builder.cache.level(0))


def test_xi_is_injective(fixture):
    source = fixture("loop2")
    assert xi_map(ResolutionCache(source.track, 1), source.module, 1).is_injective()


def test_degree_zero_of_a_single_arrow(fixture):
    builder = builder_for(fixture, "arrow1", 2, FinAbGroup.free(1))

    assert compute_H(COMONAD, builder, 1)[0].is_trivial()
    assert compute_H(SO_BASE, builder, 1)[0].invariant_factors == (0,)
    assert compute_H(SO_TOTAL, builder, 1)[0].invariant_factors == (0,)


def test_no_two_cells_means_no_cohomology(fixture):
    builder = builder_for(fixture, "points", 2, FinAbGroup.free(1))
    for theory in THEORIES:
        assert all(g.is_trivial() for g in compute_H(theory, builder, 2))


def test_zero_module_has_no_cohomology(fixture):
    builder = builder_for(fixture, "arrow2", 1, FinAbGroup.trivial())
    for theory in THEORIES:
        assert all(g.is_trivial() for g in compute_H(theory, builder, 1))


@pytest.mark.parametrize("name", ["loop2", "arrow2", "dag3"])
def test_normalized_cochains_agree(fixture, name):
    builder = builder_for(fixture, name, 1)
    for theory in THEORIES:
        compute_H(theory, builder, 1, check_normalized=True)


def test_base_theory_vanishes_on_free_one_cells(fixture):
    builder = builder_for(fixture, "loop2", 2, FinAbGroup.cyclic(2))
    groups = compute_H(SO_BASE, builder, 2)

    assert all(g.is_trivial() for g in groups[1:])


@pytest.mark.parametrize("name", ["loop2", "arrow2", "dag3"])
def test_long_exact_sequence(fixture, name):
    report = les_verify(builder_for(fixture, name, 2), 2, strict=True)

    assert report.exact
    assert report.connecting_choice_invariant
    assert len(report.connecting) == 2
    assert report.nodes[-1].status == "not checkable at this truncation"
    assert set(report.groups) == set(THEORIES)


def test_free_degree_shift(fixture):
    report = free_shift_comparison(builder_for(fixture, "loop2", 2, FinAbGroup.cyclic(2)), 2)

    assert report is not None
    assert report.degrees == [1]
    assert report.agrees
    assert free_shift_comparison(builder_for(fixture, "loop2", 1), 1) is None


def test_theory_table_rendering():
    table = theory_table(SO_TOTAL, [FinAbGroup.free(1), FinAbGroup((2, 0))])

    assert table.groups == [[0], [2, 0]]
    assert table.rendered == ["H^0 = Z", "H^1 = Z/2 ⊕ Z"]


@pytest.mark.slow
@pytest.mark.parametrize("n", [1, 2])
def test_s_construction_degree_shift(fixture, n):
    source = fixture("poset3")
    report = s_construction_comparison(source.track, constant_module(source.track, FinAbGroup.cyclic(2)), n, DEFAULT_BOUND)

    assert report.degrees == [n]
    assert report.agrees, (report.left, report.right)


def test_theta_kills_the_image_of_xi(fixture):
    source = fixture("arrow2")
    cache = ResolutionCache(source.track, 1)
    xi, theta = xi_map(cache, source.module, 1), theta_map(cache, source.module, 1)

    assert theta.is_surjective()
    assert xi.then(theta).is_zero()
