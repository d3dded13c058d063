from __future__ import annotations

import pytest

from trackhom.errors import CyclicQuiver, NotAFunctor, NotSplit
from trackhom.services.cat import FOUR_FLAVORS, CatFunctor, Edge, FreeCat, Quiver, validate_fincat
from trackhom.services.track import (
    FinTrackCategory,
    bourne_counit,
    bourne_H,
    bourne_R,
    counit_transpose,
    d_discrete,
    idempotent_e,
    is_hom_discrete,
    is_two_equivalence,
    L_free,
    pi0_track,
    s_construction,
    split_from_quotient,
    transpose_LU,
    triangle_identities,
    validate_track,
    validate_track_functor,
)


@pytest.mark.parametrize("name", ["loop2", "arrow2", "dag3", "rp2", "poset3", "bz2", "points", "arrow1"])
def test_shipped_fixtures_are_track_categories(fixture, name):
    report = validate_track(fixture(name).track)

    assert report.ok, report.violations
    assert report.checked > 0


def _mutated(track: FinTrackCategory, **changes) -> FinTrackCategory:
    fields = dict(
        one_cells=track.one_cells,
        two_cells=track.two_cells,
        d0=track.d0,
        d1=track.d1,
        s0=track.s0,
        vcomp=dict(track.vcomp),
        vinv=dict(track.vinv),
        name="mutant",
    )
    fields.update(changes)
    return FinTrackCategory(**fields)


def test_wrong_vertical_composite_is_caught(fixture):
    track = fixture("loop2").track
    vcomp = dict(track.vcomp)
    vcomp[("beta", "beta")] = "beta"
    report = validate_track(_mutated(track, vcomp=vcomp))

    assert not report.ok
    assert any("beta" in v for v in report.violations)


def test_missing_inverse_is_caught(fixture):
    track = fixture("arrow2").track
    vinv = dict(track.vinv)
    vinv["alpha"] = "alpha"
    report = validate_track(_mutated(track, vinv=vinv))

    assert not report.ok
    assert any("inverse" in v for v in report.violations)


def test_broken_unit_is_caught(fixture):
    track = fixture("arrow2").track
    s0 = CatFunctor(track.one_cells, track.two_cells, {**track.s0.mapping, "u": "alpha"})
    report = validate_track(_mutated(track, s0=s0))

    assert not report.ok


def test_hom_discreteness(fixture):
    assert is_hom_discrete(fixture("arrow2").track)
    assert is_hom_discrete(fixture("rp2").track)
    assert not is_hom_discrete(fixture("loop2").track)


def test_discrete_track_category_of_a_category(fixture):
    category = fixture("rp2").track.one_cells
    track = d_discrete(category)

    assert validate_track(track).ok
    assert track.non_identity_cells() == category.non_identity()


def test_pi0_identifies_connected_one_cells(fixture):
    quotient, q = pi0_track(fixture("arrow2").track)

    assert validate_fincat(quotient).ok
    assert q("u") == q("v")
    assert len(quotient.non_identity()) == 1


def test_kernel_pair_splitting_and_triangles(fixture):
    track = fixture("arrow2").track
    split = split_from_quotient(track)
    splitting = bourne_H(split)

    assert split.validate().ok
    assert validate_track(splitting.track).ok
    assert splitting.unit.validate().ok
    assert is_hom_discrete(splitting.track)
    assert triangle_identities(split, track).ok
    assert triangle_identities(split_from_quotient(fixture("loop2").track), fixture("loop2").track).ok


def test_counit_is_a_track_functor(fixture):
    for name in ("loop2", "arrow2", "dag3"):
        counit = bourne_counit(fixture(name).track)
        assert validate_track_functor(counit).ok


def test_idempotent_from_splitting(fixture):
    splitting = bourne_H(split_from_quotient(fixture("arrow2").track))
    e = idempotent_e(splitting)

    assert validate_track_functor(e).ok
    assert e.one("v") == e.one("u") == splitting.t(splitting.q("u"))


def test_inconsistent_split_is_rejected(fixture):
    track = fixture("arrow2").track
    split = split_from_quotient(track)
    quotient_map = dict(split.t.mapping)
    representative = split.q("u")
    quotient_map[representative] = "id_0" if representative != "id_0" else "u"
    broken = type(split)(split.total, split.base, split.q, CatFunctor(split.base, split.total, quotient_map))

    with pytest.raises(NotSplit):
        bourne_H(broken)


def test_free_track_category_and_transposes(fixture):
    track = fixture("arrow2").track
    category = FreeCat(Quiver(track.objects, [Edge("g", "0", "1")]))
    lifted = L_free(category)
    materialized = lifted.materialize()

    assert validate_track(materialized).ok
    assert is_hom_discrete(materialized)

    f = CatFunctor(category, track.two_cells, {"g": "alpha"})
    forward = transpose_LU("forward", category, track, f)
    assert forward.validate().ok
    back = transpose_LU("backward", category, track, forward)
    assert back.mapping == f.mapping

    with pytest.raises(NotAFunctor):
        transpose_LU("forward", category, track, CatFunctor(category, track.two_cells, {"g": "1_id_0"}))


def test_free_track_category_needs_an_acyclic_quiver():
    category = FreeCat(Quiver(("0",), [Edge("g", "0", "0")]))
    with pytest.raises(CyclicQuiver):
        L_free(category)


def test_s_construction_is_free_and_equivalent(fixture):
    track = fixture("rp2").track
    construction = s_construction(track)

    assert validate_track(construction.track).ok
    assert validate_track_functor(construction.projection).ok
    assert is_two_equivalence(construction.projection).ok
    # 3 identities, 6 generators and the 4 two-step paths
    assert len(construction.base_paths) == 13


def test_source_split_of_a_track_category(fixture):
    track = fixture("dag3").track
    split = bourne_R(track)

    assert split.validate().ok
    assert split.q("gamma") == "c"
    assert split.t("e") == "1_e"


def test_counit_transpose_matches_augmentation(resolution):
    cache = resolution("loop2", 1)
    generators = cache.level(0).generators
    counit = counit_transpose(cache.base, generators)

    assert counit.validate().ok
    for g in generators:
        for flavor in FOUR_FLAVORS:
            assert counit.images[(g, flavor)] == cache.letter_image(g.atom, flavor)
