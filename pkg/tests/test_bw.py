from __future__ import annotations

import pytest

from trackhom.errors import InfiniteCategory
from trackhom.services.bw import bw_cohomology, bw_comparison, bw_complex, constant_system, natural_system_from_module
from trackhom.services.cat import Edge, FreeCat, Quiver
from trackhom.services.cohomology import SO_BASE, CochainBuilder, compute_H
from trackhom.services.coeff import constant_module
from trackhom.services.resolution import ResolutionCache
from trackhom.services.zmod import FinAbGroup


def factors(groups):
    return [g.invariant_factors for g in groups]


def test_trivial_monoid_has_only_degree_zero():
    category = FreeCat(Quiver(("*",), []))
    groups = bw_cohomology(category, FinAbGroup.cyclic(4), 3)

    assert factors(groups) == [(4,), (), (), ()]


def test_discrete_objects(fixture):
    groups = bw_cohomology(fixture("points").track.one_cells, FinAbGroup.free(1), 2)

    assert factors(groups) == [(0, 0), (), ()]


@pytest.mark.parametrize("name", ["loop2", "poset3", "arrow2"])
def test_free_categories_vanish_above_one(fixture, name):
    groups = bw_cohomology(fixture(name).track.one_cells, FinAbGroup.free(1), 3)

    assert all(g.is_trivial() for g in groups[2:])


def test_free_category_from_a_quiver():
    category = FreeCat(Quiver(("0", "1", "2"), [Edge("f", "0", "1"), Edge("g", "1", "2"), Edge("h", "0", "2")]))
    groups = bw_cohomology(category, FinAbGroup.free(1), 2)

    assert factors(groups) == [(0,), (0,), ()]
    with pytest.raises(InfiniteCategory):
        bw_cohomology(FreeCat(Quiver(("0",), [Edge("g", "0", "0")])), FinAbGroup.free(1), 1)


def test_projective_plane_category(fixture):
    groups = bw_cohomology(fixture("rp2").track.one_cells, FinAbGroup.free(1), 2)

    assert factors(groups) == [(0,), (), (2,)]


def test_cyclic_group_with_mod_two_coefficients(fixture):
    groups = bw_cohomology(fixture("bz2").track.one_cells, FinAbGroup.cyclic(2), 3)

    assert factors(groups) == [(2,), (2,), (2,), (2,)]


def test_complex_squares_to_zero(fixture):
    module = fixture("dag3").module
    complex_ = bw_complex(natural_system_from_module(module), 3)

    for first, second in zip(complex_.differentials, complex_.differentials[1:]):
        assert first.then(second).is_zero()


@pytest.mark.parametrize("name", ["poset3", "rp2"])
def test_complex_with_integer_coefficients_squares_to_zero(fixture, name):
    category = fixture(name).track.one_cells
    complex_ = bw_complex(constant_system(category, FinAbGroup.free(1)), 3)

    for first, second in zip(complex_.differentials, complex_.differentials[1:]):
        assert first.then(second).is_zero()


def test_natural_system_of_constant_module_is_constant(fixture):
    track = fixture("rp2").track
    from_module = natural_system_from_module(constant_module(track, FinAbGroup.cyclic(2)))
    constant = constant_system(track.one_cells, FinAbGroup.cyclic(2))

    assert factors(bw_cohomology(track.one_cells, from_module, 2)) == factors(bw_cohomology(track.one_cells, constant, 2))


@pytest.mark.parametrize("name", ["loop2", "arrow2", "dag3"])
def test_base_theory_matches_shifted_bw(fixture, name):
    source = fixture(name)
    builder = CochainBuilder(ResolutionCache(source.track, 2), source.module)
    report = bw_comparison(compute_H(SO_BASE, builder, 2), source.module, 2)

    assert report.degrees == [1, 2]
    assert report.agrees, (report.left, report.right)


@pytest.mark.slow
def test_base_theory_sees_the_projective_plane(fixture):
    source = fixture("rp2")
    builder = CochainBuilder(ResolutionCache(source.track, 1), source.module)
    base = compute_H(SO_BASE, builder, 1)
    report = bw_comparison(base, source.module, 1)

    assert base[1].invariant_factors == (2,)
    assert report.agrees
