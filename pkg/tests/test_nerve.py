from __future__ import annotations

import pytest

from trackhom.errors import TruncationTooShallow
from trackhom.services.nerve import (
    SSET_FORMAT,
    category_nerve,
    const_cohomology,
    diag,
    double_nerve,
    export_sset,
    nerve_comparison,
)
from trackhom.services.zmod import AbHom, CochainComplexZ, FinAbGroup, IntMatrix, cohomology_at


def cyclic_two_bar_cohomology(group: FinAbGroup, max_degree: int):
    """Group cohomology of Z/2 from the normalized bar complex.

    There is one nondegenerate n-chain (g, ..., g) and its coboundary is (1 + (-1)^(n+1)) times itself.
    """
    levels = [group] * (max_degree + 2)
    differentials = [
        AbHom(group, group, IntMatrix.scalar(1, 1 + (-1) ** (n + 1))) for n in range(max_degree + 1)
    ]
    complex_ = CochainComplexZ(levels, differentials)
    return [cohomology_at(complex_, s) for s in range(max_degree + 1)]


def factors(groups):
    return [g.invariant_factors for g in groups]


@pytest.mark.parametrize("coefficients", [FinAbGroup.cyclic(2), FinAbGroup.free(1)])
def test_classifying_space_of_cyclic_group(fixture, coefficients):
    sset = diag(double_nerve(fixture("bz2").track, 4))
    groups = const_cohomology(sset, coefficients, 3)

    assert factors(groups) == factors(cyclic_two_bar_cohomology(coefficients, 3))


def test_mod_two_cohomology_of_cyclic_group(fixture):
    sset = diag(double_nerve(fixture("bz2").track, 4))

    assert factors(const_cohomology(sset, FinAbGroup.cyclic(2), 3)) == [(2,)] * 4
    assert [len(level) for level in sset.simplices] == [1, 2, 4, 8, 16]
    assert [len(sset.nondegenerate(n)) for n in range(5)] == [1, 1, 1, 1, 1]


@pytest.mark.parametrize("name,depth", [("loop2", 2), ("arrow2", 2), ("bz2", 3)])
def test_diagonal_simplicial_identities(fixture, name, depth):
    grid = double_nerve(fixture(name).track, depth)

    assert grid.identity_violations() == []
    assert diag(grid).identity_violations() == []


def test_discrete_track_reduces_to_category_nerve(fixture):
    track = fixture("rp2").track
    from_track = const_cohomology(diag(double_nerve(track, 3)), FinAbGroup.free(1), 2)
    from_category = const_cohomology(category_nerve(track.one_cells, 3), FinAbGroup.free(1), 2)

    assert factors(from_track) == factors(from_category) == [(0,), (), (2,)]


def test_category_nerve_identities(fixture):
    sset = category_nerve(fixture("rp2").track.one_cells, 3)

    assert sset.identity_violations() == []
    assert len(sset.simplices[0]) == 3


def test_discrete_objects(fixture):
    sset = diag(double_nerve(fixture("points").track, 3))

    assert factors(const_cohomology(sset, FinAbGroup.free(1), 2)) == [(0, 0), (), ()]


def test_loop_two_cells_are_contractible(fixture):
    sset = diag(double_nerve(fixture("loop2").track, 3))

    assert factors(const_cohomology(sset, FinAbGroup.free(1), 2)) == [(0,), (), ()]


def test_shallow_truncation_is_refused(fixture):
    sset = diag(double_nerve(fixture("bz2").track, 2))
    with pytest.raises(TruncationTooShallow):
        const_cohomology(sset, FinAbGroup.cyclic(2), 2)


def test_export_lists_every_simplex(fixture, tmp_path):
    sset = diag(double_nerve(fixture("bz2").track, 2))
    path = export_sset(sset, tmp_path / "out" / "bz2.sset")
    lines = path.read_text(encoding="utf-8").splitlines()

    assert lines[0] == SSET_FORMAT
    assert lines[1] == "dim 0 1"
    assert "dim 2 4" in lines
    assert len(lines) == 1 + (1 + 1) + (1 + 2) + (1 + 4)


def test_comparison_starts_in_degree_one():
    z, z2 = FinAbGroup.free(1), FinAbGroup.cyclic(2)
    report = nerve_comparison([z, z2, z2], [z2, z2, z2])

    assert report.degrees == [1, 2]
    assert report.agrees
    assert not nerve_comparison([z, z2], [z, z]).agrees
