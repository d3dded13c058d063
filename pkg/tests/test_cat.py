from __future__ import annotations

import pytest

from trackhom.errors import CyclicQuiver, NotComposable, UnknownMorphism
from trackhom.services.cat import (
    CatFunctor,
    Edge,
    FreeCat,
    Path,
    Quiver,
    compose_functors,
    count_paths,
    free_enumerate,
    functor_apply,
    identity_functor,
    indecomposables,
    is_free,
    quiver_coproduct,
    validate_fincat,
    validate_functor,
)


def chain_quiver() -> Quiver:
    return Quiver(("0", "1", "2"), [Edge("f", "0", "1"), Edge("g", "1", "2")])


def test_free_enumerate_lists_every_nonempty_path():
    paths = free_enumerate(FreeCat(chain_quiver()))

    assert sorted(str(p) for p in paths) == ["f", "f;g", "g"]
    assert count_paths(chain_quiver()) == 3


def test_parallel_edges_multiply_paths():
    quiver = Quiver(("0", "1", "2"), [Edge("a", "0", "1"), Edge("b", "0", "1"), Edge("c", "1", "2")])

    assert len(free_enumerate(FreeCat(quiver))) == count_paths(quiver) == 5


def test_cyclic_quiver_is_rejected():
    quiver = Quiver(("0", "1"), [Edge("f", "0", "1"), Edge("g", "1", "0")])
    category = FreeCat(quiver)

    assert not category.acyclic
    assert set(quiver.find_cycle()) == {"f", "g"}
    with pytest.raises(CyclicQuiver):
        free_enumerate(category)
    with pytest.raises(CyclicQuiver):
        count_paths(quiver)


def test_materialized_free_category_is_a_category():
    category = FreeCat(chain_quiver()).materialize(name="chain")
    report = validate_fincat(category)

    assert report.ok, report.violations
    assert len(category.morphisms) == 6
    assert is_free(category)


def test_quiver_coproduct_tags_edges():
    doubled = quiver_coproduct(chain_quiver(), 2)
    quadrupled = quiver_coproduct(chain_quiver(), 4)

    assert len(doubled.edges) == 4
    assert len(quadrupled.edges) == 8
    assert {e.id[1] for e in quadrupled.edges} == {"ss", "st", "ts", "tt"}


def test_fixture_categories(fixture):
    rp2 = fixture("rp2").track.one_cells
    poset = fixture("poset3").track.one_cells

    assert validate_fincat(rp2).ok
    assert rp2.compose("a", "c") == rp2.compose("b", "d") == "x"
    assert sorted(indecomposables(rp2)) == ["a", "b", "c", "d"]
    assert not is_free(rp2)
    assert sorted(indecomposables(poset)) == ["f", "g"]
    assert is_free(poset)
    assert is_free(fixture("loop2").track.one_cells)
    with pytest.raises(NotComposable):
        rp2.compose("c", "a")


def test_broken_composition_table_is_reported(fixture):
    rp2 = fixture("rp2").track.one_cells
    table = dict(rp2.table)
    table[("a", "c")] = "y"
    table[("b", "d")] = "a"
    broken = type(rp2)(rp2.objects, rp2.morphisms, rp2.identities, table, name="broken")
    report = validate_fincat(broken)

    assert not report.ok
    assert any("wrong endpoints" in v for v in report.violations)


def test_functor_validation_and_composition(fixture):
    rp2 = fixture("rp2").track.one_cells
    swap = {m: m for m in rp2.morphisms}
    swap.update({"a": "b", "b": "a", "c": "d", "d": "c"})
    functor = CatFunctor(rp2, rp2, swap)

    assert validate_functor(functor).ok
    assert compose_functors(functor, functor).mapping == identity_functor(rp2).mapping

    broken = dict(swap)
    broken["x"] = "y"
    report = validate_functor(CatFunctor(rp2, rp2, broken))
    assert not report.ok
    assert any("composition" in v for v in report.violations)


def test_functor_apply_on_paths(fixture):
    rp2 = fixture("rp2").track.one_cells
    category = FreeCat(chain_quiver())
    functor = CatFunctor(category, rp2, {"f": "a", "g": "c"})

    assert functor_apply(functor, Path("0", "2", ("f", "g"))) == "x"
    assert functor_apply(functor, Path("1", "1", ())) == "id_1"
    with pytest.raises(UnknownMorphism):
        functor_apply(functor, "f")
    with pytest.raises(UnknownMorphism):
        functor_apply(CatFunctor(category, rp2, {"f": "a"}), Path("0", "2", ("f", "g")))
