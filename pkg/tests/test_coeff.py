from __future__ import annotations

import pytest

from trackhom.errors import FiberMismatch, NotComposable, UnknownCell
from trackhom.models.schemas import FixtureDoc, ModuleSpec
from trackhom.services.coeff import (
    ModuleElement,
    TrackModule,
    constant_module,
    cyclic_module,
    element_ops,
    loop_fiber,
    pullback_module,
    ratio_map,
    validate_module,
)
from trackhom.services.fixture_service import build_module
from trackhom.services.track import s_construction
from trackhom.services.zmod import AbHom, FinAbGroup


@pytest.mark.parametrize("orders", [(0,), (2,), (4,), (2, 0)])
@pytest.mark.parametrize("name", ["loop2", "arrow2", "dag3", "rp2"])
def test_constant_modules_validate(fixture, name, orders):
    module = constant_module(fixture(name).track, FinAbGroup(orders))

    assert validate_module(module).ok


def test_cyclic_fibers_follow_components(fixture):
    module = fixture("dag3").module

    assert validate_module(module).ok
    assert module.fiber("gamma").orders == (4,)
    assert module.fiber("1_e").orders == (4,)
    assert module.fiber("1_a").orders == (2,)
    assert module.fiber("1_id_0").orders == (2,)
    assert module.hl("1_id_0", "gamma").matrix.to_lists() == [[2]]
    assert loop_fiber(module, "c").orders == (4,)


def test_conflicting_cyclic_orders(fixture):
    with pytest.raises(FiberMismatch):
        cyclic_module(fixture("dag3").track, {"c": 4, "e": 2})
    with pytest.raises(UnknownCell):
        cyclic_module(fixture("dag3").track, {"w": 4})


@pytest.mark.parametrize(
    "source,target,factor",
    [(2, 4, 2), (4, 2, 1), (0, 2, 1), (2, 0, 0), (4, 6, 3), (3, 3, 1)],
)
def test_ratio_map(source, target, factor):
    assert ratio_map(source, target) == factor


def test_wrong_inverse_map_is_caught(fixture):
    module = fixture("dag3").module
    vinverse = dict(module.vinverse)
    vinverse["gamma"] = AbHom(module.fiber("gamma"), module.fiber("gamma_inv"), AbHom.identity(module.fiber("gamma")).matrix)
    mutant = TrackModule(module.base, module.fibers, module.hwhisker, module.vwhisker, vinverse, name="mutant")
    report = validate_module(mutant)

    assert not report.ok
    assert any("not zero" in v for v in report.violations)


def test_explicit_module_defaults_and_mismatches(fixture):
    track = fixture("loop2").track
    fibers = {c: [2] for c in track.two_cells.morphisms}
    module = build_module(ModuleSpec(kind="explicit", fibers=fibers), track)
    assert validate_module(module).ok

    fibers["beta"] = [4]
    with pytest.raises(FiberMismatch):
        build_module(ModuleSpec(kind="explicit", fibers=fibers), track)

    del fibers["beta"]
    with pytest.raises(UnknownCell):
        build_module(ModuleSpec(kind="explicit", fibers=fibers), track)


def test_element_operations(fixture):
    track = fixture("loop2").track
    module = constant_module(track, FinAbGroup.free(1))
    z = module.fiber("beta")

    def elt(cell, value):
        return ModuleElement(cell, z.element((value,)))

    assert element_ops(module, "hcompose", elt("1_id_0", 3), elt("beta", 4)) == elt("beta", 7)
    assert element_ops(module, "vcompose", elt("beta", 1), elt("beta", 2)) == elt("1_u", 3)
    assert element_ops(module, "vinvert", elt("beta", 5)) == elt("beta", -5)
    assert element_ops(module, "negate", elt("beta", 5)) == elt("beta", -5)
    assert element_ops(module, "add", elt("beta", 5), elt("beta", 1)) == elt("beta", 6)
    assert element_ops(module, "zero", "1_u") == elt("1_u", 0)
    with pytest.raises(FiberMismatch):
        element_ops(module, "add", elt("beta", 1), elt("1_u", 1))
    with pytest.raises(ValueError):
        element_ops(module, "rotate", elt("beta", 1))


def test_conjugation_moves_loops_along_a_two_cell(fixture):
    track = fixture("arrow2").track
    module = constant_module(track, FinAbGroup.free(1))
    x = ModuleElement("1_u", module.fiber("1_u").element((3,)))

    moved = element_ops(module, "conjugate_along", "alpha", x)
    assert moved.cell == "1_v"
    assert moved.value.coords == (3,)
    with pytest.raises(NotComposable):
        element_ops(module, "conjugate_along", "alpha_inv", x)


def test_pullback_along_s_construction(fixture):
    source = fixture("rp2")
    construction = s_construction(source.track)
    pulled = pullback_module(construction.projection, constant_module(source.track, FinAbGroup.cyclic(2)))

    assert pulled.base is construction.track
    assert validate_module(pulled).ok


def test_fixture_module_kinds_parse():
    doc = FixtureDoc(name="tiny", objects=["0"], module=ModuleSpec(kind="cyclic", default=3))

    assert doc.module.default == 3
    assert doc.format == "trackhom.fixture/1"
