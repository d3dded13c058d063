from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, Hashable, List, Optional, Tuple

import networkx as nx

from trackhom.errors import FiberMismatch, NotComposable, UnknownCell
from trackhom.models.schemas import ValidationReport
from trackhom.services.track import Cell, FinTrackCategory, TrackFunctor
from trackhom.services.zmod import AbElement, AbHom, FinAbGroup, IntMatrix

logger = logging.getLogger(__name__)

HomPair = Tuple[AbHom, AbHom]


@dataclass
class TrackModule:
    """Abelian group object over a track category, one fiber per 2-cell.

    Horizontal composition of decorated cells is ``hl(m) + hr(n)`` over the horizontal
    composite, vertical composition ``vl(m) + vr(n)`` over the vertical composite.
    """

    base: FinTrackCategory
    fibers: Dict[Cell, FinAbGroup]
    hwhisker: Dict[Tuple[Cell, Cell], HomPair]
    vwhisker: Dict[Tuple[Cell, Cell], HomPair]
    vinverse: Dict[Cell, AbHom]
    name: str = ""

    def fiber(self, cell: Cell) -> FinAbGroup:
        try:
            return self.fibers[cell]
        except KeyError as exc:
            raise UnknownCell(f"module has no fiber over {cell!r}") from exc

    def hl(self, first: Cell, then: Cell) -> AbHom:
        return self._whisker(self.hwhisker, first, then, "horizontally")[0]

    def hr(self, first: Cell, then: Cell) -> AbHom:
        return self._whisker(self.hwhisker, first, then, "horizontally")[1]

    def vl(self, first: Cell, then: Cell) -> AbHom:
        return self._whisker(self.vwhisker, first, then, "vertically")[0]

    def vr(self, first: Cell, then: Cell) -> AbHom:
        return self._whisker(self.vwhisker, first, then, "vertically")[1]

    @staticmethod
    def _whisker(table: Dict[Tuple[Cell, Cell], HomPair], first: Cell, then: Cell, how: str) -> HomPair:
        try:
            return table[(first, then)]
        except KeyError as exc:
            raise NotComposable(f"{first!r} and {then!r} are not {how} composable") from exc

    def is_zero(self) -> bool:
        return all(group.is_trivial() for group in self.fibers.values())


@dataclass(frozen=True)
class ModuleElement:
    cell: Cell
    value: AbElement


def loop_fiber(module: TrackModule, one_cell: Hashable) -> FinAbGroup:
    if one_cell not in module.base.one_cells.morphisms:
        raise UnknownCell(f"{one_cell!r} is not a 1-cell of {module.base.name}")
    return module.fiber(module.base.s0(one_cell))


def conjugation(module: TrackModule, cell: Cell) -> AbHom:
    """Loop fiber at d0 cell -> loop fiber at d1 cell, m |-> cell^-1 . m . cell."""
    base = module.base
    inverse = base.inverse(cell)
    start = base.s0(base.d0(cell))
    return module.vr(inverse, start).then(module.vl(inverse, cell))


def _check_group(element: ModuleElement, module: TrackModule) -> None:
    if not element.value.group.same_presentation(module.fiber(element.cell)):
        raise FiberMismatch(f"value does not lie in the fiber over {element.cell!r}")


def element_ops(module: TrackModule, kind: str, *args) -> ModuleElement:
    """Operations on decorated 2-cells.

    kinds: hcompose(x, y), vcompose(x, y), vinvert(x), add(x, y), negate(x),
    conjugate_along(cell, x) for x over the unit on d0 cell, zero(cell).
    """
    base = module.base
    if kind == "zero":
        (cell,) = args
        return ModuleElement(cell, module.fiber(cell).zero())
    if kind == "conjugate_along":
        cell, x = args
        _check_group(x, module)
        if x.cell != base.s0(base.d0(cell)):
            raise NotComposable(f"{x.cell!r} is not the unit on the source of {cell!r}")
        return ModuleElement(base.s0(base.d1(cell)), conjugation(module, cell)(x.value))
    for x in args:
        _check_group(x, module)
    if kind == "hcompose":
        x, y = args
        cell = base.hcompose(x.cell, y.cell)
        return ModuleElement(cell, module.hl(x.cell, y.cell)(x.value) + module.hr(x.cell, y.cell)(y.value))
    if kind == "vcompose":
        x, y = args
        cell = base.vcompose(x.cell, y.cell)
        return ModuleElement(cell, module.vl(x.cell, y.cell)(x.value) + module.vr(x.cell, y.cell)(y.value))
    if kind == "vinvert":
        (x,) = args
        return ModuleElement(base.inverse(x.cell), module.vinverse[x.cell](x.value))
    if kind == "add":
        x, y = args
        if x.cell != y.cell:
            raise FiberMismatch(f"cannot add elements over {x.cell!r} and {y.cell!r}")
        return ModuleElement(x.cell, x.value + y.value)
    if kind == "negate":
        (x,) = args
        return ModuleElement(x.cell, -x.value)
    raise ValueError(f"unknown element operation: {kind}")


def ratio_map(source: int, target: int) -> int:
    """Multiplier of the canonical map Z/source -> Z/target (0 stands for Z)."""
    if source == target or source == 0:
        return 1
    if target == 0:
        return 0
    if target % source == 0:
        return target // source
    if source % target == 0:
        return 1
    return target // gcd(source, target)


def _cyclic_hom(source: FinAbGroup, target: FinAbGroup) -> AbHom:
    # both groups have at most one generator
    if not source.size or not target.size:
        return AbHom.zero(source, target)
    factor = ratio_map(source.orders[0], target.orders[0])
    return AbHom(source, target, IntMatrix.from_rows([[factor]]))


def _assemble(
    base: FinTrackCategory,
    fibers: Dict[Cell, FinAbGroup],
    hmap,
    vmap,
    inverse,
    name: str,
) -> TrackModule:
    hwhisker = {}
    for a, b in base.two_cells.composable_pairs():
        ab = base.hcompose(a, b)
        hwhisker[(a, b)] = (hmap(a, ab), hmap(b, ab))
    vwhisker = {}
    for (a, b), ab in base.vcomp.items():
        vwhisker[(a, b)] = (vmap(a, ab), vmap(b, ab))
    vinverse = {a: inverse(a, base.inverse(a)) for a in base.two_cells.morphisms}
    return TrackModule(base, fibers, hwhisker, vwhisker, vinverse, name=name)


def constant_module(base: FinTrackCategory, group: FinAbGroup) -> TrackModule:
    fibers = {c: group for c in base.two_cells.morphisms}
    ident = AbHom.identity(group)
    negate = -ident
    return _assemble(
        base,
        fibers,
        lambda a, b: ident,
        lambda a, b: ident,
        lambda a, b: negate,
        name=f"constant {group}",
    )


def one_cell_components(base: FinTrackCategory) -> Dict[Hashable, int]:
    """Index of the 2-cell-connected component of each 1-cell, in 1-cell order."""
    graph = nx.Graph()
    graph.add_nodes_from(base.one_cells.morphisms)
    for c in base.two_cells.morphisms:
        graph.add_edge(base.d0(c), base.d1(c))
    order = {u: i for i, u in enumerate(base.one_cells.morphisms)}
    components = sorted(nx.connected_components(graph), key=lambda comp: min(order[u] for u in comp))
    return {u: k for k, comp in enumerate(components) for u in comp}


def cyclic_module(base: FinTrackCategory, orders: Dict[Hashable, int], default: int = 2) -> TrackModule:
    """Z/n fibers constant along each hom-groupoid component, n read from any 1-cell of it.

    Horizontal whiskering is the canonical map between cyclic groups; vertical structure
    is the group law.
    """
    component = one_cell_components(base)
    by_component: Dict[int, int] = {}
    for u, n in orders.items():
        if u not in component:
            raise UnknownCell(f"{u!r} is not a 1-cell of {base.name}")
        previous = by_component.setdefault(component[u], n)
        if previous != n:
            raise FiberMismatch(f"conflicting orders {previous} and {n} on the component of {u!r}")

    def group_of(cell: Cell) -> FinAbGroup:
        return FinAbGroup.cyclic(by_component.get(component[base.d0(cell)], default))

    fibers = {c: group_of(c) for c in base.two_cells.morphisms}
    return _assemble(
        base,
        fibers,
        lambda a, b: _cyclic_hom(fibers[a], fibers[b]),
        lambda a, b: AbHom.identity(fibers[a]) if fibers[a].same_presentation(fibers[b]) else _cyclic_hom(fibers[a], fibers[b]),
        lambda a, b: -AbHom.identity(fibers[a]),
        name="cyclic",
    )


def explicit_module(
    base: FinTrackCategory,
    fibers: Dict[Cell, FinAbGroup],
    hwhisker: Optional[Dict[Tuple[Cell, Cell], Tuple[Optional[IntMatrix], Optional[IntMatrix]]]] = None,
    vwhisker: Optional[Dict[Tuple[Cell, Cell], Tuple[Optional[IntMatrix], Optional[IntMatrix]]]] = None,
    vinverse: Optional[Dict[Cell, IntMatrix]] = None,
    name: str = "explicit",
) -> TrackModule:
    """Module from fiber data; missing structure maps default to identities (or -1 for inverses)."""
    for c in base.two_cells.morphisms:
        if c not in fibers:
            raise UnknownCell(f"no fiber given over {c!r}")
    hwhisker = hwhisker or {}
    vwhisker = vwhisker or {}
    vinverse = vinverse or {}

    def hom(source: Cell, target: Cell, matrix: Optional[IntMatrix], sign: int = 1) -> AbHom:
        if matrix is None:
            if not fibers[source].same_presentation(fibers[target]):
                raise FiberMismatch(f"a map from the fiber over {source!r} to {target!r} must be given")
            return AbHom(fibers[source], fibers[target], IntMatrix.scalar(fibers[source].size, sign))
        return AbHom(fibers[source], fibers[target], matrix)

    module = _assemble(
        base,
        dict(fibers),
        lambda a, b: AbHom.identity(fibers[a]) if fibers[a].same_presentation(fibers[b]) else None,
        lambda a, b: AbHom.identity(fibers[a]) if fibers[a].same_presentation(fibers[b]) else None,
        lambda a, b: hom(a, b, None, -1) if fibers[a].same_presentation(fibers[b]) else None,
        name=name,
    )
    for (a, b), (left, right) in hwhisker.items():
        ab = base.hcompose(a, b)
        module.hwhisker[(a, b)] = (hom(a, ab, left), hom(b, ab, right))
    for (a, b), (left, right) in vwhisker.items():
        ab = base.vcompose(a, b)
        module.vwhisker[(a, b)] = (hom(a, ab, left), hom(b, ab, right))
    for a, matrix in vinverse.items():
        module.vinverse[a] = hom(a, base.inverse(a), matrix)
    for table in (module.hwhisker, module.vwhisker):
        for key, pair in table.items():
            if pair[0] is None or pair[1] is None:
                raise FiberMismatch(f"structure maps for {key!r} must be given")
    for a, value in module.vinverse.items():
        if value is None:
            raise FiberMismatch(f"vertical inverse map over {a!r} must be given")
    return module


def pullback_module(functor: TrackFunctor, module: TrackModule) -> TrackModule:
    source = functor.domain
    f = functor.two
    fibers = {c: module.fiber(f(c)) for c in source.two_cells.morphisms}
    hwhisker = {(a, b): module.hwhisker[(f(a), f(b))] for a, b in source.two_cells.composable_pairs()}
    vwhisker = {(a, b): module.vwhisker[(f(a), f(b))] for (a, b) in source.vcomp}
    vinverse = {a: module.vinverse[f(a)] for a in source.two_cells.morphisms}
    return TrackModule(source, fibers, hwhisker, vwhisker, vinverse, name=f"pullback of {module.name}")


@dataclass
class _Checker:
    module: TrackModule
    violations: List[str] = field(default_factory=list)
    checked: int = 0

    def same(self, first: AbHom, second: AbHom, message: str) -> None:
        self.checked += 1
        if not first.equals(second):
            self.violations.append(message)

    def fits(self, hom: AbHom, source: Cell, target: Cell, label: str) -> bool:
        self.checked += 1
        fibers = self.module.fibers
        if not (hom.domain.same_presentation(fibers[source]) and hom.codomain.same_presentation(fibers[target])):
            self.violations.append(f"{label} does not map the fiber over {source!r} to the fiber over {target!r}")
            return False
        if not hom.is_well_defined():
            self.violations.append(f"{label} does not respect torsion")
            return False
        return True


def validate_module(module: TrackModule) -> ValidationReport:
    base = module.base
    check = _Checker(module)
    for c in base.two_cells.morphisms:
        if c not in module.fibers:
            check.violations.append(f"no fiber over {c!r}")
    if check.violations:
        return ValidationReport.from_violations(module.name or "module", check.violations)

    for a, b in base.two_cells.composable_pairs():
        pair = module.hwhisker.get((a, b))
        if pair is None:
            check.violations.append(f"no horizontal structure for ({a!r}, {b!r})")
            continue
        ab = base.hcompose(a, b)
        check.fits(pair[0], a, ab, f"hl({a!r}, {b!r})")
        check.fits(pair[1], b, ab, f"hr({a!r}, {b!r})")
    for (a, b), ab in base.vcomp.items():
        pair = module.vwhisker.get((a, b))
        if pair is None:
            check.violations.append(f"no vertical structure for ({a!r}, {b!r})")
            continue
        check.fits(pair[0], a, ab, f"vl({a!r}, {b!r})")
        check.fits(pair[1], b, ab, f"vr({a!r}, {b!r})")
    for a in base.two_cells.morphisms:
        hom = module.vinverse.get(a)
        if hom is None:
            check.violations.append(f"no vertical inverse over {a!r}")
            continue
        check.fits(hom, a, base.inverse(a), f"vinverse({a!r})")
    if check.violations:
        return ValidationReport.from_violations(module.name or "module", check.violations, check.checked)

    identity = {c: AbHom.identity(g) for c, g in module.fibers.items()}
    # units
    for a in base.two_cells.morphisms:
        x, y = base.two_cells.src(a), base.two_cells.tgt(a)
        check.same(module.hr(base.identity_cell(x), a), identity[a], f"left horizontal unit fails on {a!r}")
        check.same(module.hl(a, base.identity_cell(y)), identity[a], f"right horizontal unit fails on {a!r}")
        check.same(module.vr(base.s0(base.d0(a)), a), identity[a], f"upper vertical unit fails on {a!r}")
        check.same(module.vl(a, base.s0(base.d1(a))), identity[a], f"lower vertical unit fails on {a!r}")

    # horizontal associativity
    starting: Dict[Hashable, List[Cell]] = {}
    for c in base.two_cells.morphisms:
        starting.setdefault(base.two_cells.src(c), []).append(c)
    for a, b in base.two_cells.composable_pairs():
        ab = base.hcompose(a, b)
        for c in starting[base.two_cells.tgt(b)]:
            bc = base.hcompose(b, c)
            label = f"horizontal associativity fails on ({a!r}, {b!r}, {c!r})"
            check.same(module.hl(a, b).then(module.hl(ab, c)), module.hl(a, bc), label)
            check.same(module.hr(a, b).then(module.hl(ab, c)), module.hl(b, c).then(module.hr(a, bc)), label)
            check.same(module.hr(ab, c), module.hr(b, c).then(module.hr(a, bc)), label)

    # vertical associativity
    by_source: Dict[Hashable, List[Cell]] = {}
    for c in base.two_cells.morphisms:
        by_source.setdefault(base.d0(c), []).append(c)
    for (a, b), ab in base.vcomp.items():
        for c in by_source.get(base.d1(b), []):
            bc = base.vcompose(b, c)
            label = f"vertical associativity fails on ({a!r}, {b!r}, {c!r})"
            check.same(module.vl(a, b).then(module.vl(ab, c)), module.vl(a, bc), label)
            check.same(module.vr(a, b).then(module.vl(ab, c)), module.vl(b, c).then(module.vr(a, bc)), label)
            check.same(module.vr(ab, c), module.vr(b, c).then(module.vr(a, bc)), label)

    # interchange on every 2x2 square
    pairs_by_start: Dict[Hashable, List[Tuple[Cell, Cell]]] = {}
    for pair in base.vcomp:
        pairs_by_start.setdefault(base.two_cells.src(pair[0]), []).append(pair)
    for (a, a2), aa in base.vcomp.items():
        for b, b2 in pairs_by_start.get(base.two_cells.tgt(a), []):
            bb = base.vcompose(b, b2)
            top, bottom = base.hcompose(a, b), base.hcompose(a2, b2)
            whole = base.hcompose(aa, bb)
            label = f"interchange fails on ({a!r}, {a2!r}) beside ({b!r}, {b2!r})"
            check.same(module.hl(a, b).then(module.vl(top, bottom)), module.vl(a, a2).then(module.hl(aa, bb)), label)
            check.same(module.hr(a, b).then(module.vl(top, bottom)), module.vl(b, b2).then(module.hr(aa, bb)), label)
            check.same(module.hl(a2, b2).then(module.vr(top, bottom)), module.vr(a, a2).then(module.hl(aa, bb)), label)
            check.same(module.hr(a2, b2).then(module.vr(top, bottom)), module.vr(b, b2).then(module.hr(aa, bb)), label)
            if whole != base.vcompose(top, bottom):
                check.violations.append(label)

    # inverses
    for a in base.two_cells.morphisms:
        inverse = base.inverse(a)
        check.same(
            module.vinverse[a].then(module.vinverse[inverse]), identity[a], f"vinverse is not an involution on {a!r}"
        )
        cancel = module.vl(a, inverse) + module.vinverse[a].then(module.vr(a, inverse))
        check.same(cancel, AbHom.zero(module.fibers[a], module.fibers[base.s0(base.d0(a))]), f"m . m^-1 is not zero over {a!r}")
    logger.debug("module %s: %d checks, %d violations", module.name, check.checked, len(check.violations))
    return ValidationReport.from_violations(module.name or "module", check.violations, check.checked)
