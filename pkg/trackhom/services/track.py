from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Hashable, List, Optional, Tuple

import networkx as nx

from trackhom.errors import (
    CyclicQuiver,
    IllDefinedComposite,
    NotAFunctor,
    NotComposable,
    NotSplit,
    UnknownCell,
)
from trackhom.models.schemas import ValidationReport
from trackhom.services.cat import (
    CatFunctor,
    Edge,
    FinCat,
    FreeCat,
    Path,
    Quiver,
    free_enumerate,
    identity_functor,
    validate_fincat,
    validate_functor,
)
from trackhom.services.terms import CellTerm, FlavoredTrack, OneCellTerm

logger = logging.getLogger(__name__)

Cell = Hashable


@dataclass
class FinTrackCategory:
    """Finite track category presented by tables.

    ``one_cells`` is X0, ``two_cells`` is X1 with horizontal composition, ``vcomp`` maps a
    vertical pair (a, b) with d1 a == d0 b to a followed by b.
    """

    one_cells: FinCat
    two_cells: FinCat
    d0: CatFunctor
    d1: CatFunctor
    s0: CatFunctor
    vcomp: Dict[Tuple[Cell, Cell], Cell]
    vinv: Dict[Cell, Cell]
    name: str = ""

    @classmethod
    def from_tables(
        cls,
        one_cells: FinCat,
        two_cells: FinCat,
        d0: Dict[Cell, Hashable],
        d1: Dict[Cell, Hashable],
        s0: Dict[Hashable, Cell],
        vcomp: Dict[Tuple[Cell, Cell], Cell],
        vinv: Dict[Cell, Cell],
        name: str = "",
    ) -> "FinTrackCategory":
        return cls(
            one_cells,
            two_cells,
            CatFunctor(two_cells, one_cells, dict(d0)),
            CatFunctor(two_cells, one_cells, dict(d1)),
            CatFunctor(one_cells, two_cells, dict(s0)),
            dict(vcomp),
            dict(vinv),
            name=name,
        )

    @property
    def objects(self) -> Tuple[Hashable, ...]:
        return self.one_cells.objects

    def cells(self) -> List[Cell]:
        return list(self.two_cells.morphisms)

    def non_identity_cells(self) -> List[Cell]:
        return self.two_cells.non_identity()

    def identity_cell(self, obj: Hashable) -> Cell:
        return self.two_cells.identity(obj)

    def check_cell(self, cell: Cell) -> Cell:
        if cell not in self.two_cells.morphisms:
            raise UnknownCell(f"{self.name or 'track category'} has no 2-cell {cell!r}")
        return cell

    def source(self, cell: Cell) -> Hashable:
        return self.d0(self.check_cell(cell))

    def target(self, cell: Cell) -> Hashable:
        return self.d1(self.check_cell(cell))

    def unit(self, one_cell: Hashable) -> Cell:
        return self.s0(one_cell)

    def hcompose(self, first: Cell, then: Cell) -> Cell:
        return self.two_cells.compose(first, then)

    def hcompose_all(self, cells: List[Cell], base: Hashable) -> Cell:
        return self.two_cells.compose_all(cells, base)

    def vcompose(self, first: Cell, then: Cell) -> Cell:
        try:
            return self.vcomp[(first, then)]
        except KeyError as exc:
            raise NotComposable(f"2-cells {first!r} and {then!r} are not vertically composable") from exc

    def inverse(self, cell: Cell) -> Cell:
        return self.vinv[self.check_cell(cell)]

    def conjugation_cells(self, cell: Cell) -> Tuple[Cell, Cell]:
        """The pair (cell^-1, cell) whose vertical composite is the unit on d1 cell."""
        return self.inverse(cell), cell

    def parallel(self, first: Hashable, second: Hashable) -> List[Cell]:
        return [c for c in self.two_cells.morphisms if self.d0(c) == first and self.d1(c) == second]

    def vertical_pairs(self) -> List[Tuple[Cell, Cell]]:
        by_source: Dict[Hashable, List[Cell]] = {}
        for c in self.two_cells.morphisms:
            by_source.setdefault(self.d0(c), []).append(c)
        return [(a, b) for a in self.two_cells.morphisms for b in by_source.get(self.d1(a), [])]

    def support_quiver(self) -> Quiver:
        cells = self.non_identity_cells()
        return Quiver(self.objects, [Edge(c, *self.two_cells.morphisms[c]) for c in cells])


def validate_track(track: FinTrackCategory) -> ValidationReport:
    subject = track.name or "track category"
    violations: List[str] = []
    checked = 0
    for label, category in (("X0", track.one_cells), ("X1", track.two_cells)):
        report = validate_fincat(category)
        checked += report.checked
        violations.extend(f"{label}: {v}" for v in report.violations)
    if violations:
        return ValidationReport.from_violations(subject, violations, checked)
    for label, functor in (("d0", track.d0), ("d1", track.d1), ("s0", track.s0)):
        report = validate_functor(functor, label)
        checked += report.checked
        violations.extend(f"{label}: {v}" for v in report.violations)
    if violations:
        return ValidationReport.from_violations(subject, violations, checked)

    for u in track.one_cells.morphisms:
        checked += 1
        unit = track.s0(u)
        if track.d0(unit) != u or track.d1(unit) != u:
            violations.append(f"d0 s0 or d1 s0 is not the identity on {u!r}")

    pairs = track.vertical_pairs()
    for a, b in pairs:
        checked += 1
        composite = track.vcomp.get((a, b))
        if composite is None:
            violations.append(f"vertical composite of {a!r} and {b!r} is missing")
        elif track.d0(composite) != track.d0(a) or track.d1(composite) != track.d1(b):
            violations.append(f"vertical composite of {a!r} and {b!r} has wrong boundary")
    if violations:
        return ValidationReport.from_violations(subject, violations, checked)

    for a in track.two_cells.morphisms:
        checked += 4
        if track.vcomp[(track.s0(track.d0(a)), a)] != a or track.vcomp[(a, track.s0(track.d1(a)))] != a:
            violations.append(f"vertical units fail on {a!r}")
        inverse = track.vinv.get(a)
        if inverse is None or track.d0(inverse) != track.d1(a) or track.d1(inverse) != track.d0(a):
            violations.append(f"{a!r} has no vertical inverse")
            continue
        if track.vcomp[(a, inverse)] != track.s0(track.d0(a)) or track.vcomp[(inverse, a)] != track.s0(track.d1(a)):
            violations.append(f"{inverse!r} is not inverse to {a!r}")

    by_source: Dict[Hashable, List[Cell]] = {}
    for c in track.two_cells.morphisms:
        by_source.setdefault(track.d0(c), []).append(c)
    for a, b in pairs:
        ab = track.vcomp[(a, b)]
        for c in by_source.get(track.d1(b), []):
            checked += 1
            if track.vcomp[(ab, c)] != track.vcomp[(a, track.vcomp[(b, c)])]:
                violations.append(f"vertical associativity fails on ({a!r}, {b!r}, {c!r})")

    # interchange: vertical composition and inversion are functors for the horizontal one
    for obj in track.objects:
        checked += 1
        ident = track.identity_cell(obj)
        if track.vinv.get(ident) != ident:
            violations.append(f"inverse of the identity 2-cell at {obj!r} is not itself")
    pairs_by_start: Dict[Hashable, List[Tuple[Cell, Cell]]] = {}
    for a, b in pairs:
        pairs_by_start.setdefault(track.two_cells.src(a), []).append((a, b))
    for a, a2 in pairs:
        for b, b2 in pairs_by_start.get(track.two_cells.tgt(a), []):
            checked += 1
            left = track.vcomp.get((track.hcompose(a, b), track.hcompose(a2, b2)))
            right = track.hcompose(track.vcomp[(a, a2)], track.vcomp[(b, b2)])
            if left != right:
                violations.append(f"interchange fails on ({a!r}, {a2!r}) beside ({b!r}, {b2!r})")
    for a, b in track.two_cells.composable_pairs():
        checked += 1
        if track.vinv.get(track.hcompose(a, b)) != track.hcompose(track.vinv[a], track.vinv[b]):
            violations.append(f"inversion does not preserve the composite of {a!r} then {b!r}")
    if violations:
        logger.info("track category %s: %d violations", subject, len(violations))
    return ValidationReport.from_violations(subject, violations, checked)


def d_discrete(category: FinCat) -> FinTrackCategory:
    ident = {m: m for m in category.morphisms}
    return FinTrackCategory(
        category,
        category,
        identity_functor(category),
        identity_functor(category),
        identity_functor(category),
        {(m, m): m for m in category.morphisms},
        dict(ident),
        name=f"d({category.name})" if category.name else "discrete",
    )


def is_hom_discrete(track: FinTrackCategory) -> bool:
    seen = set()
    for c in track.two_cells.morphisms:
        key = (track.d0(c), track.d1(c))
        if key in seen:
            return False
        seen.add(key)
    return True


def pi0_track(track: FinTrackCategory) -> Tuple[FinCat, CatFunctor]:
    """Quotient of X0 by 2-cell connectedness, with the quotient functor."""
    graph = nx.Graph()
    graph.add_nodes_from(track.one_cells.morphisms)
    for c in track.two_cells.morphisms:
        graph.add_edge(track.d0(c), track.d1(c))
    order = {m: i for i, m in enumerate(track.one_cells.morphisms)}
    representative: Dict[Hashable, Hashable] = {}
    for component in nx.connected_components(graph):
        identities = [m for m in component if track.one_cells.is_identity(m)]
        rep = identities[0] if identities else min(component, key=order.__getitem__)
        for m in component:
            representative[m] = rep
    reps = sorted(set(representative.values()), key=order.__getitem__)
    morphisms = {r: track.one_cells.morphisms[r] for r in reps}
    table: Dict[Tuple[Hashable, Hashable], Hashable] = {}
    for f, g in track.one_cells.composable_pairs():
        key = (representative[f], representative[g])
        value = representative[track.one_cells.compose(f, g)]
        if table.setdefault(key, value) != value:
            raise IllDefinedComposite(f"composite of classes of {f!r} and {g!r} is not well defined")
    identities = {x: representative[track.one_cells.identity(x)] for x in track.objects}
    quotient = FinCat(track.objects, morphisms, identities, table, name=f"pi0({track.name})")
    return quotient, CatFunctor(track.one_cells, quotient, representative)


@dataclass
class SplitEpiCat:
    """Split epimorphism q: total -> base with section t."""

    total: FinCat
    base: FinCat
    q: CatFunctor
    t: CatFunctor

    def validate(self) -> ValidationReport:
        violations: List[str] = []
        checked = 0
        for label, functor in (("q", self.q), ("t", self.t)):
            report = validate_functor(functor, label)
            checked += report.checked
            violations.extend(f"{label}: {v}" for v in report.violations)
        if not violations:
            for b in self.base.morphisms:
                checked += 1
                if self.q(self.t(b)) != b:
                    violations.append(f"q t is not the identity on {b!r}")
        return ValidationReport.from_violations("split epimorphism", violations, checked)


@dataclass
class SplitEpiMap:
    """Morphism of split epimorphisms: functors on totals and bases commuting with q and t."""

    source: SplitEpiCat
    target: SplitEpiCat
    total: CatFunctor
    base: CatFunctor

    def validate(self) -> ValidationReport:
        violations: List[str] = []
        for a in self.source.total.morphisms:
            if self.target.q(self.total(a)) != self.base(self.source.q(a)):
                violations.append(f"q is not preserved at {a!r}")
        for b in self.source.base.morphisms:
            if self.total(self.source.t(b)) != self.target.t(self.base(b)):
                violations.append(f"t is not preserved at {b!r}")
        checked = len(self.source.total.morphisms) + len(self.source.base.morphisms)
        return ValidationReport.from_violations("split epimorphism map", violations, checked)


@dataclass
class Splitting:
    """Output of the kernel-pair construction: HY with its splitting and the unit Y -> RHY."""

    track: FinTrackCategory
    split: SplitEpiCat
    unit: SplitEpiMap

    @property
    def q(self) -> CatFunctor:
        return self.split.q

    @property
    def t(self) -> CatFunctor:
        return self.split.t


def _kernel_pair_track(total: FinCat, q: CatFunctor, name: str) -> FinTrackCategory:
    fibers: Dict[Hashable, List[Hashable]] = {}
    for a in total.morphisms:
        fibers.setdefault(q(a), []).append(a)
    cells = [(a, b) for a in total.morphisms for b in fibers[q(a)]]
    morphisms = {c: total.morphisms[c[0]] for c in cells}
    starting: Dict[Hashable, List[Tuple[Hashable, Hashable]]] = {}
    for c in cells:
        starting.setdefault(morphisms[c][0], []).append(c)
    table = {}
    for c in cells:
        for e in starting.get(morphisms[c][1], []):
            table[(c, e)] = (total.compose(c[0], e[0]), total.compose(c[1], e[1]))
    identities = {x: (total.identity(x), total.identity(x)) for x in total.objects}
    pairs = FinCat(total.objects, morphisms, identities, table, name=f"pairs({total.name})")
    by_first: Dict[Hashable, List[Tuple[Hashable, Hashable]]] = {}
    for c in cells:
        by_first.setdefault(c[0], []).append(c)
    vcomp = {(c, e): (c[0], e[1]) for c in cells for e in by_first[c[1]]}
    return FinTrackCategory.from_tables(
        total,
        pairs,
        {c: c[0] for c in cells},
        {c: c[1] for c in cells},
        {a: (a, a) for a in total.morphisms},
        vcomp,
        {c: (c[1], c[0]) for c in cells},
        name=name,
    )


def bourne_H(split: SplitEpiCat) -> Splitting:
    report = split.validate()
    if not report.ok:
        raise NotSplit("split epimorphism is inconsistent", report.violations)
    track = _kernel_pair_track(split.total, split.q, name=f"H({split.total.name})")
    unit_total = CatFunctor(
        split.total,
        track.two_cells,
        {a: (split.t(split.q(a)), a) for a in split.total.morphisms},
    )
    unit = SplitEpiMap(split, bourne_R(track), unit_total, split.t)
    return Splitting(track, split, unit)


def bourne_R(track: FinTrackCategory) -> SplitEpiCat:
    return SplitEpiCat(track.two_cells, track.one_cells, track.d0, track.s0)


@dataclass
class TrackFunctor:
    """Identity-on-objects functor between track categories, given on 1-cells and 2-cells."""

    domain: FinTrackCategory
    codomain: FinTrackCategory
    one: CatFunctor
    two: CatFunctor

    @classmethod
    def from_maps(
        cls, domain: FinTrackCategory, codomain: FinTrackCategory, one: Dict, two: Dict
    ) -> "TrackFunctor":
        return cls(
            domain,
            codomain,
            CatFunctor(domain.one_cells, codomain.one_cells, dict(one)),
            CatFunctor(domain.two_cells, codomain.two_cells, dict(two)),
        )

    def __call__(self, cell: Cell) -> Cell:
        return self.two(cell)

    def then(self, other: "TrackFunctor") -> "TrackFunctor":
        return compose_track_functors(self, other)


def compose_track_functors(first: TrackFunctor, then: TrackFunctor) -> TrackFunctor:
    return TrackFunctor.from_maps(
        first.domain,
        then.codomain,
        {u: then.one(first.one(u)) for u in first.domain.one_cells.morphisms},
        {c: then.two(first.two(c)) for c in first.domain.two_cells.morphisms},
    )


def validate_track_functor(functor: TrackFunctor, subject: str = "track functor") -> ValidationReport:
    violations: List[str] = []
    checked = 0
    for label, component in (("1-cells", functor.one), ("2-cells", functor.two)):
        report = validate_functor(component, label)
        checked += report.checked
        violations.extend(f"{label}: {v}" for v in report.violations)
    if violations:
        return ValidationReport.from_violations(subject, violations, checked)
    source, target = functor.domain, functor.codomain
    for c in source.two_cells.morphisms:
        checked += 3
        image = functor.two(c)
        if target.d0(image) != functor.one(source.d0(c)) or target.d1(image) != functor.one(source.d1(c)):
            violations.append(f"boundary of {c!r} is not preserved")
        if target.vinv[image] != functor.two(source.vinv[c]):
            violations.append(f"inverse of {c!r} is not preserved")
    for u in source.one_cells.morphisms:
        checked += 1
        if target.s0(functor.one(u)) != functor.two(source.s0(u)):
            violations.append(f"unit 2-cell on {u!r} is not preserved")
    for (a, b), ab in source.vcomp.items():
        checked += 1
        if target.vcomp.get((functor.two(a), functor.two(b))) != functor.two(ab):
            violations.append(f"vertical composite of {a!r} and {b!r} is not preserved")
    return ValidationReport.from_violations(subject, violations, checked)


def track_functors_equal(first: TrackFunctor, second: TrackFunctor) -> bool:
    return all(first.one(u) == second.one(u) for u in first.domain.one_cells.morphisms) and all(
        first.two(c) == second.two(c) for c in first.domain.two_cells.morphisms
    )


def bourne_counit(track: FinTrackCategory) -> TrackFunctor:
    """HRX -> X: a 2-cell a of X becomes its target, a pair (a, b) becomes a^-1 then b."""
    hr = bourne_H(bourne_R(track)).track
    one = {a: track.d1(a) for a in hr.one_cells.morphisms}
    two = {(a, b): track.vcompose(track.inverse(a), b) for a, b in hr.two_cells.morphisms}
    return TrackFunctor.from_maps(hr, track, one, two)


def bourne_H_map(f: SplitEpiMap, source: FinTrackCategory, target: FinTrackCategory) -> TrackFunctor:
    one = {a: f.total(a) for a in source.one_cells.morphisms}
    two = {(a, b): (f.total(a), f.total(b)) for a, b in source.two_cells.morphisms}
    return TrackFunctor.from_maps(source, target, one, two)


def triangle_identities(split: SplitEpiCat, track: FinTrackCategory) -> ValidationReport:
    """Both triangle identities of H -| R, at the split epimorphism ``split`` and at ``track``."""
    violations: List[str] = []
    checked = 0

    hy = bourne_H(split)
    hrhy = bourne_H(bourne_R(hy.track)).track
    composite = compose_track_functors(bourne_H_map(hy.unit, hy.track, hrhy), bourne_counit(hy.track))
    for u in hy.track.one_cells.morphisms:
        checked += 1
        if composite.one(u) != u:
            violations.append(f"counit after H(unit) moves 1-cell {u!r}")
    for c in hy.track.two_cells.morphisms:
        checked += 1
        if composite.two(c) != c:
            violations.append(f"counit after H(unit) moves 2-cell {c!r}")

    rx = bourne_R(track)
    unit = bourne_H(rx).unit
    counit = bourne_counit(track)
    for a in rx.total.morphisms:
        checked += 1
        if counit.two(unit.total(a)) != a:
            violations.append(f"R(counit) after unit moves {a!r}")
    for u in rx.base.morphisms:
        checked += 1
        if counit.one(unit.base(u)) != u:
            violations.append(f"R(counit) after unit moves base 1-cell {u!r}")
    return ValidationReport.from_violations("triangle identities", violations, checked)


def idempotent_e(splitting: Splitting) -> TrackFunctor:
    track, split = splitting.track, splitting.split
    if not split.validate().ok or track.one_cells is not split.total:
        raise NotSplit("splitting data does not belong to this track category")
    e0 = {a: split.t(split.q(a)) for a in track.one_cells.morphisms}
    e1 = {(a, b): (e0[a], e0[b]) for a, b in track.two_cells.morphisms}
    functor = TrackFunctor.from_maps(track, track, e0, e1)
    if not track_functors_equal(compose_track_functors(functor, functor), functor):
        raise NotSplit("t q is not idempotent")
    return functor


def L_free(category: FreeCat) -> FlavoredTrack:
    if not category.acyclic:
        raise CyclicQuiver(f"generator quiver has a directed cycle through {category.generators.find_cycle()}")
    atoms = [CellTerm(0, e.src, e.tgt, atom=e.id) for e in category.generators.edges]
    return FlavoredTrack(1, category.objects, atoms)


@dataclass
class FlavoredTrackFunctor:
    """Track functor out of a generator-presented track category, given on flavored letters."""

    domain: FlavoredTrack
    codomain: FinTrackCategory
    images: Dict[Tuple[CellTerm, str], Cell]

    def two(self, cell: CellTerm) -> Cell:
        result = self.codomain.identity_cell(cell.src)
        for letter in cell.letters:
            result = self.codomain.hcompose(result, self.images[letter])
        return result

    def one(self, one_cell: OneCellTerm) -> Hashable:
        return self.codomain.d0(self.two(self.domain.s0(one_cell)))

    def validate(self) -> ValidationReport:
        violations: List[str] = []
        x = self.codomain
        for g in self.domain.generators:
            st = self.images.get((g, "st"))
            if st is None:
                violations.append(f"generator {g} has no st image")
                continue
            if x.two_cells.morphisms.get(st) != (g.src, g.tgt):
                violations.append(f"image of ({g},st) has wrong endpoints")
                continue
            expected = {
                "ss": x.s0(x.d0(st)),
                "ts": x.inverse(st),
                "tt": x.s0(x.d1(st)),
            }
            for flavor, cell in expected.items():
                if self.images.get((g, flavor)) != cell:
                    violations.append(f"image of ({g},{flavor}) is not forced by ({g},st)")
        return ValidationReport.from_violations("flavored track functor", violations, len(self.domain.generators))


def transpose_forward(category: FreeCat, track: FinTrackCategory, f: CatFunctor) -> FlavoredTrackFunctor:
    lifted = L_free(category)
    images: Dict[Tuple[CellTerm, str], Cell] = {}
    for g in lifted.generators:
        if g.atom not in f.mapping:
            raise NotAFunctor(f"generator {g.atom!r} has no image")
        cell = f.mapping[g.atom]
        if track.two_cells.morphisms.get(cell) != (g.src, g.tgt):
            raise NotAFunctor(f"image of generator {g.atom!r} has wrong endpoints")
        images[(g, "ss")] = track.s0(track.d0(cell))
        images[(g, "st")] = cell
        images[(g, "ts")] = track.inverse(cell)
        images[(g, "tt")] = track.s0(track.d1(cell))
    return FlavoredTrackFunctor(lifted, track, images)


def transpose_backward(category: FreeCat, functor: FlavoredTrackFunctor) -> CatFunctor:
    report = functor.validate()
    if not report.ok:
        raise NotAFunctor("data is not a track functor out of the free track category", report.violations)
    mapping = {g.atom: functor.images[(g, "st")] for g in functor.domain.generators}
    return CatFunctor(category, functor.codomain.two_cells, mapping)


def transpose_LU(direction: str, category: FreeCat, track: FinTrackCategory, data):
    if direction == "forward":
        return transpose_forward(category, track, data)
    if direction == "backward":
        return transpose_backward(category, data)
    raise ValueError(f"unknown transpose direction: {direction}")


def counit_transpose(track: FinTrackCategory, generators: List[CellTerm]) -> FlavoredTrackFunctor:
    """Transpose of the identity on the 2-cells: the counit from the level-1 resolution stage."""
    category = FreeCat(Quiver(track.objects, [Edge(g.atom, g.src, g.tgt) for g in generators]))
    inclusion = CatFunctor(category, track.two_cells, {g.atom: g.atom for g in generators})
    return transpose_forward(category, track, inclusion)


@dataclass
class SConstruction:
    track: FinTrackCategory
    projection: TrackFunctor
    base_paths: List[Path]


def s_construction(track: FinTrackCategory) -> SConstruction:
    """Replace X0 by the free category on its non-identity 1-cells, pulling 2-cells back."""
    generators = FreeCat(track.one_cells.generator_quiver())
    if not generators.acyclic:
        raise CyclicQuiver(f"1-cells of {track.name} have a directed cycle through {generators.generators.find_cycle()}")
    x0 = track.one_cells
    paths = [generators.identity(x) for x in track.objects] + free_enumerate(generators)
    counit = {p: x0.compose_all(p.edges, p.src) for p in paths}
    base = FinCat(
        track.objects,
        {p: (p.src, p.tgt) for p in paths},
        {x: generators.identity(x) for x in track.objects},
        {(p, r): generators.compose(p, r) for p in paths for r in paths if p.tgt == r.src},
        name=f"F({x0.name})",
    )
    by_ends: Dict[Tuple[Hashable, Hashable], List[Path]] = {}
    for p in paths:
        by_ends.setdefault((p.src, p.tgt), []).append(p)
    cells = []
    for p in paths:
        for r in by_ends[(p.src, p.tgt)]:
            for a in track.parallel(counit[p], counit[r]):
                cells.append((p, r, a))
    starting: Dict[Hashable, List[Tuple[Path, Path, Cell]]] = {}
    for c in cells:
        starting.setdefault(c[0].src, []).append(c)
    table = {}
    for c in cells:
        for e in starting.get(c[0].tgt, []):
            table[(c, e)] = (
                generators.compose(c[0], e[0]),
                generators.compose(c[1], e[1]),
                track.hcompose(c[2], e[2]),
            )
    identities = {x: (generators.identity(x), generators.identity(x), track.identity_cell(x)) for x in track.objects}
    two = FinCat(track.objects, {c: (c[0].src, c[0].tgt) for c in cells}, identities, table, name=f"S({track.name})1")
    by_first: Dict[Path, List[Tuple[Path, Path, Cell]]] = {}
    for c in cells:
        by_first.setdefault(c[0], []).append(c)
    vcomp = {(c, e): (c[0], e[1], track.vcompose(c[2], e[2])) for c in cells for e in by_first[c[1]]}
    s_track = FinTrackCategory.from_tables(
        base,
        two,
        {c: c[0] for c in cells},
        {c: c[1] for c in cells},
        {p: (p, p, track.s0(counit[p])) for p in paths},
        vcomp,
        {c: (c[1], c[0], track.inverse(c[2])) for c in cells},
        name=f"S({track.name})",
    )
    projection = TrackFunctor.from_maps(s_track, track, counit, {c: c[2] for c in cells})
    logger.info("S(%s): %d 1-cells, %d 2-cells", track.name, len(paths), len(cells))
    return SConstruction(s_track, projection, paths)


def is_two_equivalence(functor: TrackFunctor) -> ValidationReport:
    """Hom-wise equivalence: fully faithful on 2-cells and every 1-cell of the target is hit."""
    source, target = functor.domain, functor.codomain
    violations: List[str] = []
    checked = 0
    hit = {functor.one(u) for u in source.one_cells.morphisms}
    for u in target.one_cells.morphisms:
        checked += 1
        if u not in hit:
            violations.append(f"1-cell {u!r} is not in the image")
    by_ends: Dict[Tuple[Hashable, Hashable], List[Hashable]] = {}
    for u in source.one_cells.morphisms:
        by_ends.setdefault(source.one_cells.morphisms[u], []).append(u)
    for group in by_ends.values():
        for u in group:
            for v in group:
                checked += 1
                images = sorted(map(repr, (functor.two(c) for c in source.parallel(u, v))))
                expected = sorted(map(repr, target.parallel(functor.one(u), functor.one(v))))
                if images != expected:
                    violations.append(f"2-cells from {u!r} to {v!r} are not in bijection with their images")
    return ValidationReport.from_violations("2-equivalence", violations, checked)


def split_from_quotient(track: FinTrackCategory, section: Optional[Dict[Hashable, Hashable]] = None) -> SplitEpiCat:
    """X0 -> Pi0 X with a chosen section (class representative by default)."""
    quotient, q = pi0_track(track)
    mapping = section or {m: m for m in quotient.morphisms}
    return SplitEpiCat(track.one_cells, quotient, q, CatFunctor(quotient, track.one_cells, mapping))
