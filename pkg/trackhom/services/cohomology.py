from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Tuple

from trackhom.errors import FiberMismatch, InexactDetected, NotAComplex, UnknownCell
from trackhom.models.schemas import ComparisonReport, LESNode, LESReport, SESReport, TheoryTable
from trackhom.services.cat import is_free
from trackhom.services.coeff import TrackModule, conjugation, pullback_module
from trackhom.services.resolution import ResolutionCache
from trackhom.services.track import Cell, FinTrackCategory, s_construction
from trackhom.services.zmod import (
    AbHom,
    CochainComplexZ,
    CohomologyGroup,
    FinAbGroup,
    IntMatrix,
    MatrixBuilder,
    PreimageSolver,
    cohomology_at,
    cohomology_detail,
    induced_map,
    iso_check,
    lattices_equal,
)

logger = logging.getLogger(__name__)

COMONAD = "comonad"
SO_TOTAL = "so_total"
SO_BASE = "so_base"
THEORIES = (COMONAD, SO_TOTAL, SO_BASE)
SIDES = ("s", "t")


@dataclass
class Layout:
    """Direct sum of fibers, one block per key."""

    keys: List[Hashable]
    groups: List[FinAbGroup]
    offsets: Dict[Hashable, int] = field(default_factory=dict)
    group: FinAbGroup = field(default_factory=FinAbGroup.trivial)
    _by_key: Dict[Hashable, FinAbGroup] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        position = 0
        for key, group in zip(self.keys, self.groups):
            self.offsets[key] = position
            self._by_key[key] = group
            position += group.size
        self.group = FinAbGroup.direct_sum(self.groups, labels=self.keys)

    def block(self, key: Hashable) -> Tuple[int, FinAbGroup]:
        try:
            return self.offsets[key], self._by_key[key]
        except KeyError as exc:
            raise UnknownCell(f"no summand for {key!r}") from exc

    def coordinates(self, keys) -> List[int]:
        result: List[int] = []
        for key in keys:
            start, group = self.block(key)
            result.extend(range(start, start + group.size))
        return result


def alternating_sum(maps: List[AbHom]) -> AbHom:
    total = maps[0]
    for i, coface in enumerate(maps[1:], start=1):
        total = total - coface if i % 2 else total + coface
    return total


@dataclass
class CosimplicialAb:
    """Truncated cosimplicial abelian group: levels 0..N+1, cofaces and codegeneracies between them."""

    name: str
    layouts: List[Layout]
    cofaces: List[List[AbHom]]
    codegeneracies: List[List[AbHom]] = field(default_factory=list)
    nondegenerate: List[List[Hashable]] = field(default_factory=list)

    @property
    def levels(self) -> List[FinAbGroup]:
        return [layout.group for layout in self.layouts]

    def differential(self, n: int) -> AbHom:
        return alternating_sum(self.cofaces[n])

    def cochain_complex(self) -> CochainComplexZ:
        return CochainComplexZ(self.levels, [self.differential(n) for n in range(len(self.cofaces))])

    def normalized_complex(self) -> CochainComplexZ:
        """Subcomplex of cochains vanishing on degenerate generators."""
        coords = [layout.coordinates(keys) for layout, keys in zip(self.layouts, self.nondegenerate)]
        levels = []
        for layout, keep in zip(self.layouts, coords):
            levels.append(FinAbGroup(tuple(layout.group.orders[k] for k in keep)))
        differentials = []
        for n in range(len(self.cofaces)):
            matrix = self.differential(n).matrix.submatrix(coords[n + 1], coords[n])
            differentials.append(AbHom(levels[n], levels[n + 1], matrix))
        return CochainComplexZ(levels, differentials)

    def identity_violations(self) -> List[str]:
        violations: List[str] = []
        d, s = self.cofaces, self.codegeneracies
        for n in range(len(d) - 1):
            for j in range(n + 3):
                for i in range(j):
                    if not d[n][i].then(d[n + 1][j]).equals(d[n][j - 1].then(d[n + 1][i])):
                        violations.append(f"{self.name}: d{j} d{i} != d{i} d{j - 1} on level {n}")
        for n in range(min(len(d), len(s))):
            for j in range(n + 1):
                for i in range(n + 2):
                    composite = d[n][i].then(s[n][j])
                    if i in (j, j + 1):
                        expected = AbHom.identity(self.levels[n])
                    elif n == 0:
                        continue
                    elif i < j:
                        expected = s[n - 1][j - 1].then(d[n - 1][i])
                    else:
                        expected = s[n - 1][j].then(d[n - 1][i - 1])
                    if not composite.equals(expected):
                        violations.append(f"{self.name}: s{j} d{i} fails on level {n}")
        return violations


def _whisker_maps(module: TrackModule, cells: List[Cell], src: Hashable) -> List[AbHom]:
    """Maps carrying the j-th factor's fiber into the fiber over the horizontal composite."""
    base = module.base
    prefixes = [base.identity_cell(src)]
    for cell in cells:
        prefixes.append(base.hcompose(prefixes[-1], cell))
    tail = AbHom.identity(module.fiber(prefixes[-1]))
    maps: List[Optional[AbHom]] = [None] * len(cells)
    for j in range(len(cells) - 1, -1, -1):
        maps[j] = module.hr(prefixes[j], cells[j]).then(tail)
        tail = module.hl(prefixes[j], cells[j]).then(tail)
    return maps


@dataclass
class CochainBuilder:
    """Cochains of the resolution with values in ``module``, for all three theories."""

    cache: ResolutionCache
    module: TrackModule
    _layouts: Dict[Tuple[str, int], Layout] = field(default_factory=dict, repr=False)
    _cofaces: Dict[Tuple[str, int], List[AbHom]] = field(default_factory=dict, repr=False)
    _xi: Dict[int, AbHom] = field(default_factory=dict, repr=False)
    _theta: Dict[int, AbHom] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.module.base is not self.cache.base:
            raise FiberMismatch("module and resolution are over different track categories")

    @property
    def base(self) -> FinTrackCategory:
        return self.cache.base

    def loop(self, one_cell: Hashable) -> FinAbGroup:
        return self.module.fiber(self.base.s0(one_cell))

    def layout(self, theory: str, n: int) -> Layout:
        key = (theory, n)
        cached = self._layouts.get(key)
        if cached is not None:
            return cached
        x, augment = self.base, self.cache.augment
        generators = self.cache.level(n).generators
        if theory == COMONAD:
            layout = Layout(list(generators), [self.module.fiber(augment(c)) for c in generators])
        elif theory == SO_TOTAL:
            layout = Layout(list(generators), [self.loop(x.d0(augment(c))) for c in generators])
        elif theory == SO_BASE:
            keys, groups = [], []
            for c in generators:
                cell = augment(c)
                keys.extend([(c, "s"), (c, "t")])
                groups.extend([self.loop(x.d0(cell)), self.loop(x.d1(cell))])
            layout = Layout(keys, groups)
        else:
            raise ValueError(f"unknown theory: {theory}")
        self._layouts[key] = layout
        return layout

    # cofaces

    def cofaces(self, theory: str, n: int) -> List[AbHom]:
        """d^0..d^{n+1} from level n to level n + 1."""
        key = (theory, n)
        cached = self._cofaces.get(key)
        if cached is not None:
            return cached
        if theory == COMONAD:
            maps = [self._comonad_coface(i, n) for i in range(n + 2)]
        elif theory == SO_BASE:
            maps = [self._base_coface(i, n) for i in range(n + 2)]
        elif theory == SO_TOTAL:
            maps = [self._total_coface(i, n) for i in range(n + 2)]
        else:
            raise ValueError(f"unknown theory: {theory}")
        self._cofaces[key] = maps
        logger.debug("%s cofaces on level %d built", theory, n)
        return maps

    def _comonad_coface(self, i: int, n: int) -> AbHom:
        source, target = self.layout(COMONAD, n), self.layout(COMONAD, n + 1)
        builder = MatrixBuilder(target.group.size, source.group.size)
        for e in self.cache.level(n + 1).generators:
            row, _ = target.block(e)
            image = self.cache.coface_image(i, e)
            cells = [self.cache.letter_image(self.cache.augment(c), fl) for c, fl in image.letters]
            for (c, flavor), whisker in zip(image.letters, _whisker_maps(self.module, cells, image.src)):
                if flavor not in ("st", "ts"):
                    continue
                col, _ = source.block(c)
                if flavor == "ts":
                    whisker = self.module.vinverse[self.cache.augment(c)].then(whisker)
                builder.add_block(row, col, whisker.matrix)
        return AbHom(source.group, target.group, builder.build())

    def _base_coface(self, i: int, n: int) -> AbHom:
        source, target = self.layout(SO_BASE, n), self.layout(SO_BASE, n + 1)
        builder = MatrixBuilder(target.group.size, source.group.size)
        x = self.base
        for e in self.cache.level(n + 1).generators:
            image = self.cache.coface_image(i, e)
            for k, side in enumerate(SIDES):
                row, _ = target.block((e, side))
                letters = [(c, fl[k]) for c, fl in image.letters]
                cells = []
                for c, flavor in letters:
                    cell = self.cache.augment(c)
                    cells.append(x.s0(x.d0(cell) if flavor == "s" else x.d1(cell)))
                for (c, flavor), whisker in zip(letters, _whisker_maps(self.module, cells, image.src)):
                    col, _ = source.block((c, flavor))
                    builder.add_block(row, col, whisker.matrix)
        return AbHom(source.group, target.group, builder.build())

    def _total_coface(self, i: int, n: int) -> AbHom:
        """Section extension over the s-copy: letters read on their first flavor side, t-sides conjugated."""
        source, target = self.layout(SO_TOTAL, n), self.layout(SO_TOTAL, n + 1)
        builder = MatrixBuilder(target.group.size, source.group.size)
        x = self.base
        for e in self.cache.level(n + 1).generators:
            row, _ = target.block(e)
            image = self.cache.coface_image(i, e)
            sides = [(c, flavor[0]) for c, flavor in image.letters]
            cells = []
            for c, side in sides:
                cell = self.cache.augment(c)
                cells.append(x.s0(x.d0(cell) if side == "s" else x.d1(cell)))
            for (c, side), whisker in zip(sides, _whisker_maps(self.module, cells, image.src)):
                if side == "t":
                    whisker = conjugation(self.module, self.cache.augment(c)).then(whisker)
                col, _ = source.block(c)
                builder.add_block(row, col, whisker.matrix)
        return AbHom(source.group, target.group, builder.build())

    # codegeneracies

    def codegeneracies(self, theory: str, n: int) -> List[AbHom]:
        """s^0..s^n from level n + 1 to level n."""
        source, target = self.layout(theory, n + 1), self.layout(theory, n)
        maps = []
        for i in range(n + 1):
            builder = MatrixBuilder(target.group.size, source.group.size)
            for c in self.cache.level(n).generators:
                lifted = self.cache.codegeneracy_image(i, c)
                pairs = [((c, side), (lifted, side)) for side in SIDES] if theory == SO_BASE else [(c, lifted)]
                for row_key, col_key in pairs:
                    row, group = target.block(row_key)
                    col, _ = source.block(col_key)
                    builder.add_block(row, col, IntMatrix.identity(group.size))
            maps.append(AbHom(source.group, target.group, builder.build()))
        return maps

    def nondegenerate(self, theory: str, n: int) -> List[Hashable]:
        degenerate = self.cache.degenerate_generators(n)
        keys = [c for c in self.cache.level(n).generators if c not in degenerate]
        if theory == SO_BASE:
            return [(c, side) for c in keys for side in SIDES]
        return keys

    # comparison maps

    def xi(self, n: int) -> AbHom:
        cached = self._xi.get(n)
        if cached is not None:
            return cached
        source, target = self.layout(SO_TOTAL, n), self.layout(SO_BASE, n)
        builder = MatrixBuilder(target.group.size, source.group.size)
        for c in self.cache.level(n).generators:
            col, group = source.block(c)
            builder.add_block(target.block((c, "s"))[0], col, IntMatrix.identity(group.size))
            builder.add_block(target.block((c, "t"))[0], col, conjugation(self.module, self.cache.augment(c)).matrix)
        hom = AbHom(source.group, target.group, builder.build())
        self._xi[n] = hom
        return hom

    def theta(self, n: int) -> AbHom:
        cached = self._theta.get(n)
        if cached is not None:
            return cached
        source, target = self.layout(SO_BASE, n), self.layout(COMONAD, n)
        builder = MatrixBuilder(target.group.size, source.group.size)
        x, module = self.base, self.module
        for c in self.cache.level(n).generators:
            cell = self.cache.augment(c)
            row, _ = target.block(c)
            after = module.vr(cell, x.s0(x.d1(cell)))
            before = module.vl(x.s0(x.d0(cell)), cell)
            builder.add_block(row, source.block((c, "t"))[0], after.matrix)
            builder.add_block(row, source.block((c, "s"))[0], before.matrix, sign=-1)
        hom = AbHom(source.group, target.group, builder.build())
        self._theta[n] = hom
        return hom

    def cosimplicial(self, theory: str, max_degree: int, with_codegeneracies: bool = True) -> CosimplicialAb:
        top = max_degree + 1
        layouts = [self.layout(theory, n) for n in range(top + 1)]
        cofaces = [self.cofaces(theory, n) for n in range(top)]
        codegeneracies = [self.codegeneracies(theory, n) for n in range(top)] if with_codegeneracies else []
        nondegenerate = [self.nondegenerate(theory, n) for n in range(top + 1)] if with_codegeneracies else []
        logger.info(
            "%s cochains of %s: sizes %s",
            theory,
            self.base.name,
            [layout.group.size for layout in layouts],
        )
        return CosimplicialAb(theory, layouts, cofaces, codegeneracies, nondegenerate)


def build_C(cache: ResolutionCache, module: TrackModule, max_degree: int) -> CosimplicialAb:
    return CochainBuilder(cache, module).cosimplicial(COMONAD, max_degree)


def build_A(cache: ResolutionCache, module: TrackModule, max_degree: int) -> CosimplicialAb:
    return CochainBuilder(cache, module).cosimplicial(SO_TOTAL, max_degree)


def build_B(cache: ResolutionCache, module: TrackModule, max_degree: int) -> CosimplicialAb:
    return CochainBuilder(cache, module).cosimplicial(SO_BASE, max_degree)


def xi_map(cache: ResolutionCache, module: TrackModule, n: int) -> AbHom:
    return CochainBuilder(cache, module).xi(n)


def theta_map(cache: ResolutionCache, module: TrackModule, n: int) -> AbHom:
    return CochainBuilder(cache, module).theta(n)


def _same_size(b: FinAbGroup, a: FinAbGroup, c: FinAbGroup) -> bool:
    if a.is_finite() and b.is_finite() and c.is_finite():
        return b.order() == a.order() * c.order()
    return b.rank == a.rank + c.rank


def verify_ses_level(builder: CochainBuilder, n: int) -> SESReport:
    xi, theta = builder.xi(n), builder.theta(n)
    a, b, c = xi.domain, xi.codomain, theta.codomain
    report = SESReport(
        level=n,
        xi_injective=xi.is_injective(),
        theta_surjective=theta.is_surjective(),
        exact_middle=lattices_equal(xi.image_lattice(), theta.kernel_lattice(), b.size),
        composite_zero=xi.then(theta).is_zero(),
        order_identity=_same_size(b, a, c),
        sizes={SO_TOTAL: a.size, SO_BASE: b.size, COMONAD: c.size},
    )
    if not report.ok:
        logger.warning("short sequence on level %d is not exact: %s", n, report)
    return report


def compute_H(
    theory: str,
    builder: CochainBuilder,
    max_degree: int,
    check_normalized: bool = False,
) -> List[FinAbGroup]:
    cosimplicial = builder.cosimplicial(theory, max_degree, with_codegeneracies=check_normalized)
    complex_ = cosimplicial.cochain_complex()
    groups = [cohomology_at(complex_, s) for s in range(max_degree + 1)]
    if check_normalized:
        normalized = cosimplicial.normalized_complex()
        for s, group in enumerate(groups):
            other = cohomology_at(normalized, s)
            if not iso_check(group, other):
                raise NotAComplex(f"{theory}: normalized H^{s} = {other} but unnormalized H^{s} = {group}")
    logger.info("%s cohomology of %s: %s", theory, builder.base.name, [str(g) for g in groups])
    return groups


def theory_table(theory: str, groups: List[FinAbGroup], normalized_agrees: Optional[bool] = None) -> TheoryTable:
    return TheoryTable(
        theory=theory,
        groups=[list(g.invariant_factors) for g in groups],
        rendered=[f"H^{s} = {g}" for s, g in enumerate(groups)],
        normalized_agrees=normalized_agrees,
    )


def _subgroups_equal(image: AbHom, kernel: AbHom) -> bool:
    return lattices_equal(image.image_lattice(), kernel.kernel_lattice(), image.codomain.size)


@dataclass
class _Connecting:
    builder: CochainBuilder
    n: int
    source: CohomologyGroup
    target: CohomologyGroup

    def matrix(self, rule: str) -> AbHom:
        theta = PreimageSolver(self.builder.theta(self.n))
        xi = PreimageSolver(self.builder.xi(self.n + 1))
        d_base = alternating_sum(self.builder.cofaces(SO_BASE, self.n))
        columns = []
        for j in range(self.source.group.size):
            cocycle = self.source.ambient.element(self.source.representative(j))
            lifted = theta.solve(cocycle, rule)
            if lifted is None:
                raise InexactDetected(
                    f"comonad cocycle {j} in degree {self.n} has no preimage", f"{COMONAD}^{self.n}", list(cocycle.coords)
                )
            pushed = d_base.codomain.element(d_base.matrix.apply(lifted.coords))
            pulled = xi.solve(pushed, rule)
            if pulled is None:
                raise InexactDetected(
                    f"connecting map in degree {self.n} leaves the image of xi", f"{SO_BASE}^{self.n + 1}", list(pushed.coords)
                )
            columns.append(self.target.classify(pulled.coords).coords)
        return AbHom(self.source.group, self.target.group, IntMatrix.from_columns(columns, self.target.group.size))


def les_verify(builder: CochainBuilder, max_degree: int, strict: bool = True) -> LESReport:
    """Long exact sequence so_total -> so_base -> comonad -> so_total[+1] in degrees 0..max_degree."""
    complexes = {
        theory: builder.cosimplicial(theory, max_degree, with_codegeneracies=False).cochain_complex()
        for theory in THEORIES
    }
    detail = {theory: [cohomology_detail(complexes[theory], s) for s in range(max_degree + 1)] for theory in THEORIES}
    sequence: List[Tuple[str, AbHom]] = []
    connecting = []
    choice_invariant = True
    for n in range(max_degree + 1):
        h_a, h_b, h_c = detail[SO_TOTAL][n], detail[SO_BASE][n], detail[COMONAD][n]
        sequence.append((f"{SO_TOTAL}^{n}", induced_map(builder.xi(n), h_a, h_b)))
        sequence.append((f"{SO_BASE}^{n}", induced_map(builder.theta(n), h_b, h_c)))
        if n < max_degree:
            step = _Connecting(builder, n, h_c, detail[SO_TOTAL][n + 1])
            delta = step.matrix("canonical")
            shifted = step.matrix("shifted")
            if not delta.equals(shifted):
                choice_invariant = False
                logger.warning("connecting map in degree %d depends on the lift", n)
            connecting.append(delta.matrix.to_lists())
            sequence.append((f"{COMONAD}^{n}", delta))

    nodes: List[LESNode] = []
    first_label, first_map = sequence[0]
    injective = first_map.is_injective()
    nodes.append(LESNode(label=first_label, status="exact" if injective else "inexact"))
    for (_, incoming), (label, outgoing) in zip(sequence, sequence[1:]):
        exact = _subgroups_equal(incoming, outgoing)
        nodes.append(LESNode(label=label, status="exact" if exact else "inexact"))
    nodes.append(LESNode(label=f"{COMONAD}^{max_degree}", status="not checkable at this truncation"))

    report = LESReport(
        max_degree=max_degree,
        groups={t: [list(h.group.invariant_factors) for h in detail[t]] for t in THEORIES},
        connecting=connecting,
        nodes=nodes,
        connecting_choice_invariant=choice_invariant,
    )
    failing = [node for node in nodes if node.status == "inexact"]
    if failing:
        logger.warning("long sequence is not exact at %s", [node.label for node in failing])
        if strict:
            raise InexactDetected(f"long sequence is not exact at {failing[0].label}", failing[0].label)
    return report


def free_shift_comparison(builder: CochainBuilder, max_degree: int) -> Optional[ComparisonReport]:
    """H^{n+1} of so_total against H^n of the comonad theory, n >= 1, when the 1-cells form a free category."""
    if not is_free(builder.base.one_cells) or max_degree < 2:
        return None
    total = compute_H(SO_TOTAL, builder, max_degree)
    comonad = compute_H(COMONAD, builder, max_degree)
    degrees = list(range(1, max_degree))
    return ComparisonReport(
        name="free degree shift",
        degrees=degrees,
        left=[list(total[n + 1].invariant_factors) for n in degrees],
        right=[list(comonad[n].invariant_factors) for n in degrees],
        agrees=all(iso_check(total[n + 1], comonad[n]) for n in degrees),
    )


def s_construction_comparison(
    track: FinTrackCategory,
    module: TrackModule,
    n: int,
    bound: int,
) -> ComparisonReport:
    """H^{n+1} of so_total of X against H^n of the comonad theory of S(X) with the pulled-back module."""
    construction = s_construction(track)
    pulled = pullback_module(construction.projection, module)
    s_cache = ResolutionCache(construction.track, n, bound)
    s_groups = compute_H(COMONAD, CochainBuilder(s_cache, pulled), n)
    x_cache = ResolutionCache(track, n + 1, bound)
    x_groups = compute_H(SO_TOTAL, CochainBuilder(x_cache, module), n + 1)
    return ComparisonReport(
        name="S(X) degree shift",
        degrees=[n],
        left=[list(x_groups[n + 1].invariant_factors)],
        right=[list(s_groups[n].invariant_factors)],
        agrees=iso_check(x_groups[n + 1], s_groups[n]),
    )
