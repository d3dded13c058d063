from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Hashable, List, Tuple

from trackhom.errors import TruncationTooShallow
from trackhom.models.schemas import ComparisonReport
from trackhom.services.cat import FinCat
from trackhom.services.track import Cell, FinTrackCategory
from trackhom.services.zmod import AbHom, CochainComplexZ, FinAbGroup, IntMatrix, MatrixBuilder, cohomology_at, iso_check

logger = logging.getLogger(__name__)

SSET_FORMAT = "trackhom.sset/1"

# a vertical stack: its first 1-cell and the 2-cells u_0 => u_1 => ... => u_q
Stack = Tuple[Hashable, Tuple[Cell, ...]]
# a bisimplex: its first object and a horizontal chain of stacks
Bisimplex = Tuple[Hashable, Tuple[Stack, ...]]


@dataclass
class SimplicialSetTrunc:
    """Simplicial set stored up to dimension ``depth`` as index tables."""

    simplices: List[List[Hashable]]
    faces: List[List[List[int]]]
    degeneracies: List[List[List[int]]]

    @property
    def depth(self) -> int:
        return len(self.simplices) - 1

    def face(self, i: int, n: int, k: int) -> int:
        return self.faces[n][i][k]

    def degeneracy(self, i: int, n: int, k: int) -> int:
        return self.degeneracies[n][i][k]

    def nondegenerate(self, n: int) -> List[int]:
        if n == 0:
            return list(range(len(self.simplices[0])))
        images = set()
        for table in self.degeneracies[n - 1]:
            images.update(table)
        return [k for k in range(len(self.simplices[n])) if k not in images]

    def identity_violations(self) -> List[str]:
        violations: List[str] = []
        d, s = self.face, self.degeneracy
        for n in range(2, self.depth + 1):
            for k in range(len(self.simplices[n])):
                for j in range(n + 1):
                    for i in range(j):
                        if d(i, n - 1, d(j, n, k)) != d(j - 1, n - 1, d(i, n, k)):
                            violations.append(f"d{i} d{j} fails on simplex {k} of dimension {n}")
        for n in range(self.depth):
            for k in range(len(self.simplices[n])):
                for j in range(n + 1):
                    up = s(j, n, k)
                    for i in range(n + 2):
                        down = d(i, n + 1, up)
                        if i in (j, j + 1):
                            expected = k
                        elif i < j:
                            expected = s(j - 1, n - 1, d(i, n, k))
                        else:
                            expected = s(j, n - 1, d(i - 1, n, k))
                        if down != expected:
                            violations.append(f"d{i} s{j} fails on simplex {k} of dimension {n}")
                    if n + 1 < self.depth:
                        for i in range(j + 1):
                            if s(i, n + 1, up) != s(j + 1, n + 1, s(i, n, k)):
                                violations.append(f"s{i} s{j} fails on simplex {k} of dimension {n}")
        return violations


def tabulate(
    levels: List[List[Hashable]],
    face: Callable[[int, int, Hashable], Hashable],
    degeneracy: Callable[[int, int, Hashable], Hashable],
) -> SimplicialSetTrunc:
    index = [{x: k for k, x in enumerate(level)} for level in levels]
    faces: List[List[List[int]]] = [[]]
    for n in range(1, len(levels)):
        faces.append([[index[n - 1][face(i, n, x)] for x in levels[n]] for i in range(n + 1)])
    degeneracies = []
    for n in range(len(levels) - 1):
        degeneracies.append([[index[n + 1][degeneracy(i, n, x)] for x in levels[n]] for i in range(n + 1)])
    return SimplicialSetTrunc([list(level) for level in levels], faces, degeneracies)


@dataclass
class BisimplicialTrunc:
    """Double nerve: horizontal chains (categorical) of vertical stacks (groupoidal), up to (depth, depth)."""

    track: FinTrackCategory
    depth: int
    _stacks: Dict[int, List[Stack]] = field(default_factory=dict, repr=False)
    _entries: Dict[Tuple[int, int], List[Bisimplex]] = field(default_factory=dict, repr=False)

    # vertical structure

    def stacks(self, q: int) -> List[Stack]:
        cached = self._stacks.get(q)
        if cached is not None:
            return cached
        x = self.track
        if q == 0:
            result = [(u, ()) for u in x.one_cells.morphisms]
        else:
            by_source: Dict[Hashable, List[Cell]] = {}
            for c in x.two_cells.morphisms:
                by_source.setdefault(x.d0(c), []).append(c)
            result = [(x.d0(c), (c,)) for c in x.two_cells.morphisms]
            for _ in range(q - 1):
                result = [(u, cells + (c,)) for u, cells in result for c in by_source.get(x.d1(cells[-1]), [])]
        self._stacks[q] = result
        return result

    def vertex(self, stack: Stack, j: int) -> Hashable:
        u, cells = stack
        return u if j == 0 else self.track.d1(cells[j - 1])

    def vertical_face(self, j: int, stack: Stack) -> Stack:
        u, cells = stack
        if j == 0:
            return self.track.d1(cells[0]), cells[1:]
        if j == len(cells):
            return u, cells[:-1]
        merged = self.track.vcompose(cells[j - 1], cells[j])
        return u, cells[: j - 1] + (merged,) + cells[j + 1 :]

    def vertical_degeneracy(self, j: int, stack: Stack) -> Stack:
        u, cells = stack
        return u, cells[:j] + (self.track.s0(self.vertex(stack, j)),) + cells[j:]

    # horizontal structure

    def ends(self, stack: Stack) -> Tuple[Hashable, Hashable]:
        return self.track.one_cells.morphisms[stack[0]]

    def hcompose(self, first: Stack, then: Stack) -> Stack:
        x = self.track
        cells = tuple(x.hcompose(a, b) for a, b in zip(first[1], then[1]))
        return x.one_cells.compose(first[0], then[0]), cells

    def identity_stack(self, obj: Hashable, q: int) -> Stack:
        return self.track.one_cells.identity(obj), (self.track.identity_cell(obj),) * q

    def entries(self, p: int, q: int) -> List[Bisimplex]:
        key = (p, q)
        cached = self._entries.get(key)
        if cached is not None:
            return cached
        if p == 0:
            result = [(obj, ()) for obj in self.track.objects]
        else:
            starting: Dict[Hashable, List[Stack]] = {}
            for stack in self.stacks(q):
                starting.setdefault(self.ends(stack)[0], []).append(stack)
            result = [(self.ends(stack)[0], (stack,)) for stack in self.stacks(q)]
            for _ in range(p - 1):
                result = [(obj, chain + (s,)) for obj, chain in result for s in starting.get(self.ends(chain[-1])[1], [])]
        self._entries[key] = result
        return result

    def objects_of(self, simplex: Bisimplex) -> List[Hashable]:
        obj, chain = simplex
        return [obj] + [self.ends(stack)[1] for stack in chain]

    def horizontal_face(self, i: int, simplex: Bisimplex) -> Bisimplex:
        obj, chain = simplex
        if i == 0:
            return self.ends(chain[0])[1], chain[1:]
        if i == len(chain):
            return obj, chain[:-1]
        return obj, chain[: i - 1] + (self.hcompose(chain[i - 1], chain[i]),) + chain[i + 1 :]

    def horizontal_degeneracy(self, i: int, q: int, simplex: Bisimplex) -> Bisimplex:
        obj, chain = simplex
        ident = self.identity_stack(self.objects_of(simplex)[i], q)
        return obj, chain[:i] + (ident,) + chain[i:]

    def vertical_face_all(self, j: int, simplex: Bisimplex) -> Bisimplex:
        obj, chain = simplex
        return obj, tuple(self.vertical_face(j, stack) for stack in chain)

    def vertical_degeneracy_all(self, j: int, simplex: Bisimplex) -> Bisimplex:
        obj, chain = simplex
        return obj, tuple(self.vertical_degeneracy(j, stack) for stack in chain)

    def identity_violations(self) -> List[str]:
        """Face identities in both directions and their commutation, on the whole grid."""
        violations: List[str] = []
        for p in range(self.depth + 1):
            for q in range(self.depth + 1):
                for x in self.entries(p, q):
                    for j in range(q + 1):
                        for i in range(j):
                            if q >= 2 and self.vertical_face_all(i, self.vertical_face_all(j, x)) != self.vertical_face_all(
                                j - 1, self.vertical_face_all(i, x)
                            ):
                                violations.append(f"vertical d{i} d{j} fails at ({p},{q})")
                    for i in range(p + 1 if p else 0):
                        for j in range(q + 1 if q else 0):
                            if self.horizontal_face(i, self.vertical_face_all(j, x)) != self.vertical_face_all(
                                j, self.horizontal_face(i, x)
                            ):
                                violations.append(f"faces do not commute at ({p},{q})")
                    for j in range(p + 1):
                        for i in range(j):
                            if p >= 2 and self.horizontal_face(i, self.horizontal_face(j, x)) != self.horizontal_face(
                                j - 1, self.horizontal_face(i, x)
                            ):
                                violations.append(f"horizontal d{i} d{j} fails at ({p},{q})")
        return violations


def double_nerve(track: FinTrackCategory, depth: int) -> BisimplicialTrunc:
    grid = BisimplicialTrunc(track, depth)
    logger.info(
        "double nerve of %s: diagonal sizes %s",
        track.name,
        [len(grid.entries(n, n)) for n in range(depth + 1)],
    )
    return grid


def diag(grid: BisimplicialTrunc) -> SimplicialSetTrunc:
    levels = [grid.entries(n, n) for n in range(grid.depth + 1)]

    def face(i: int, n: int, x: Bisimplex) -> Bisimplex:
        return grid.horizontal_face(i, grid.vertical_face_all(i, x))

    def degeneracy(i: int, n: int, x: Bisimplex) -> Bisimplex:
        return grid.horizontal_degeneracy(i, n + 1, grid.vertical_degeneracy_all(i, x))

    return tabulate(levels, face, degeneracy)


def category_nerve(category: FinCat, depth: int) -> SimplicialSetTrunc:
    """Nerve of a finite category: n-simplices are chains (v1, ..., vn), v1 applied first."""
    starting: Dict[Hashable, List[Hashable]] = {x: [] for x in category.objects}
    for m, (src, _) in category.morphisms.items():
        starting[src].append(m)
    levels: List[List[Tuple]] = [[(x, ()) for x in category.objects]]
    chains = [(category.src(m), (m,)) for m in category.morphisms]
    for _ in range(depth):
        levels.append(chains)
        chains = [(obj, chain + (m,)) for obj, chain in chains for m in starting[category.tgt(chain[-1])]]

    def face(i: int, n: int, x: Tuple) -> Tuple:
        obj, chain = x
        if i == 0:
            return category.tgt(chain[0]), chain[1:]
        if i == n:
            return obj, chain[:-1]
        return obj, chain[: i - 1] + (category.compose(chain[i - 1], chain[i]),) + chain[i + 1 :]

    def degeneracy(i: int, n: int, x: Tuple) -> Tuple:
        obj, chain = x
        vertex = obj if i == 0 else category.tgt(chain[i - 1])
        return obj, chain[:i] + (category.identity(vertex),) + chain[i:]

    return tabulate(levels, face, degeneracy)


def const_cohomology(sset: SimplicialSetTrunc, group: FinAbGroup, max_degree: int) -> List[FinAbGroup]:
    """Normalized cochains with constant coefficients, H^0..H^max_degree."""
    if sset.depth < max_degree + 1:
        raise TruncationTooShallow(f"depth {sset.depth} cannot determine H^{max_degree}; need {max_degree + 1}")
    size = group.size
    kept = [sset.nondegenerate(n) for n in range(max_degree + 2)]
    position = [{k: i for i, k in enumerate(level)} for level in kept]
    levels = [FinAbGroup(group.orders * len(level)) for level in kept]
    block = IntMatrix.identity(size)
    differentials = []
    for n in range(max_degree + 1):
        builder = MatrixBuilder(levels[n + 1].size, levels[n].size)
        for row, k in enumerate(kept[n + 1]):
            for i in range(n + 2):
                col = position[n].get(sset.face(i, n + 1, k))
                if col is not None:
                    builder.add_block(row * size, col * size, block, sign=-1 if i % 2 else 1)
        differentials.append(AbHom(levels[n], levels[n + 1], builder.build()))
    complex_ = CochainComplexZ(levels, differentials)
    groups = [cohomology_at(complex_, s) for s in range(max_degree + 1)]
    logger.info("constant cohomology: %s", [str(g) for g in groups])
    return groups


def render_sset(sset: SimplicialSetTrunc) -> str:
    """Plain-text incidence listing: one line per simplex with its face indices."""
    lines = [SSET_FORMAT]
    for n, level in enumerate(sset.simplices):
        lines.append(f"dim {n} {len(level)}")
        for k, simplex in enumerate(level):
            faces = " ".join(str(sset.faces[n][i][k]) for i in range(n + 1)) if n else "-"
            lines.append(f"{n} {k} | {faces} | {simplex!r}")
    return "\n".join(lines) + "\n"


def export_sset(sset: SimplicialSetTrunc, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_sset(sset), encoding="utf-8")
    logger.info("wrote %s", path)
    return path


def nerve_comparison(classifying: List[FinAbGroup], total: List[FinAbGroup]) -> ComparisonReport:
    """Constant cohomology of BX against so_total, degrees >= 1."""
    degrees = list(range(1, min(len(classifying), len(total))))
    return ComparisonReport(
        name="classifying space vs so_total",
        degrees=degrees,
        left=[list(classifying[s].invariant_factors) for s in degrees],
        right=[list(total[s].invariant_factors) for s in degrees],
        agrees=all(iso_check(classifying[s], total[s]) for s in degrees),
    )
