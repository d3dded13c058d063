from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Tuple

from trackhom.errors import CyclicSupport, GateNotPassed, IndexOutOfRange, NotComposable, TooLarge
from trackhom.models.schemas import GateReport, LevelCount, ResolutionReport
from trackhom.services.cat import FOUR_FLAVORS
from trackhom.services.track import Cell, FinTrackCategory, is_hom_discrete
from trackhom.services.terms import CellTerm, FlavoredTrack, OneCellTerm, flavor_words, word
from trackhom.services.zmod import IntMatrix

logger = logging.getLogger(__name__)

DEFAULT_BOUND = 1_000_000


def support_matrix(track: FinTrackCategory) -> IntMatrix:
    """Number of non-identity 2-cells between each ordered pair of objects."""
    position = {x: i for i, x in enumerate(track.objects)}
    size = len(position)
    counts = [[0] * size for _ in range(size)]
    for c in track.non_identity_cells():
        src, tgt = track.two_cells.morphisms[c]
        counts[position[src]][position[tgt]] += 1
    return IntMatrix.from_rows(counts, size)


def _path_counts(adjacency: IntMatrix) -> IntMatrix:
    # sum of (4A)^k over k >= 1; A is nilpotent on an acyclic support
    step = adjacency.scale(len(FOUR_FLAVORS))
    total = IntMatrix.zeros(step.rows, step.cols)
    power = step
    while not power.is_zero():
        total = total + power
        power = power @ step
    return total


def predicted_counts(track: FinTrackCategory, max_level: int) -> List[int]:
    adjacency = support_matrix(track)
    counts = []
    for _ in range(max_level + 1):
        counts.append(sum(sum(row) for row in adjacency.data))
        adjacency = _path_counts(adjacency)
    return counts


def evaluate_gate(track: FinTrackCategory, max_level: int, bound: int = DEFAULT_BOUND) -> GateReport:
    """Gate verdict for resolution levels 0..max_level + 1, never raising."""
    quiver = track.support_quiver()
    if not quiver.is_acyclic():
        witness = [str(c) for c in quiver.find_cycle()]
        return GateReport(
            accepted=False,
            max_level=max_level,
            bound=bound,
            witness=witness,
            reason="cyclic 2-cell support",
        )
    counts = predicted_counts(track, max_level + 1)
    report = GateReport(accepted=True, max_level=max_level, bound=bound, predicted_counts=counts)
    if any(n > bound for n in counts):
        report.accepted = False
        report.reason = f"predicted generator count exceeds {bound}"
    return report


def finiteness_gate(track: FinTrackCategory, max_level: int, bound: int = DEFAULT_BOUND) -> GateReport:
    report = evaluate_gate(track, max_level, bound)
    if report.witness:
        raise CyclicSupport(f"2-cells of {track.name} have cyclic support", report.witness)
    if not report.accepted:
        raise TooLarge(f"{report.reason}: {report.predicted_counts}")
    logger.info("gate accepted %s: predicted counts %s", track.name, report.predicted_counts)
    return report


@dataclass
class LevelData:
    level: int
    generators: List[CellTerm]
    index: Dict[CellTerm, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.index:
            self.index = {g: i for i, g in enumerate(self.generators)}

    def __len__(self) -> int:
        return len(self.generators)


@dataclass
class ResolutionCache:
    """Levels of the comonad resolution of ``base`` with memoized face, degeneracy and augmentation.

    Level m holds the non-identity 2-cells of K^m X; level 0 wraps the 2-cells of X itself.
    ``store`` is an optional persistent level store keyed by ``key``.
    """

    base: FinTrackCategory
    max_level: int
    bound: int = DEFAULT_BOUND
    store: Optional[object] = None
    key: Optional[str] = None
    gate: Optional[GateReport] = None
    _levels: Dict[int, LevelData] = field(default_factory=dict, repr=False)
    _augment: Dict[CellTerm, Cell] = field(default_factory=dict, repr=False)
    _faces: Dict[Tuple[int, CellTerm], CellTerm] = field(default_factory=dict, repr=False)
    _degeneracies: Dict[Tuple[int, CellTerm], CellTerm] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.gate is None:
            self.gate = evaluate_gate(self.base, self.max_level, self.bound)

    def require_gate(self, level: int) -> None:
        if not self.gate.accepted:
            raise GateNotPassed(f"{self.base.name} did not pass the finiteness gate: {self.gate.reason}")
        if level > self.max_level + 1:
            raise GateNotPassed(f"level {level} is beyond the gated range 0..{self.max_level + 1}")

    def track(self, level: int) -> FlavoredTrack:
        """K^level X as a generator-presented track category (level >= 1)."""
        if level < 1:
            raise IndexOutOfRange("K^0 X is the base itself")
        return FlavoredTrack(level, self.base.objects, self.level(level - 1).generators)

    def level(self, m: int) -> LevelData:
        if m < 0:
            raise IndexOutOfRange(f"negative resolution level {m}")
        cached = self._levels.get(m)
        if cached is not None:
            return cached
        self.require_gate(m)
        if m == 0:
            generators = [CellTerm(0, *self.base.two_cells.morphisms[c], atom=c) for c in self.base.non_identity_cells()]
        else:
            previous = self.level(m - 1)
            generators = self._load(m, previous)
            if generators is None:
                generators = flavor_words(self.track(m), FOUR_FLAVORS)
                self._save(m, generators, previous)
        data = LevelData(m, generators)
        self._levels[m] = data
        logger.info("level %d of %s: %d generators", m, self.base.name, len(data))
        return data

    def _load(self, m: int, previous: LevelData) -> Optional[List[CellTerm]]:
        if self.store is None or self.key is None:
            return None
        rows = self.store.load_level(self.key, m)
        if rows is None:
            return None
        return [
            word(m, tuple((previous.generators[i], flavor) for i, flavor in row), previous.generators[row[0][0]].src)
            for row in rows
        ]

    def _save(self, m: int, generators: List[CellTerm], previous: LevelData) -> None:
        if self.store is None or self.key is None:
            return
        rows = [[[previous.index[inner], flavor] for inner, flavor in g.letters] for g in generators]
        self.store.save_level(self.key, m, rows)

    # identities

    def is_identity(self, term: CellTerm) -> bool:
        if term.level == 0:
            return term.atom is None or self.base.two_cells.is_identity(term.atom)
        return not term.letters

    def wrap(self, cell: Cell) -> CellTerm:
        """A 2-cell of X as a level-0 term; horizontal identities become the bare object."""
        src, tgt = self.base.two_cells.morphisms[cell]
        if self.base.two_cells.is_identity(cell):
            return CellTerm(0, src, tgt)
        return CellTerm(0, src, tgt, atom=cell)

    def unit_term(self, cell: CellTerm) -> CellTerm:
        """The single-letter st word on ``cell``, one level up."""
        return CellTerm(cell.level + 1, cell.src, cell.tgt, letters=((cell, "st"),))

    # augmentation

    def augment(self, term: CellTerm) -> Cell:
        if term.level == 0:
            return self.base.identity_cell(term.src) if term.atom is None else term.atom
        cached = self._augment.get(term)
        if cached is not None:
            return cached
        x = self.base
        result = x.identity_cell(term.src)
        for inner, flavor in term.letters:
            result = x.hcompose(result, self.letter_image(self.augment(inner), flavor))
        self._augment[term] = result
        return result

    def letter_image(self, cell: Cell, flavor: str) -> Cell:
        """Counit image in X of a letter over ``cell``."""
        x = self.base
        if flavor == "st":
            return cell
        if flavor == "ts":
            return x.inverse(cell)
        if flavor == "ss":
            return x.s0(x.d0(cell))
        if flavor == "tt":
            return x.s0(x.d1(cell))
        raise ValueError(f"unknown flavor {flavor!r}")

    def augment_one(self, term: OneCellTerm) -> Hashable:
        x = self.base
        result = x.one_cells.identity(term.src)
        for inner, flavor in term.letters:
            cell = self.augment(inner)
            result = x.one_cells.compose(result, x.d0(cell) if flavor == "s" else x.d1(cell))
        return result

    # simplicial structure

    def face(self, i: int, n: int, term: CellTerm) -> CellTerm:
        if n < 1 or not 0 <= i <= n - 1:
            raise IndexOutOfRange(f"face {i} is not defined on level {n}")
        if term.level != n:
            raise IndexOutOfRange(f"term of level {term.level} passed to a face on level {n}")
        key = (i, term)
        cached = self._faces.get(key)
        if cached is not None:
            return cached
        if i == 0:
            result = self._counit_step(term)
        else:
            letters = []
            for inner, flavor in term.letters:
                image = self.face(i - 1, n - 1, inner)
                if not self.is_identity(image):
                    letters.append((image, flavor))
            result = word(n - 1, tuple(letters), term.src)
        self._faces[key] = result
        return result

    def _counit_step(self, term: CellTerm) -> CellTerm:
        n = term.level
        if n == 1:
            x = self.base
            cell = x.identity_cell(term.src)
            for inner, flavor in term.letters:
                cell = x.hcompose(cell, self.letter_image(inner.atom, flavor))
            return self.wrap(cell)
        lower = FlavoredTrack(n - 1, self.base.objects, [])
        result = lower.identity(term.src)
        for inner, flavor in term.letters:
            if flavor == "st":
                image = inner
            elif flavor == "ts":
                image = lower.vinv(inner)
            elif flavor == "ss":
                image = lower.s0(lower.d0(inner))
            else:
                image = lower.s0(lower.d1(inner))
            result = lower.hcompose(result, image)
        return result

    def degeneracy(self, i: int, n: int, term: CellTerm) -> CellTerm:
        if n < 1 or not 0 <= i <= n - 1:
            raise IndexOutOfRange(f"degeneracy {i} is not defined on level {n}")
        if term.level != n:
            raise IndexOutOfRange(f"term of level {term.level} passed to a degeneracy on level {n}")
        key = (i, term)
        cached = self._degeneracies.get(key)
        if cached is not None:
            return cached
        if i == 0:
            letters = tuple((self.unit_term(inner), flavor) for inner, flavor in term.letters)
        else:
            letters = tuple((self.degeneracy(i - 1, n - 1, inner), flavor) for inner, flavor in term.letters)
        result = word(n + 1, letters, term.src)
        self._degeneracies[key] = result
        return result

    def coface_image(self, i: int, generator: CellTerm) -> CellTerm:
        """Image of the free generator on ``generator`` (level m) under the i-th face: a level-m cell."""
        return self.face(i, generator.level + 1, self.unit_term(generator))

    def codegeneracy_image(self, i: int, generator: CellTerm) -> CellTerm:
        """The generator (level m + 1) that the i-th codegeneracy reads at ``generator`` (level m)."""
        return self.degeneracy(i, generator.level + 1, self.unit_term(generator)).letters[0][0]

    def degenerate_generators(self, m: int) -> set:
        """Generators of level m in the image of a degeneracy (m >= 1)."""
        if m < 1:
            return set()
        return {self.codegeneracy_image(i, c) for c in self.level(m - 1).generators for i in range(m)}


def enumerate_level(cache: ResolutionCache, m: int) -> LevelData:
    return cache.level(m)


def term_ops(kind: str, *terms: CellTerm):
    """Structural operations on terms of one level m >= 1."""
    if not terms:
        raise ValueError("term_ops needs at least one term")
    level = terms[0].level
    if level < 1 or any(t.level != level for t in terms):
        raise NotComposable("term operations act on terms of one common level >= 1")
    track = FlavoredTrack(level, (), [])
    if kind in ("d0", "d1", "vinv"):
        return getattr(track, kind)(terms[0])
    if kind == "s0":
        return track.s0(terms[0])
    if kind in ("vcomp", "hcompose"):
        return getattr(track, kind)(terms[0], terms[1])
    raise ValueError(f"unknown term operation: {kind}")


def check_simplicial_identities(cache: ResolutionCache, max_level: int) -> List[str]:
    """Face/degeneracy identities and augmentation compatibility on every generator up to ``max_level``."""
    violations: List[str] = []
    face, degeneracy = cache.face, cache.degeneracy
    for n in range(1, max_level + 1):
        for c in cache.level(n).generators:
            for i in range(n):
                if cache.augment(face(i, n, c)) != cache.augment(c):
                    violations.append(f"augmentation after face {i} moves {c}")
                for j in range(i + 1, n):
                    if face(i, n - 1, face(j, n, c)) != face(j - 1, n - 1, face(i, n, c)):
                        violations.append(f"d{i} d{j} != d{j - 1} d{i} on {c}")
            for j in range(n):
                up = degeneracy(j, n, c)
                for i in range(n + 1):
                    down = face(i, n + 1, up)
                    if i < j:
                        expected = degeneracy(j - 1, n - 1, face(i, n, c)) if n > 1 else None
                    elif i in (j, j + 1):
                        expected = c
                    else:
                        expected = degeneracy(j, n - 1, face(i - 1, n, c)) if n > 1 else None
                    if expected is not None and down != expected:
                        violations.append(f"d{i} s{j} fails on {c}")
                for i in range(j + 1):
                    if degeneracy(i, n + 1, up) != degeneracy(j + 1, n + 1, degeneracy(i, n, c)):
                        violations.append(f"s{i} s{j} != s{j + 1} s{i} on {c}")
    return violations


def hom_discrete_levels(cache: ResolutionCache, max_level: int) -> List[int]:
    """Levels 1..max_level whose materialized K^m X is not homotopically discrete."""
    failing = []
    for m in range(1, max_level + 1):
        if not is_hom_discrete(cache.track(m).materialize()):
            failing.append(m)
    return failing


def resolution_report(cache: ResolutionCache, max_level: int) -> ResolutionReport:
    predicted = cache.gate.predicted_counts
    levels = []
    for m in range(max_level + 1):
        count = len(cache.level(m))
        expected = predicted[m] if m < len(predicted) else count
        levels.append(LevelCount(level=m, generators=count, predicted=expected, matches=count == expected))
    violations = check_simplicial_identities(cache, max_level)
    violations.extend(f"level {m} is not homotopically discrete" for m in hom_discrete_levels(cache, min(max_level, 2)))
    return ResolutionReport(
        levels=levels,
        simplicial_identities_ok=not violations,
        violations=violations,
    )
