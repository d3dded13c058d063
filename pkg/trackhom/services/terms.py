from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Tuple

from trackhom.errors import CyclicQuiver, NotComposable
from trackhom.services.cat import (
    TWO_FLAVORS,
    FOUR_FLAVORS,
    Edge,
    FinCat,
    FreeCat,
    Quiver,
    free_enumerate,
    quiver_coproduct,
)

Letter = Tuple["CellTerm", str]


@dataclass(frozen=True, eq=False)
class CellTerm:
    """2-cell of K^m X: an atom of X at level 0, a flavored word at level m >= 1."""

    level: int
    src: Hashable
    tgt: Hashable
    atom: Optional[Hashable] = None
    letters: Tuple[Letter, ...] = ()
    _hash: int = field(default=0, init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((type(self).__name__, self.level, self.src, self.tgt, self.atom, self.letters)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(other) is not type(self) or other._hash != self._hash:
            return False
        return (
            self.level == other.level
            and self.src == other.src
            and self.tgt == other.tgt
            and self.atom == other.atom
            and self.letters == other.letters
        )

    def __len__(self) -> int:
        return len(self.letters)

    def is_empty_word(self) -> bool:
        return self.level > 0 and not self.letters

    def __str__(self) -> str:
        if self.level == 0:
            return str(self.atom)
        if not self.letters:
            return f"id@{self.src}"
        return "·".join(f"({inner},{flavor})" for inner, flavor in self.letters)


@dataclass(frozen=True, eq=False)
class OneCellTerm(CellTerm):
    """1-cell of K^m X: a 1-cell atom of X at level 0, an s/t-flavored word otherwise."""


def word(level: int, letters: Tuple[Letter, ...], base: Hashable, kind: type = CellTerm) -> CellTerm:
    if not letters:
        return kind(level, base, base)
    for (left, _), (right, _) in zip(letters, letters[1:]):
        if left.tgt != right.src:
            raise NotComposable(f"letters {left} and {right} do not share an object")
    return kind(level, letters[0][0].src, letters[-1][0].tgt, letters=letters)


@dataclass
class FlavoredTrack:
    """The homotopically discrete track category L F(Q) on a quiver of generators.

    Generators are terms of level ``level - 1``; 1-cells are words in s/t copies,
    2-cells are words in ss/st/ts/tt copies, and a flavor pair (x, y) reads as a
    2-cell from the x-copy to the y-copy.
    """

    level: int
    objects: Tuple[Hashable, ...]
    generators: List[CellTerm]

    def __post_init__(self) -> None:
        self.objects = tuple(self.objects)
        self._position: Dict[CellTerm, int] = {g: i for i, g in enumerate(self.generators)}

    def quiver(self) -> Quiver:
        return Quiver(self.objects, [Edge(i, g.src, g.tgt) for i, g in enumerate(self.generators)])

    def identity(self, obj: Hashable) -> CellTerm:
        return CellTerm(self.level, obj, obj)

    def one_identity(self, obj: Hashable) -> OneCellTerm:
        return OneCellTerm(self.level, obj, obj)

    def letter(self, generator: CellTerm, flavor: str) -> CellTerm:
        kind = OneCellTerm if flavor in TWO_FLAVORS else CellTerm
        return kind(self.level, generator.src, generator.tgt, letters=((generator, flavor),))

    def d0(self, cell: CellTerm) -> OneCellTerm:
        return word(self.level, tuple((g, fl[0]) for g, fl in cell.letters), cell.src, OneCellTerm)

    def d1(self, cell: CellTerm) -> OneCellTerm:
        return word(self.level, tuple((g, fl[1]) for g, fl in cell.letters), cell.src, OneCellTerm)

    def s0(self, one_cell: OneCellTerm) -> CellTerm:
        return word(self.level, tuple((g, fl + fl) for g, fl in one_cell.letters), one_cell.src)

    def vinv(self, cell: CellTerm) -> CellTerm:
        return word(self.level, tuple((g, fl[::-1]) for g, fl in cell.letters), cell.src)

    def vcomp(self, first: CellTerm, then: CellTerm) -> CellTerm:
        if len(first.letters) != len(then.letters) or first.src != then.src:
            raise NotComposable(f"{first} and {then} are not vertically composable")
        letters = []
        for (g, x), (h, y) in zip(first.letters, then.letters):
            if g != h or x[1] != y[0]:
                raise NotComposable(f"{first} and {then} are not vertically composable")
            letters.append((g, x[0] + y[1]))
        return word(self.level, tuple(letters), first.src)

    def hcompose(self, first: CellTerm, then: CellTerm) -> CellTerm:
        if first.tgt != then.src:
            raise NotComposable(f"{first} then {then}: objects do not match")
        return word(self.level, first.letters + then.letters, first.src, type(first))

    def is_vertical_identity(self, cell: CellTerm) -> bool:
        return all(fl[0] == fl[1] for _, fl in cell.letters)

    def materialize(self) -> "FinTrackCategory":
        from trackhom.services.track import FinTrackCategory

        quiver = self.quiver()
        if not quiver.is_acyclic():
            raise CyclicQuiver(f"generators of level {self.level} have cyclic support")

        def words(flavors: int, kind: type) -> List[CellTerm]:
            paths = free_enumerate(FreeCat(quiver_coproduct(quiver, flavors)))
            result = [kind(self.level, x, x) for x in self.objects]
            for path in paths:
                letters = tuple((self.generators[i], fl) for i, fl in path.edges)
                result.append(word(self.level, letters, path.src, kind))
            return result

        one_cells = words(2, OneCellTerm)
        two_cells = words(4, CellTerm)
        x0 = _word_category(self, one_cells, "one-cells")
        x1 = _word_category(self, two_cells, "two-cells")
        d0 = {c: self.d0(c) for c in two_cells}
        d1 = {c: self.d1(c) for c in two_cells}
        s0 = {w: self.s0(w) for w in one_cells}
        by_source: Dict[OneCellTerm, List[CellTerm]] = {}
        for c in two_cells:
            by_source.setdefault(d0[c], []).append(c)
        vcomp = {}
        for c in two_cells:
            for e in by_source.get(d1[c], []):
                vcomp[(c, e)] = self.vcomp(c, e)
        vinv = {c: self.vinv(c) for c in two_cells}
        return FinTrackCategory.from_tables(x0, x1, d0, d1, s0, vcomp, vinv, name=f"L-level-{self.level}")


def _word_category(track: FlavoredTrack, cells: List[CellTerm], name: str) -> FinCat:
    starting: Dict[Hashable, List[CellTerm]] = {}
    for c in cells:
        starting.setdefault(c.src, []).append(c)
    table = {}
    for c in cells:
        for e in starting.get(c.tgt, []):
            table[(c, e)] = track.hcompose(c, e)
    identities = {x: cells[i] for i, x in enumerate(track.objects)}
    return FinCat(track.objects, {c: (c.src, c.tgt) for c in cells}, identities, table, name=name)


def flavor_words(track: FlavoredTrack, flavors: Tuple[str, ...] = FOUR_FLAVORS) -> List[CellTerm]:
    """Nonempty words over the generators, ordered by length then (generator, flavor)."""
    quiver = track.quiver()
    if not quiver.is_acyclic():
        raise CyclicQuiver(f"generators of level {track.level} have cyclic support")
    paths = free_enumerate(FreeCat(quiver_coproduct(quiver, len(flavors))))
    kind = OneCellTerm if flavors == TWO_FLAVORS else CellTerm
    return [
        word(track.level, tuple((track.generators[i], fl) for i, fl in path.edges), path.src, kind)
        for path in paths
    ]
