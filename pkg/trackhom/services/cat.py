from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Sequence, Tuple, Union

import networkx as nx

from trackhom.errors import CyclicQuiver, NotComposable, UnknownMorphism, ValidationError
from trackhom.models.schemas import ValidationReport

logger = logging.getLogger(__name__)

TWO_FLAVORS = ("s", "t")
FOUR_FLAVORS = ("ss", "st", "ts", "tt")


@dataclass(frozen=True)
class Edge:
    id: Hashable
    src: Hashable
    tgt: Hashable


@dataclass
class Quiver:
    """Reflexive graph on a fixed object set; identity loops are implicit."""

    objects: Tuple[Hashable, ...]
    edges: List[Edge] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.objects = tuple(self.objects)
        if len(set(self.objects)) != len(self.objects):
            raise ValidationError("object ids must be distinct")
        known = set(self.objects)
        self._index: Dict[Hashable, int] = {}
        for position, edge in enumerate(self.edges):
            if edge.src not in known or edge.tgt not in known:
                raise ValidationError(f"edge {edge.id!r} has an endpoint outside the object set")
            if edge.id in self._index:
                raise ValidationError(f"duplicate edge id {edge.id!r}")
            self._index[edge.id] = position

    def edge(self, edge_id: Hashable) -> Edge:
        try:
            return self.edges[self._index[edge_id]]
        except KeyError as exc:
            raise UnknownMorphism(f"unknown edge {edge_id!r}") from exc

    def position(self, edge_id: Hashable) -> int:
        return self._index[edge_id]

    def digraph(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.objects)
        for edge in self.edges:
            graph.add_edge(edge.src, edge.tgt, key=edge.id)
        return graph

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.digraph())

    def find_cycle(self) -> List[Hashable]:
        try:
            return [key for _, _, key in nx.find_cycle(self.digraph())]
        except nx.NetworkXNoCycle:
            return []

    def outgoing(self) -> Dict[Hashable, List[Edge]]:
        table: Dict[Hashable, List[Edge]] = {x: [] for x in self.objects}
        for edge in self.edges:
            table[edge.src].append(edge)
        return table


@dataclass
class FinCat:
    """Finite category with a fixed object set.

    ``table`` maps a composable pair (f, g) to f followed by g.
    """

    objects: Tuple[Hashable, ...]
    morphisms: Dict[Hashable, Tuple[Hashable, Hashable]]
    identities: Dict[Hashable, Hashable]
    table: Dict[Tuple[Hashable, Hashable], Hashable]
    name: str = ""

    def __post_init__(self) -> None:
        self.objects = tuple(self.objects)
        self._identity_set = set(self.identities.values())

    def src(self, morphism: Hashable) -> Hashable:
        return self._endpoints(morphism)[0]

    def tgt(self, morphism: Hashable) -> Hashable:
        return self._endpoints(morphism)[1]

    def _endpoints(self, morphism: Hashable) -> Tuple[Hashable, Hashable]:
        try:
            return self.morphisms[morphism]
        except KeyError as exc:
            raise UnknownMorphism(f"{self.name or 'category'} has no morphism {morphism!r}") from exc

    def identity(self, obj: Hashable) -> Hashable:
        return self.identities[obj]

    def is_identity(self, morphism: Hashable) -> bool:
        return morphism in self._identity_set

    def compose(self, first: Hashable, then: Hashable) -> Hashable:
        if self.tgt(first) != self.src(then):
            raise NotComposable(f"{first!r} then {then!r}: endpoints do not match")
        try:
            return self.table[(first, then)]
        except KeyError as exc:
            raise NotComposable(f"composite of {first!r} then {then!r} is missing") from exc

    def compose_all(self, morphisms: Sequence[Hashable], base: Hashable) -> Hashable:
        result = self.identity(base)
        for morphism in morphisms:
            result = self.compose(result, morphism)
        return result

    def non_identity(self) -> List[Hashable]:
        return [m for m in self.morphisms if m not in self._identity_set]

    def hom(self, src: Hashable, tgt: Hashable) -> List[Hashable]:
        return [m for m, ends in self.morphisms.items() if ends == (src, tgt)]

    def composable_pairs(self) -> Iterable[Tuple[Hashable, Hashable]]:
        starting: Dict[Hashable, List[Hashable]] = {x: [] for x in self.objects}
        for m, (src, _) in self.morphisms.items():
            starting[src].append(m)
        for first, (_, tgt) in self.morphisms.items():
            for then in starting[tgt]:
                yield first, then

    def generator_quiver(self) -> Quiver:
        return Quiver(self.objects, [Edge(m, *self.morphisms[m]) for m in self.non_identity()])


def validate_fincat(category: FinCat) -> ValidationReport:
    violations: List[str] = []
    checked = 0
    known = set(category.objects)
    for m, (src, tgt) in category.morphisms.items():
        if src not in known or tgt not in known:
            violations.append(f"morphism {m!r} has an endpoint outside the object set")
    for obj in category.objects:
        ident = category.identities.get(obj)
        if ident is None or category.morphisms.get(ident) != (obj, obj):
            violations.append(f"object {obj!r} has no identity")
    if violations:
        return ValidationReport.from_violations(category.name or "category", violations)
    for first, then in category.composable_pairs():
        checked += 1
        result = category.table.get((first, then))
        if result is None:
            violations.append(f"missing composite {first!r} then {then!r}")
        elif category.morphisms.get(result) != (category.src(first), category.tgt(then)):
            violations.append(f"composite {first!r} then {then!r} = {result!r} has wrong endpoints")
    if violations:
        return ValidationReport.from_violations(category.name or "category", violations, checked)
    for m, (src, tgt) in category.morphisms.items():
        checked += 2
        if category.table[(category.identity(src), m)] != m:
            violations.append(f"left identity fails on {m!r}")
        if category.table[(m, category.identity(tgt))] != m:
            violations.append(f"right identity fails on {m!r}")
    starting: Dict[Hashable, List[Hashable]] = {x: [] for x in category.objects}
    for m, (src, _) in category.morphisms.items():
        starting[src].append(m)
    for f, g in category.composable_pairs():
        fg = category.table[(f, g)]
        for h in starting[category.tgt(g)]:
            checked += 1
            if category.table[(fg, h)] != category.table[(f, category.table[(g, h)])]:
                violations.append(f"associativity fails on ({f!r}, {g!r}, {h!r})")
    return ValidationReport.from_violations(category.name or "category", violations, checked)


@dataclass(frozen=True)
class Path:
    src: Hashable
    tgt: Hashable
    edges: Tuple[Hashable, ...] = ()

    @classmethod
    def empty(cls, obj: Hashable) -> "Path":
        return cls(obj, obj, ())

    def __len__(self) -> int:
        return len(self.edges)

    def __str__(self) -> str:
        if not self.edges:
            return f"id_{self.src}"
        return ";".join(str(e) for e in self.edges)


@dataclass
class FreeCat:
    generators: Quiver
    acyclic: bool = field(init=False)

    def __post_init__(self) -> None:
        self.acyclic = self.generators.is_acyclic()

    @property
    def objects(self) -> Tuple[Hashable, ...]:
        return self.generators.objects

    def identity(self, obj: Hashable) -> Path:
        return Path.empty(obj)

    def generator(self, edge_id: Hashable) -> Path:
        edge = self.generators.edge(edge_id)
        return Path(edge.src, edge.tgt, (edge_id,))

    def src(self, path: Path) -> Hashable:
        return path.src

    def tgt(self, path: Path) -> Hashable:
        return path.tgt

    def compose(self, first: Path, then: Path) -> Path:
        if first.tgt != then.src:
            raise NotComposable(f"paths {first} and {then} do not compose")
        return Path(first.src, then.tgt, first.edges + then.edges)

    def is_identity(self, path: Path) -> bool:
        return not path.edges

    def materialize(self, name: str = "") -> FinCat:
        paths = [self.identity(x) for x in self.objects] + free_enumerate(self)
        morphisms = {p: (p.src, p.tgt) for p in paths}
        table = {}
        for first in paths:
            for then in paths:
                if first.tgt == then.src:
                    table[(first, then)] = self.compose(first, then)
        identities = {x: self.identity(x) for x in self.objects}
        return FinCat(self.objects, morphisms, identities, table, name=name)


def free_enumerate(category: FreeCat) -> List[Path]:
    if not category.acyclic:
        cycle = category.generators.find_cycle()
        raise CyclicQuiver(f"generator quiver has a directed cycle through {cycle}")
    outgoing = category.generators.outgoing()
    frontier = [Path(e.src, e.tgt, (e.id,)) for e in category.generators.edges]
    paths: List[Path] = []
    while frontier:
        paths.extend(frontier)
        frontier = [
            Path(path.src, edge.tgt, path.edges + (edge.id,))
            for path in frontier
            for edge in outgoing[path.tgt]
        ]
    return paths


def count_paths(quiver: Quiver) -> int:
    """Number of nonempty paths, by summing powers of the adjacency matrix."""
    if not quiver.is_acyclic():
        raise CyclicQuiver("path count of a cyclic quiver is infinite")
    index = {x: i for i, x in enumerate(quiver.objects)}
    size = len(index)
    adjacency = [[0] * size for _ in range(size)]
    for edge in quiver.edges:
        adjacency[index[edge.src]][index[edge.tgt]] += 1
    total = 0
    power = adjacency
    while any(any(row) for row in power):
        total += sum(sum(row) for row in power)
        power = [[sum(power[i][k] * adjacency[k][j] for k in range(size)) for j in range(size)] for i in range(size)]
    return total


def quiver_coproduct(quiver: Quiver, flavors: int) -> Quiver:
    if flavors == 2:
        tags: Tuple[str, ...] = TWO_FLAVORS
    elif flavors == 4:
        tags = FOUR_FLAVORS
    elif flavors >= 1:
        tags = tuple(str(i) for i in range(flavors))
    else:
        raise ValueError("at least one flavor is required")
    edges = [Edge((e.id, tag), e.src, e.tgt) for e in quiver.edges for tag in tags]
    return Quiver(quiver.objects, edges)


Category = Union[FinCat, FreeCat]


@dataclass
class CatFunctor:
    """Identity-on-objects functor; for a free domain the map is given on generators."""

    domain: Category
    codomain: Category
    mapping: Dict[Hashable, Hashable]

    def __call__(self, morphism: Hashable) -> Hashable:
        return functor_apply(self, morphism)


def functor_apply(functor: CatFunctor, morphism: Hashable) -> Hashable:
    if isinstance(functor.domain, FreeCat):
        if not isinstance(morphism, Path):
            raise UnknownMorphism(f"{morphism!r} is not a path of the free domain")
        result = functor.codomain.identity(morphism.src)
        for edge_id in morphism.edges:
            if edge_id not in functor.mapping:
                raise UnknownMorphism(f"generator {edge_id!r} has no image")
            result = functor.codomain.compose(result, functor.mapping[edge_id])
        return result
    if morphism not in functor.mapping:
        raise UnknownMorphism(f"{morphism!r} has no image")
    return functor.mapping[morphism]


def identity_functor(category: FinCat) -> CatFunctor:
    return CatFunctor(category, category, {m: m for m in category.morphisms})


def compose_functors(first: CatFunctor, then: CatFunctor) -> CatFunctor:
    if isinstance(first.domain, FreeCat):
        mapping = {e.id: then(first.mapping[e.id]) for e in first.domain.generators.edges}
    else:
        mapping = {m: then(first.mapping[m]) for m in first.domain.morphisms}
    return CatFunctor(first.domain, then.codomain, mapping)


def validate_functor(functor: CatFunctor, subject: str = "functor") -> ValidationReport:
    violations: List[str] = []
    checked = 0
    source, target = functor.domain, functor.codomain
    if isinstance(source, FreeCat):
        for edge in source.generators.edges:
            checked += 1
            image = functor.mapping.get(edge.id)
            if image is None:
                violations.append(f"generator {edge.id!r} has no image")
            elif (target.src(image), target.tgt(image)) != (edge.src, edge.tgt):
                violations.append(f"image of generator {edge.id!r} has wrong endpoints")
        return ValidationReport.from_violations(subject, violations, checked)
    for m, (src, tgt) in source.morphisms.items():
        checked += 1
        image = functor.mapping.get(m)
        if image is None:
            violations.append(f"{m!r} has no image")
        elif (target.src(image), target.tgt(image)) != (src, tgt):
            violations.append(f"image of {m!r} has wrong endpoints")
    if violations:
        return ValidationReport.from_violations(subject, violations, checked)
    for obj in source.objects:
        checked += 1
        if functor.mapping[source.identity(obj)] != target.identity(obj):
            violations.append(f"identity of {obj!r} is not preserved")
    for first, then in source.composable_pairs():
        checked += 1
        if functor.mapping[source.compose(first, then)] != target.compose(functor.mapping[first], functor.mapping[then]):
            violations.append(f"composition of {first!r} then {then!r} is not preserved")
    return ValidationReport.from_violations(subject, violations, checked)


def indecomposables(category: FinCat) -> List[Hashable]:
    """Non-identity morphisms that are not a composite of two non-identity morphisms."""
    composites = {
        category.compose(f, g)
        for f, g in category.composable_pairs()
        if not category.is_identity(f) and not category.is_identity(g)
    }
    return [m for m in category.non_identity() if m not in composites]


def is_free(category: FinCat) -> bool:
    """Whether paths of indecomposables map bijectively onto non-identity morphisms."""
    quiver = Quiver(category.objects, [Edge(m, *category.morphisms[m]) for m in indecomposables(category)])
    if not quiver.is_acyclic():
        return False
    paths = free_enumerate(FreeCat(quiver))
    images = {category.compose_all(p.edges, p.src) for p in paths}
    return len(paths) == len(category.non_identity()) and images == set(category.non_identity())
