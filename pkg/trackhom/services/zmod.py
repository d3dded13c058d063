from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd, lcm, prod
from typing import Hashable, List, Optional, Sequence, Tuple

from trackhom.errors import IndexOutOfRange, NotAComplex

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    data: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.data) != self.rows or any(len(row) != self.cols for row in self.data):
            raise ValueError(f"matrix data does not have shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in row) for row in rows)
        width = cols if cols is not None else (len(data[0]) if data else 0)
        return cls(len(data), width, data)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        data = tuple(tuple(int(column[i]) for column in columns) for i in range(rows))
        return cls(rows, len(columns), data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, size: int) -> "IntMatrix":
        return cls.scalar(size, 1)

    @classmethod
    def scalar(cls, size: int, value: int) -> "IntMatrix":
        return cls(size, size, tuple(tuple(value if i == j else 0 for j in range(size)) for i in range(size)))

    def entry(self, i: int, j: int) -> int:
        return self.data[i][j]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.data)

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def to_lists(self) -> List[List[int]]:
        return [list(row) for row in self.data]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.data)) if self.rows else tuple(() for _ in range(self.cols)))

    def apply(self, vector: Sequence[int]) -> Vector:
        if len(vector) != self.cols:
            raise ValueError(f"vector of length {len(vector)} does not fit {self.rows}x{self.cols}")
        return tuple(sum(a * b for a, b in zip(row, vector) if a) for row in self.data)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        result = []
        for row in self.data:
            acc = [0] * other.cols
            for k, a in enumerate(row):
                if a:
                    for j, b in enumerate(other.data[k]):
                        if b:
                            acc[j] += a * b
            result.append(tuple(acc))
        return IntMatrix(self.rows, other.cols, tuple(result))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_shape(other)
        return IntMatrix(
            self.rows,
            self.cols,
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)),
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def scale(self, value: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(value * a for a in row) for row in self.data))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("hstack needs equal row counts")
        return IntMatrix(self.rows, self.cols + other.cols, tuple(r + s for r, s in zip(self.data, other.data)))

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("vstack needs equal column counts")
        return IntMatrix(self.rows + other.rows, self.cols, self.data + other.data)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix(len(rows), len(cols), tuple(tuple(self.data[i][j] for j in cols) for i in rows))

    def is_zero(self) -> bool:
        return not any(any(row) for row in self.data)

    def _check_shape(self, other: "IntMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")


class MatrixBuilder:
    """Mutable accumulator used to assemble block matrices before freezing them."""

    def __init__(self, rows: int, cols: int):
        self.rows = rows
        self.cols = cols
        self._data = [[0] * cols for _ in range(rows)]

    def add(self, i: int, j: int, value: int) -> None:
        self._data[i][j] += value

    def add_block(self, row: int, col: int, block: IntMatrix, sign: int = 1) -> None:
        for i, values in enumerate(block.data):
            target = self._data[row + i]
            for j, value in enumerate(values):
                if value:
                    target[col + j] += sign * value

    def build(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(tuple(row) for row in self._data))


def _eye(size: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(size)] for i in range(size)]


class _Reducer:
    # Unimodular row and column operations on a working copy, mirrored on U, U^-1, V, V^-1.

    def __init__(self, matrix: IntMatrix, left: bool, right: bool):
        self.m = matrix.rows
        self.n = matrix.cols
        self.a = [list(row) for row in matrix.data]
        self.u = _eye(self.m) if left else None
        self.ui = _eye(self.m) if left else None
        self.v = _eye(self.n) if right else None
        self.vi = _eye(self.n) if right else None

    def swap_rows(self, i: int, j: int) -> None:
        if i == j:
            return
        self.a[i], self.a[j] = self.a[j], self.a[i]
        if self.u is not None:
            self.u[i], self.u[j] = self.u[j], self.u[i]
            for row in self.ui:
                row[i], row[j] = row[j], row[i]

    def swap_cols(self, i: int, j: int) -> None:
        if i == j:
            return
        for row in self.a:
            row[i], row[j] = row[j], row[i]
        if self.v is not None:
            for row in self.v:
                row[i], row[j] = row[j], row[i]
            self.vi[i], self.vi[j] = self.vi[j], self.vi[i]

    def add_row(self, dst: int, src: int, c: int, start: int) -> None:
        target, source = self.a[dst], self.a[src]
        for k in range(start, self.n):
            x = source[k]
            if x:
                target[k] += c * x
        if self.u is not None:
            target, source = self.u[dst], self.u[src]
            for k in range(self.m):
                x = source[k]
                if x:
                    target[k] += c * x
            for row in self.ui:
                x = row[dst]
                if x:
                    row[src] -= c * x

    def add_col(self, dst: int, src: int, c: int, start: int) -> None:
        for r in range(start, self.m):
            row = self.a[r]
            x = row[src]
            if x:
                row[dst] += c * x
        if self.v is not None:
            for row in self.v:
                x = row[src]
                if x:
                    row[dst] += c * x
            target, source = self.vi[src], self.vi[dst]
            for k in range(self.n):
                x = source[k]
                if x:
                    target[k] -= c * x

    def negate_row(self, i: int) -> None:
        self.a[i] = [-x for x in self.a[i]]
        if self.u is not None:
            self.u[i] = [-x for x in self.u[i]]
            for row in self.ui:
                row[i] = -row[i]

    def _pivot(self, t: int) -> Optional[Tuple[int, int]]:
        best = None
        best_value = 0
        for i in range(t, self.m):
            row = self.a[i]
            for j in range(t, self.n):
                x = row[j]
                if x:
                    size = x if x > 0 else -x
                    if size == 1:
                        return i, j
                    if best is None or size < best_value:
                        best, best_value = (i, j), size
        return best

    def _clear(self, t: int) -> bool:
        p = self.a[t][t]
        clean = True
        for i in range(t + 1, self.m):
            x = self.a[i][t]
            if x:
                self.add_row(i, t, -(x // p), t)
                if self.a[i][t]:
                    clean = False
        row = self.a[t]
        for j in range(t + 1, self.n):
            x = row[j]
            if x:
                self.add_col(j, t, -(x // p), t)
                if row[j]:
                    clean = False
        return clean

    def _smallest_remainder(self, t: int) -> None:
        best = None
        best_value = 0
        for i in range(t + 1, self.m):
            x = abs(self.a[i][t])
            if x and (best is None or x < best_value):
                best, best_value = ("row", i), x
        for j in range(t + 1, self.n):
            x = abs(self.a[t][j])
            if x and (best is None or x < best_value):
                best, best_value = ("col", j), x
        if best is None:
            return
        if best[0] == "row":
            self.swap_rows(t, best[1])
        else:
            self.swap_cols(t, best[1])

    def _non_divisible_row(self, t: int, p: int) -> Optional[int]:
        for i in range(t + 1, self.m):
            row = self.a[i]
            for j in range(t + 1, self.n):
                if row[j] % p:
                    return i
        return None

    def run(self) -> List[int]:
        diagonal: List[int] = []
        t = 0
        while t < min(self.m, self.n):
            pivot = self._pivot(t)
            if pivot is None:
                break
            self.swap_rows(t, pivot[0])
            self.swap_cols(t, pivot[1])
            while True:
                if not self._clear(t):
                    self._smallest_remainder(t)
                    continue
                p = self.a[t][t]
                if p not in (1, -1):
                    bad = self._non_divisible_row(t, p)
                    if bad is not None:
                        self.add_row(t, bad, 1, t)
                        continue
                break
            if self.a[t][t] < 0:
                self.negate_row(t)
            diagonal.append(self.a[t][t])
            t += 1
        return diagonal


def _freeze(rows: Optional[List[List[int]]], size: int) -> Optional[IntMatrix]:
    if rows is None:
        return None
    return IntMatrix(size, size, tuple(tuple(row) for row in rows))


@dataclass(frozen=True)
class SmithForm:
    shape: Tuple[int, int]
    diagonal: Tuple[int, ...]
    left: Optional[IntMatrix] = None
    left_inverse: Optional[IntMatrix] = None
    right: Optional[IntMatrix] = None
    right_inverse: Optional[IntMatrix] = None

    @property
    def rank(self) -> int:
        return len(self.diagonal)

    def normal_form(self) -> IntMatrix:
        rows, cols = self.shape
        data = [[0] * cols for _ in range(rows)]
        for i, d in enumerate(self.diagonal):
            data[i][i] = d
        return IntMatrix.from_rows(data, cols)


def smith_decomposition(matrix: IntMatrix, left: bool = True, right: bool = True) -> SmithForm:
    reducer = _Reducer(matrix, left, right)
    diagonal = reducer.run()
    logger.debug("smith form of %dx%d matrix has rank %d", matrix.rows, matrix.cols, len(diagonal))
    return SmithForm(
        shape=(matrix.rows, matrix.cols),
        diagonal=tuple(diagonal),
        left=_freeze(reducer.u, matrix.rows),
        left_inverse=_freeze(reducer.ui, matrix.rows),
        right=_freeze(reducer.v, matrix.cols),
        right_inverse=_freeze(reducer.vi, matrix.cols),
    )


def smith_normal_form(matrix: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    form = smith_decomposition(matrix)
    return form.left, form.normal_form(), form.right


@dataclass(frozen=True)
class FinAbGroup:
    """Finitely generated abelian group presented as a sum of cyclic groups.

    ``orders`` lists one order per presentation generator (0 means a free summand).
    Any order of 1 is dropped on construction. The canonical invariant-factor form
    is available as ``invariant_factors``.
    """

    orders: Tuple[int, ...] = ()
    generator_labels: Optional[Tuple[Hashable, ...]] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        orders = tuple(int(d) for d in self.orders)
        if any(d < 0 for d in orders):
            raise ValueError(f"negative cyclic order in {orders}")
        labels = self.generator_labels
        if labels is not None and len(labels) != len(orders):
            raise ValueError("one label per generator is required")
        if 1 in orders:
            keep = [i for i, d in enumerate(orders) if d != 1]
            orders = tuple(orders[i] for i in keep)
            labels = tuple(labels[i] for i in keep) if labels is not None else None
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "generator_labels", tuple(labels) if labels is not None else None)

    @classmethod
    def trivial(cls) -> "FinAbGroup":
        return cls(())

    @classmethod
    def cyclic(cls, order: int) -> "FinAbGroup":
        return cls((order,))

    @classmethod
    def free(cls, rank: int) -> "FinAbGroup":
        return cls((0,) * rank)

    @classmethod
    def direct_sum(cls, groups: Sequence["FinAbGroup"], labels: Optional[Sequence[Hashable]] = None) -> "FinAbGroup":
        orders: List[int] = []
        tags: List[Hashable] = []
        for index, group in enumerate(groups):
            orders.extend(group.orders)
            tag = labels[index] if labels is not None else index
            tags.extend((tag, k) for k in range(len(group.orders)))
        return cls(tuple(orders), tuple(tags))

    @property
    def size(self) -> int:
        return len(self.orders)

    @cached_property
    def invariant_factors(self) -> Tuple[int, ...]:
        finite = [d for d in self.orders if d]
        free = len(self.orders) - len(finite)
        factors: Tuple[int, ...] = ()
        if finite:
            form = smith_decomposition(IntMatrix.from_rows([[d if i == j else 0 for j in range(len(finite))] for i, d in enumerate(finite)]), left=False, right=False)
            factors = tuple(d for d in form.diagonal if d != 1)
        return factors + (0,) * free

    @property
    def rank(self) -> int:
        return sum(1 for d in self.orders if d == 0)

    def is_finite(self) -> bool:
        return all(self.orders)

    def is_trivial(self) -> bool:
        return not self.orders

    def order(self) -> Optional[int]:
        if not self.is_finite():
            return None
        return prod(self.orders)

    def same_presentation(self, other: "FinAbGroup") -> bool:
        return self.orders == other.orders

    def reduce(self, coords: Sequence[int]) -> Vector:
        if len(coords) != len(self.orders):
            raise ValueError(f"expected {len(self.orders)} coordinates, got {len(coords)}")
        return tuple(c % d if d else c for c, d in zip(coords, self.orders))

    def relation_columns(self) -> List[Vector]:
        size = len(self.orders)
        return [tuple(d if k == i else 0 for k in range(size)) for i, d in enumerate(self.orders) if d]

    def element(self, coords: Sequence[int]) -> "AbElement":
        return AbElement(self, tuple(coords))

    def zero(self) -> "AbElement":
        return AbElement(self, (0,) * len(self.orders))

    def basis(self) -> List["AbElement"]:
        size = len(self.orders)
        return [AbElement(self, tuple(1 if k == i else 0 for k in range(size))) for i in range(size)]

    def describe(self) -> str:
        factors = self.invariant_factors
        if not factors:
            return "0"
        return " ⊕ ".join("Z" if d == 0 else f"Z/{d}" for d in factors)

    def __str__(self) -> str:
        return self.describe()


@dataclass(frozen=True)
class AbElement:
    group: FinAbGroup
    coords: Vector

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", self.group.reduce(self.coords))

    def __add__(self, other: "AbElement") -> "AbElement":
        return AbElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "AbElement":
        return AbElement(self.group, tuple(-a for a in self.coords))

    def __sub__(self, other: "AbElement") -> "AbElement":
        return self + (-other)

    def is_zero(self) -> bool:
        return not any(self.coords)


@dataclass(frozen=True)
class AbHom:
    domain: FinAbGroup
    codomain: FinAbGroup
    matrix: IntMatrix

    def __post_init__(self) -> None:
        if self.matrix.rows != self.codomain.size or self.matrix.cols != self.domain.size:
            raise ValueError(
                f"matrix {self.matrix.rows}x{self.matrix.cols} does not fit "
                f"{self.domain.size} -> {self.codomain.size} generators"
            )

    @classmethod
    def identity(cls, group: FinAbGroup) -> "AbHom":
        return cls(group, group, IntMatrix.identity(group.size))

    @classmethod
    def zero(cls, domain: FinAbGroup, codomain: FinAbGroup) -> "AbHom":
        return cls(domain, codomain, IntMatrix.zeros(codomain.size, domain.size))

    def is_well_defined(self) -> bool:
        for j, d in enumerate(self.domain.orders):
            if d and any(self.codomain.reduce(tuple(d * x for x in self.matrix.column(j)))):
                return False
        return True

    def apply(self, coords: Sequence[int]) -> Vector:
        return self.codomain.reduce(self.matrix.apply(coords))

    def __call__(self, element: AbElement) -> AbElement:
        return AbElement(self.codomain, self.matrix.apply(element.coords))

    def then(self, other: "AbHom") -> "AbHom":
        if not self.codomain.same_presentation(other.domain):
            raise ValueError("homomorphisms do not compose")
        return AbHom(self.domain, other.codomain, other.matrix @ self.matrix)

    def __add__(self, other: "AbHom") -> "AbHom":
        return AbHom(self.domain, self.codomain, self.matrix + other.matrix)

    def __sub__(self, other: "AbHom") -> "AbHom":
        return AbHom(self.domain, self.codomain, self.matrix - other.matrix)

    def __neg__(self) -> "AbHom":
        return AbHom(self.domain, self.codomain, -self.matrix)

    def is_zero(self) -> bool:
        return all(not any(self.codomain.reduce(col)) for col in self.matrix.columns())

    def equals(self, other: "AbHom") -> bool:
        return (self - other).is_zero()

    def kernel_lattice(self) -> List[Vector]:
        """Generators of the preimage of the codomain relations, domain relations included.

        Rows over a free summand are solved exactly first; the torsion rows are then
        rescaled to the common modulus L = lcm(orders) and solved mod L through one
        Smith form, which avoids stacking a relation column per codomain generator.
        """
        size = self.domain.size
        exact_rows = [i for i, d in enumerate(self.codomain.orders) if d == 0]
        finite_rows = [(i, d) for i, d in enumerate(self.codomain.orders) if d]
        if exact_rows:
            generators = kernel_basis(self.matrix.submatrix(exact_rows, range(size)))
        else:
            generators = [tuple(1 if k == j else 0 for k in range(size)) for j in range(size)]
        if finite_rows and generators:
            modulus = lcm(*(d for _, d in finite_rows))
            scaled = IntMatrix.from_rows(
                [[(modulus // d) * x for x in self.matrix.data[i]] for i, d in finite_rows], size
            )
            basis = IntMatrix.from_columns(generators, size)
            form = smith_decomposition(scaled @ basis, left=False, right=True)
            lifted = []
            for j in range(basis.cols):
                step = modulus // gcd(modulus, form.diagonal[j]) if j < form.rank else 1
                lifted.append(basis.apply(tuple(step * x for x in form.right.column(j))))
            generators = lifted
        return lattice_basis(list(generators) + self.domain.relation_columns(), size)

    def image_lattice(self) -> List[Vector]:
        return lattice_basis(self.matrix.columns() + self.codomain.relation_columns(), self.codomain.size)

    def is_injective(self) -> bool:
        return all(not any(self.domain.reduce(v)) for v in self.kernel_lattice())

    def is_surjective(self) -> bool:
        stacked = self.matrix.hstack(IntMatrix.from_columns(self.codomain.relation_columns(), self.codomain.size))
        form = smith_decomposition(stacked, left=False, right=False)
        return form.rank == self.codomain.size and all(d == 1 for d in form.diagonal)


def kernel_basis(matrix: IntMatrix) -> List[Vector]:
    """Basis of the integer kernel {x : Mx = 0}."""
    if matrix.rows > matrix.cols:
        matrix = row_space_basis(matrix)
    form = smith_decomposition(matrix, left=False, right=True)
    return [form.right.column(j) for j in range(form.rank, matrix.cols)]


def row_space_basis(matrix: IntMatrix) -> IntMatrix:
    """Echelon rows spanning the rational row space of ``matrix``.

    Only the integer kernel is preserved, not the row lattice. Rows are kept
    sparse and divided by their content after every elimination step.
    """
    pivots: dict = {}
    for row in matrix.data:
        vector = {j: x for j, x in enumerate(row) if x}
        while vector:
            lead = min(vector)
            pivot = pivots.get(lead)
            if pivot is None:
                content = 0
                for x in vector.values():
                    content = gcd(content, x)
                if vector[lead] < 0:
                    content = -content
                pivots[lead] = {j: x // content for j, x in vector.items()}
                break
            a, b = vector[lead], pivot[lead]
            g = gcd(a, b)
            fa, fb = b // g, a // g
            merged = {j: fa * x for j, x in vector.items()}
            for j, x in pivot.items():
                value = merged.get(j, 0) - fb * x
                if value:
                    merged[j] = value
                else:
                    merged.pop(j, None)
            content = 0
            for x in merged.values():
                content = gcd(content, x)
            vector = {j: x // content for j, x in merged.items()} if content > 1 else merged
    rows = [[pivots[lead].get(j, 0) for j in range(matrix.cols)] for lead in sorted(pivots)]
    return IntMatrix.from_rows(rows, matrix.cols)


def lattice_basis(vectors: Sequence[Sequence[int]], dim: int) -> List[Vector]:
    vectors = [tuple(v) for v in vectors if any(v)]
    if not vectors:
        return []
    form = smith_decomposition(IntMatrix.from_columns(vectors, dim), left=True, right=False)
    return [tuple(d * x for x in form.left_inverse.column(i)) for i, d in enumerate(form.diagonal)]


class LatticeSolver:
    """Integer coordinates of vectors against a fixed list of lattice generators."""

    def __init__(self, generators: Sequence[Sequence[int]], dim: int):
        self.dim = dim
        self.count = len(generators)
        self._form = smith_decomposition(IntMatrix.from_columns(list(generators), dim), left=True, right=True)

    def solve(self, target: Sequence[int]) -> Optional[Vector]:
        form = self._form
        image = form.left.apply(tuple(target)) if self.dim else ()
        solution = [0] * self.count
        for i, c in enumerate(image):
            if i < form.rank:
                d = form.diagonal[i]
                if c % d:
                    return None
                solution[i] = c // d
            elif c:
                return None
        return form.right.apply(solution) if self.count else ()

    def contains(self, target: Sequence[int]) -> bool:
        return self.solve(target) is not None


def lattice_contains(outer: Sequence[Sequence[int]], inner: Sequence[Sequence[int]], dim: int) -> bool:
    solver = LatticeSolver(outer, dim)
    return all(solver.contains(v) for v in inner)


def lattices_equal(first: Sequence[Sequence[int]], second: Sequence[Sequence[int]], dim: int) -> bool:
    return lattice_contains(first, second, dim) and lattice_contains(second, first, dim)


def cokernel_presentation(matrix: IntMatrix) -> FinAbGroup:
    form = smith_decomposition(matrix, left=False, right=False)
    factors = [d for d in form.diagonal if d != 1]
    return FinAbGroup(tuple(factors) + (0,) * (matrix.rows - form.rank))


def iso_check(first: FinAbGroup, second: FinAbGroup) -> bool:
    return first.invariant_factors == second.invariant_factors


class PreimageSolver:
    """Reusable lifting along one homomorphism (one Smith form per hom)."""

    def __init__(self, hom: AbHom):
        self.hom = hom
        relations = hom.codomain.relation_columns()
        system = hom.matrix.hstack(IntMatrix.from_columns(relations, hom.codomain.size))
        self._solver = LatticeSolver(system.columns(), hom.codomain.size)
        self._kernel: Optional[List[Vector]] = None

    def solve(self, target: AbElement, rule: str = "canonical") -> Optional[AbElement]:
        if rule not in ("canonical", "shifted"):
            raise ValueError(f"unknown preimage rule: {rule}")
        solution = self._solver.solve(target.coords)
        if solution is None:
            return None
        coords = list(solution[: self.hom.domain.size])
        if rule == "shifted":
            if self._kernel is None:
                self._kernel = self.hom.kernel_lattice()
            for vector in self._kernel:
                coords = [a + b for a, b in zip(coords, vector)]
        return AbElement(self.hom.domain, tuple(coords))


def solve_preimage(hom: AbHom, target: AbElement, rule: str = "canonical") -> Optional[AbElement]:
    """Return some x with hom(x) == target, or None when target is not in the image.

    The canonical rule sets every free parameter of the Smith basis to zero. The
    ``shifted`` rule adds the kernel generators to that lift; both give valid lifts.
    """
    return PreimageSolver(hom).solve(target, rule)


@dataclass
class CochainComplexZ:
    levels: List[FinAbGroup]
    differentials: List[AbHom]

    def __post_init__(self) -> None:
        if len(self.differentials) != max(len(self.levels) - 1, 0):
            raise ValueError("a complex needs one differential between consecutive levels")
        for n, d in enumerate(self.differentials):
            if not (d.domain.same_presentation(self.levels[n]) and d.codomain.same_presentation(self.levels[n + 1])):
                raise ValueError(f"differential {n} does not match its levels")

    def square_zero_at(self, n: int) -> bool:
        if n < 1 or n >= len(self.differentials):
            return True
        return self.differentials[n - 1].then(self.differentials[n]).is_zero()


@dataclass
class CohomologyGroup:
    """H^n of a complex together with the data to classify cocycles."""

    degree: int
    group: FinAbGroup
    ambient: FinAbGroup
    cycle_basis: List[Vector]
    _solver: LatticeSolver
    _left: IntMatrix
    _left_inverse: IntMatrix
    _positions: List[int]

    def is_cocycle(self, coords: Sequence[int]) -> bool:
        return self._solver.contains(coords)

    def classify(self, coords: Sequence[int]) -> AbElement:
        local = self._solver.solve(coords)
        if local is None:
            raise NotAComplex(f"vector is not a cocycle in degree {self.degree}")
        image = self._left.apply(local) if local else ()
        return AbElement(self.group, tuple(image[p] for p in self._positions))

    def representative(self, index: int) -> Vector:
        column = self._left_inverse.column(self._positions[index])
        vector = [0] * self.ambient.size
        for weight, basis_vector in zip(column, self.cycle_basis):
            if weight:
                for k, x in enumerate(basis_vector):
                    if x:
                        vector[k] += weight * x
        return tuple(vector)


def cohomology_detail(complex_: CochainComplexZ, n: int) -> CohomologyGroup:
    if n < 0 or n >= len(complex_.levels):
        raise IndexOutOfRange(f"degree {n} outside 0..{len(complex_.levels) - 1}")
    if not complex_.square_zero_at(n):
        raise NotAComplex(f"d∘d is not zero at degree {n}")
    level = complex_.levels[n]
    dim = level.size
    if n < len(complex_.differentials):
        outgoing = complex_.differentials[n]
        cycles = outgoing.kernel_lattice()
    else:
        cycles = [tuple(1 if k == i else 0 for k in range(dim)) for i in range(dim)]
    boundaries = list(level.relation_columns())
    if n >= 1:
        boundaries.extend(complex_.differentials[n - 1].matrix.columns())
    solver = LatticeSolver(cycles, dim)
    local = []
    for vector in boundaries:
        coords = solver.solve(vector)
        if coords is None:
            raise NotAComplex(f"a coboundary in degree {n} is not a cocycle")
        local.append(coords)
    presentation = IntMatrix.from_columns(local, len(cycles))
    form = smith_decomposition(presentation, left=True, right=False)
    positions = [i for i, d in enumerate(form.diagonal) if d != 1]
    orders = [form.diagonal[i] for i in positions]
    positions.extend(range(form.rank, len(cycles)))
    orders.extend([0] * (len(cycles) - form.rank))
    group = FinAbGroup(tuple(orders))
    logger.debug("H^%d: %d cocycle generators, group %s", n, len(cycles), group)
    return CohomologyGroup(
        degree=n,
        group=group,
        ambient=level,
        cycle_basis=cycles,
        _solver=solver,
        _left=form.left,
        _left_inverse=form.left_inverse,
        _positions=positions,
    )


def cohomology_at(complex_: CochainComplexZ, n: int) -> FinAbGroup:
    return cohomology_detail(complex_, n).group


def induced_map(chain_map: AbHom, source: CohomologyGroup, target: CohomologyGroup) -> AbHom:
    columns = []
    for j in range(source.group.size):
        image = chain_map.matrix.apply(source.representative(j))
        columns.append(target.classify(image).coords)
    return AbHom(source.group, target.group, IntMatrix.from_columns(columns, target.group.size))
