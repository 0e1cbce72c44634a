"""The bipartite incidence structure D(n, Q) and its neighbor operator.

Vertices are two disjoint copies of F_Q^n, points ``(p)`` and lines ``[l]``.
A point and a line are incident when the n-1 relations

    l_j - p_j = l_a * p_b        for j = 2..n

hold, where the factor indices (a, b) follow a fixed pattern (see
:func:`equation_shape`).  Both factor indices are always smaller than j, so
given one side and the first coordinate of the other, the remaining
coordinates follow by forward substitution in a single pass.

Coordinate indices are 1-based throughout, matching the usual notation for
these graphs; storage is 0-based tuples.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .errors import ParameterError
from .field import FieldElement, PrimeModulus, active_counter


class VertexKind(Enum):
    POINT = "P"
    LINE = "L"

    def flipped(self) -> "VertexKind":
        return VertexKind.LINE if self is VertexKind.POINT else VertexKind.POINT


@dataclass(frozen=True)
class GraphParams:
    """Dimension n and field order Q of a D(n, Q) graph."""

    n: int
    modulus: PrimeModulus

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ParameterError(f"graph dimension must be >= 2, got {self.n}")


@dataclass(frozen=True)
class Vertex:
    kind: VertexKind
    coords: tuple[int, ...]
    modulus: PrimeModulus

    def __post_init__(self) -> None:
        q = self.modulus.value
        if len(self.coords) < 2:
            raise ParameterError("vertices need at least 2 coordinates")
        for c in self.coords:
            if not 0 <= c < q:
                raise ParameterError(f"coordinate {c} not canonical under modulus {q}")

    @property
    def is_point(self) -> bool:
        return self.kind is VertexKind.POINT

    @property
    def n(self) -> int:
        return len(self.coords)

    def serialize(self) -> str:
        """Wire form ``P:5,10,27`` / ``L:...`` used by key and KAT files."""
        return f"{self.kind.value}:" + ",".join(str(c) for c in self.coords)

    @classmethod
    def parse(cls, text: str, modulus: PrimeModulus) -> "Vertex":
        try:
            tag, body = text.split(":", 1)
            kind = VertexKind(tag)
            coords = tuple(int(part) for part in body.split(","))
        except ValueError as exc:
            raise ParameterError(f"unparsable vertex {text!r}") from exc
        return cls(kind, coords, modulus)


@dataclass(frozen=True)
class EquationShape:
    """Factor indices of the incidence relation l_j - p_j = l_a * p_b."""

    j: int
    line_factor: int
    point_factor: int


def equation_shape(j: int) -> EquationShape:
    """Factor indices for target coordinate j (1-based, 2 <= j).

    The pattern is: (1,1), (2,1), (1,2) for j = 2,3,4 and then, in blocks
    of four starting at j = 5, the line factor and point factor alternate
    between the first coordinate and coordinate j-2:

        j = 5:  l_1 * p_3       j = 6:  l_4 * p_1
        j = 7:  l_5 * p_1       j = 8:  l_1 * p_6
        j = 9:  l_1 * p_7       ...
    """
    if j < 2:
        raise ParameterError(f"equation index must be >= 2, got {j}")
    if j == 2:
        return EquationShape(2, 1, 1)
    if j == 3:
        return EquationShape(3, 2, 1)
    if j == 4:
        return EquationShape(4, 1, 2)
    r = (j - 5) % 4
    if r in (0, 3):
        return EquationShape(j, 1, j - 2)
    return EquationShape(j, j - 2, 1)


@lru_cache(maxsize=None)
def equation_table(n: int) -> tuple[EquationShape, ...]:
    """Shapes for j = 2..n (the equations that exist at dimension n)."""
    if n < 2:
        raise ParameterError(f"graph dimension must be >= 2, got {n}")
    return tuple(equation_shape(j) for j in range(2, n + 1))


def _residue(value: int | FieldElement, modulus: PrimeModulus) -> int:
    if isinstance(value, FieldElement):
        if value.modulus != modulus:
            raise ParameterError(
                f"modulus mismatch: {value.modulus.value} vs {modulus.value}"
            )
        return value.residue
    value = int(value)
    if not 0 <= value < modulus.value:
        raise ParameterError(f"first coordinate {value} not canonical under {modulus.value}")
    return value


def complete_line(point: Vertex, first_coord: int | FieldElement) -> Vertex:
    """The unique line incident to ``point`` whose first coordinate is given.

    Costs exactly n-1 multiplications and n-1 additions.
    """
    if not point.is_point:
        raise ParameterError("complete_line expects a point")
    q = point.modulus.value
    p = point.coords
    n = len(p)
    line = [_residue(first_coord, point.modulus)] + [0] * (n - 1)
    ctr = active_counter()
    for shape in equation_table(n):
        j = shape.j - 1
        prod = line[shape.line_factor - 1] * p[shape.point_factor - 1] % q
        line[j] = (p[j] + prod) % q
        if ctr is not None:
            ctr.muls += 1
            ctr.adds += 1
    return Vertex(VertexKind.LINE, tuple(line), point.modulus)


def complete_point(line: Vertex, first_coord: int | FieldElement) -> Vertex:
    """The unique point incident to ``line`` whose first coordinate is given.

    Costs exactly n-1 multiplications and n-1 subtractions.
    """
    if line.is_point:
        raise ParameterError("complete_point expects a line")
    q = line.modulus.value
    l = line.coords
    n = len(l)
    pt = [_residue(first_coord, line.modulus)] + [0] * (n - 1)
    ctr = active_counter()
    for shape in equation_table(n):
        j = shape.j - 1
        prod = l[shape.line_factor - 1] * pt[shape.point_factor - 1] % q
        pt[j] = (l[j] - prod) % q
        if ctr is not None:
            ctr.muls += 1
            ctr.subs += 1
    return Vertex(VertexKind.POINT, tuple(pt), line.modulus)


def incident(point: Vertex, line: Vertex) -> bool:
    """Whether all n-1 incidence relations hold between ``point`` and ``line``."""
    if point.kind == line.kind:
        kind = "points" if point.is_point else "lines"
        raise ParameterError(f"bipartite: {kind} cannot be incident to {kind}")
    if point.kind is VertexKind.LINE:
        point, line = line, point
    if point.modulus != line.modulus or point.n != line.n:
        raise ParameterError("vertices belong to different graphs")
    q = point.modulus.value
    p, l = point.coords, line.coords
    for shape in equation_table(point.n):
        j = shape.j - 1
        if (l[j] - p[j]) % q != l[shape.line_factor - 1] * p[shape.point_factor - 1] % q:
            return False
    return True


def neighbor(w: Vertex, direction: int, coord_index: int) -> Vertex:
    """One walk step: move to the neighbor selected by ``direction``.

    The first coordinate of the destination is ``(w[coord_index] + t)^2``
    with t the direction reduced mod Q; the rest follows by completion.
    The output kind is always the opposite of the input kind.  Because the
    first coordinate is a square, directions t and -2*w[coord_index] - t
    select the same neighbor (the mirror collision).
    """
    n = w.n
    if not 1 <= coord_index <= n:
        raise ParameterError(f"coordinate index {coord_index} out of range 1..{n}")
    q = w.modulus.value
    t = int(direction) % q
    ctr = active_counter()
    if ctr is not None:
        ctr.adds += 1
        ctr.muls += 1
        ctr.reductions += 1
    x = (w.coords[coord_index - 1] + t) % q
    first = x * x % q
    if w.is_point:
        return complete_line(w, first)
    return complete_point(w, first)


def all_neighbors(w: Vertex) -> list[Vertex]:
    """All Q neighbors of ``w``, one per first coordinate.

    Enumerates the full field, so this is for small-Q analysis only.
    """
    complete = complete_line if w.is_point else complete_point
    return [complete(w, f) for f in range(w.modulus.value)]
