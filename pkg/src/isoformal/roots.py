"""Group specs and root systems in explicit coordinates.

Every simple factor gets its own block of ambient coordinates and the
central torus gets a final block. The invariant form is the ambient dot
product, so blocks are mutually orthogonal.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import RootSystemError
from .grammar import SpecScanner
from .linalg import QMatrix, Vector, dot, kernel_basis, vector

logger = logging.getLogger("isoformal.roots")

_ALIAS = re.compile(r"(?i)(spin|sp|su|so|u)\s*\(\s*(\d+)\s*\)")
_LETTER = re.compile(r"(?i)([a-gt])\s*(\d+)")
_SEPARATOR = re.compile(r"[xX×+]")

_MIN_RANK = {"A": 1, "B": 1, "C": 1, "D": 2, "T": 1}
_FIXED_RANKS = {"E": (6, 7, 8), "F": (4,), "G": (2,)}

EXCEPTIONAL_DEGREES: Dict[Tuple[str, int], Tuple[int, ...]] = {
    ("G", 2): (2, 6),
    ("F", 4): (2, 6, 8, 12),
    ("E", 6): (2, 5, 6, 8, 9, 12),
    ("E", 7): (2, 6, 8, 10, 12, 14, 18),
    ("E", 8): (2, 8, 12, 14, 18, 20, 24, 30),
}

_HALF = Fraction(1, 2)
_E8_SIMPLE = (
    (_HALF, -_HALF, -_HALF, -_HALF, -_HALF, -_HALF, -_HALF, _HALF),
    (1, 1, 0, 0, 0, 0, 0, 0),
    (-1, 1, 0, 0, 0, 0, 0, 0),
    (0, -1, 1, 0, 0, 0, 0, 0),
    (0, 0, -1, 1, 0, 0, 0, 0),
    (0, 0, 0, -1, 1, 0, 0, 0),
    (0, 0, 0, 0, -1, 1, 0, 0),
    (0, 0, 0, 0, 0, -1, 1, 0),
)


@dataclass(frozen=True)
class Factor:
    letter: str
    rank: int

    def __str__(self) -> str:
        return f"{self.letter}{self.rank}"


@dataclass(frozen=True)
class GroupSpec:
    """Simple factors in input order plus the rank of the central torus."""

    factors: Tuple[Factor, ...]
    central_rank: int = 0
    text: str = ""

    @property
    def rank(self) -> int:
        return sum(f.rank for f in self.factors) + self.central_rank

    def canonical(self) -> str:
        parts = [str(f) for f in self.factors]
        if self.central_rank:
            parts.append(f"T{self.central_rank}")
        return "x".join(parts)

    def __str__(self) -> str:
        return self.canonical()


def _checked_factor(letter: str, rank: int, scanner: SpecScanner, start: int) -> Factor:
    if letter in _FIXED_RANKS:
        if rank not in _FIXED_RANKS[letter]:
            allowed = ", ".join(f"{letter}{r}" for r in _FIXED_RANKS[letter])
            raise scanner.error(f"invalid rank {rank} for type {letter} (allowed: {allowed})", start)
    elif rank < _MIN_RANK[letter]:
        raise scanner.error(
            f"invalid rank {rank} for type {letter} (minimum {_MIN_RANK[letter]})", start
        )
    return Factor(letter, rank)


def _expand_alias(name: str, n: int, scanner: SpecScanner, start: int) -> List[Factor]:
    if name == "su":
        if n < 2:
            raise scanner.error(f"SU({n}) is not a valid group", start)
        return [Factor("A", n - 1)]
    if name in ("so", "spin"):
        if n < 2:
            raise scanner.error(f"{name.upper()}({n}) is not a valid group", start)
        if n == 2:
            return [Factor("T", 1)]
        if n % 2:
            return [Factor("B", (n - 1) // 2)]
        return [Factor("D", n // 2)]
    if name == "sp":
        if n < 1:
            raise scanner.error(f"Sp({n}) is not a valid group", start)
        return [Factor("C", n)]
    if n < 1:
        raise scanner.error(f"U({n}) is not a valid group", start)
    if n == 1:
        return [Factor("T", 1)]
    return [Factor("A", n - 1), Factor("T", 1)]


def parse_group_spec(text: str) -> GroupSpec:
    """Parse strings such as ``A2xC1``, ``SU(3)+Sp(1)`` or ``U(3)``."""
    scanner = SpecScanner(text)
    if scanner.at_end():
        raise scanner.error("empty group spec")

    factors: List[Factor] = []
    central = 0
    while True:
        scanner.skip_space()
        start = scanner.pos
        alias = scanner.match(_ALIAS)
        if alias:
            parts = _expand_alias(alias.group(1).lower(), int(alias.group(2)), scanner, start)
        else:
            token = scanner.match(_LETTER)
            if not token:
                raise scanner.error("expected a factor such as A2, T1 or SU(3)")
            parts = [_checked_factor(token.group(1).upper(), int(token.group(2)), scanner, start)]
        for part in parts:
            if part.letter == "T":
                central += part.rank
            else:
                factors.append(part)
        if scanner.at_end():
            break
        if not scanner.match(_SEPARATOR):
            raise scanner.error("expected a separator 'x', '+' or '×'")

    return GroupSpec(tuple(factors), central, text)


def type_degrees(letter: str, rank: int) -> Tuple[int, ...]:
    """Degrees of the basic invariants of one simple factor."""
    if letter == "A":
        return tuple(range(2, rank + 2))
    if letter in ("B", "C"):
        return tuple(range(2, 2 * rank + 1, 2))
    if letter == "D":
        return tuple(sorted(list(range(2, 2 * rank - 1, 2)) + [rank]))
    if letter == "T":
        return (1,) * rank
    try:
        return EXCEPTIONAL_DEGREES[(letter, rank)]
    except KeyError:
        raise RootSystemError(f"Unknown simple type {letter}{rank}") from None


def coxeter_number(letter: str, rank: int) -> int:
    return max(type_degrees(letter, rank))


def weyl_degrees(spec: GroupSpec) -> List[int]:
    degrees: List[int] = []
    for factor in spec.factors:
        degrees.extend(type_degrees(factor.letter, factor.rank))
    degrees.extend([1] * spec.central_rank)
    return sorted(degrees)


def weyl_order_of_type(letter: str, rank: int) -> int:
    return prod(type_degrees(letter, rank))


def _local_simple_roots(letter: str, rank: int) -> Tuple[int, List[Vector]]:
    """Coordinate count and simple roots of one simple factor."""

    def unit(size: int, *pairs: Tuple[int, int]) -> Vector:
        values = [Fraction(0)] * size
        for index, coefficient in pairs:
            values[index] += coefficient
        return tuple(values)

    if letter == "A":
        size = rank + 1
        return size, [unit(size, (i, 1), (i + 1, -1)) for i in range(rank)]
    if letter in ("B", "C", "D"):
        size = rank
        roots = [unit(size, (i, 1), (i + 1, -1)) for i in range(rank - 1)]
        if letter == "B":
            roots.append(unit(size, (rank - 1, 1)))
        elif letter == "C":
            roots.append(unit(size, (rank - 1, 2)))
        else:
            roots.append(unit(size, (rank - 2, 1), (rank - 1, 1)))
        return size, roots
    if letter == "G":
        return 3, [vector((1, -1, 0)), vector((-2, 1, 1))]
    if letter == "F":
        return 4, [
            vector((0, 1, -1, 0)),
            vector((0, 0, 1, -1)),
            vector((0, 0, 0, 1)),
            vector((_HALF, -_HALF, -_HALF, -_HALF)),
        ]
    if letter == "E":
        return 8, [vector(r) for r in _E8_SIMPLE[:rank]]
    raise RootSystemError(f"Unknown simple type {letter}{rank}")


@dataclass(frozen=True)
class Block:
    """Coordinates and simple roots owned by one factor."""

    letter: str
    rank: int
    offset: int
    size: int
    root_offset: int

    @property
    def central(self) -> bool:
        return self.letter == "T"

    @property
    def name(self) -> str:
        return f"{self.letter}{self.rank}"

    def coordinates(self) -> range:
        return range(self.offset, self.offset + self.size)

    def simple_indices(self) -> range:
        if self.central:
            return range(0)
        return range(self.root_offset, self.root_offset + self.rank)


class RootSystem:
    """Roots, coroots and the Cartan subalgebra of a compact group."""

    def __init__(self, spec: GroupSpec) -> None:
        self.spec = spec
        self.blocks: List[Block] = []

        local: List[Tuple[Block, List[Vector]]] = []
        offset = 0
        root_offset = 0
        for factor in spec.factors:
            size, simple = _local_simple_roots(factor.letter, factor.rank)
            block = Block(factor.letter, factor.rank, offset, size, root_offset)
            local.append((block, simple))
            offset += size
            root_offset += factor.rank
        if spec.central_rank:
            block = Block("T", spec.central_rank, offset, spec.central_rank, root_offset)
            local.append((block, []))
            offset += spec.central_rank

        self.ambient_dim = offset
        self.rank = spec.rank
        self.simple_roots: List[Vector] = []
        t_columns: List[Vector] = []
        for block, simple in local:
            self.blocks.append(block)
            for root in simple:
                self.simple_roots.append(self._lift(block, root))
            if block.letter in ("A", "G") or (block.letter == "E" and block.rank < 8):
                t_columns.extend(self._lift(block, root) for root in simple)
            else:
                for i in block.coordinates():
                    t_columns.append(
                        tuple(Fraction(1 if j == i else 0) for j in range(self.ambient_dim))
                    )

        self.t_basis = QMatrix.from_columns(t_columns, self.ambient_dim)
        self.complement: List[Vector] = kernel_basis(self.t_basis.transpose())
        self.central_coordinates: List[int] = [
            i for block in self.blocks if block.central for i in block.coordinates()
        ]

        self.roots: List[Vector] = []
        self.coefficients: List[Tuple[int, ...]] = []
        self._root_index: Dict[Vector, int] = {}
        self._build_roots()
        self._reflections: Dict[int, QMatrix] = {}

        logger.debug(
            "Built root system %s: %d roots in %d coordinates",
            spec.canonical(),
            len(self.roots),
            self.ambient_dim,
        )

    def _lift(self, block: Block, local: Vector) -> Vector:
        values = [Fraction(0)] * self.ambient_dim
        for i, value in enumerate(local):
            values[block.offset + i] = value
        return tuple(values)

    def _build_roots(self) -> None:
        n = len(self.simple_roots)
        norms = [dot(a, a) for a in self.simple_roots]
        found: Dict[Vector, Tuple[int, ...]] = {}
        queue: List[Vector] = []
        for i, root in enumerate(self.simple_roots):
            found[root] = tuple(1 if j == i else 0 for j in range(n))
            queue.append(root)
        while queue:
            beta = queue.pop()
            coeffs = found[beta]
            for j, alpha in enumerate(self.simple_roots):
                pairing = 2 * dot(beta, alpha) / norms[j]
                if pairing.denominator != 1:
                    raise RootSystemError(f"Non-integral Cartan integer in {self.spec}")
                if not pairing:
                    continue
                image = tuple(b - pairing * a for b, a in zip(beta, alpha))
                if image not in found:
                    shifted = list(coeffs)
                    shifted[j] -= int(pairing)
                    found[image] = tuple(shifted)
                    queue.append(image)

        for root, coeffs in found.items():
            signs = {c > 0 for c in coeffs if c}
            if len(signs) != 1:
                raise RootSystemError(f"Root {root} has mixed-sign coefficients {coeffs}")

        positive = sorted(
            (r for r, c in found.items() if sum(c) > 0), key=lambda r: (sum(found[r]), found[r])
        )
        negative = [tuple(-x for x in r) for r in positive]
        for root in positive + negative:
            self._root_index[root] = len(self.roots)
            self.roots.append(root)
            self.coefficients.append(found[root])

        expected = sum(
            f.rank * coxeter_number(f.letter, f.rank) for f in self.spec.factors
        )
        if len(self.roots) != expected:
            raise RootSystemError(
                f"Root closure for {self.spec} produced {len(self.roots)} roots, "
                f"expected {expected}"
            )

    @property
    def heavy(self) -> bool:
        """True when an E-type factor is present."""
        return any(block.letter == "E" for block in self.blocks)

    @property
    def is_semisimple(self) -> bool:
        return self.spec.central_rank == 0

    @property
    def degrees(self) -> List[int]:
        return weyl_degrees(self.spec)

    def weyl_order(self) -> int:
        return prod(self.degrees)

    def positive_indices(self) -> range:
        return range(len(self.roots) // 2)

    def positive_roots(self) -> List[Vector]:
        return self.roots[: len(self.roots) // 2]

    def root_index(self, values: Sequence[Fraction]) -> Optional[int]:
        return self._root_index.get(tuple(values))

    def is_root(self, values: Sequence[Fraction]) -> bool:
        return tuple(values) in self._root_index

    def coroot(self, beta: Sequence[Fraction]) -> Vector:
        if not self.is_root(beta):
            raise RootSystemError(f"{tuple(str(x) for x in beta)} is not a root of {self.spec}")
        norm = dot(beta, beta)
        return tuple(2 * x / norm for x in beta)

    def reflect(self, x: Sequence[Fraction], gamma: Sequence[Fraction]) -> Vector:
        factor = 2 * dot(x, gamma) / dot(gamma, gamma)
        return tuple(a - factor * g for a, g in zip(x, gamma))

    def reflection_matrix(self, index: int) -> QMatrix:
        """Matrix of the simple reflection s_index on ambient coordinates."""
        if index not in self._reflections:
            gamma = self.simple_roots[index]
            norm = dot(gamma, gamma)
            n = self.ambient_dim
            self._reflections[index] = QMatrix(
                n,
                n,
                [
                    (1 if i == j else 0) - 2 * gamma[i] * gamma[j] / norm
                    for i in range(n)
                    for j in range(n)
                ],
            )
        return self._reflections[index]

    @property
    def compact_dim(self) -> int:
        """Coordinate count when every G2 block is written with two coordinates."""
        return self.ambient_dim - sum(1 for block in self.blocks if block.letter == "G")

    def from_compact(self, values: Sequence[Fraction]) -> Optional[Vector]:
        """Expand user coordinates to ambient ones, or None if the length fits neither.

        A G2 block lives in the sum-zero plane of three coordinates; given as
        (x, y) it means (x, y, -x-y), so its simple roots read (1, -1) and
        (-2, 1) with Gram matrix [[2, 1], [1, 2]].
        """
        if len(values) == self.ambient_dim:
            return tuple(values)
        if len(values) != self.compact_dim or self.compact_dim == self.ambient_dim:
            return None
        expanded: List[Fraction] = []
        position = 0
        for block in self.blocks:
            if block.letter == "G":
                x, y = values[position], values[position + 1]
                expanded.extend([x, y, -x - y])
                position += 2
            else:
                expanded.extend(values[position : position + block.size])
                position += block.size
        return tuple(expanded)

    def in_t(self, values: Sequence[Fraction]) -> bool:
        return all(dot(c, values) == 0 for c in self.complement)

    def is_dominant(self, values: Sequence[Fraction]) -> bool:
        return all(dot(alpha, values) >= 0 for alpha in self.simple_roots)

    def support_within(self, root_index: int, subset: Sequence[int]) -> bool:
        allowed = set(subset)
        return all(i in allowed for i, c in enumerate(self.coefficients[root_index]) if c)

    def subsystem_roots(self, subset: Sequence[int]) -> List[int]:
        """Indices of roots that are integer combinations of ``subset``."""
        return [i for i in range(len(self.roots)) if self.support_within(i, subset)]

    def rho(self, subset: Optional[Sequence[int]] = None) -> Vector:
        """Half the sum of the positive roots supported on ``subset``."""
        chosen = range(len(self.simple_roots)) if subset is None else subset
        total = [Fraction(0)] * self.ambient_dim
        for i in self.positive_indices():
            if self.support_within(i, chosen):
                for j, x in enumerate(self.roots[i]):
                    total[j] += x / 2
        return tuple(total)

    def __repr__(self) -> str:
        return f"RootSystem({self.spec.canonical()})"


def build_root_system(spec: GroupSpec) -> RootSystem:
    return RootSystem(spec)


def cartan_matrix(simple: Sequence[Vector]) -> List[List[int]]:
    return [
        [int(2 * dot(a, b) / dot(b, b)) for b in simple] for a in simple
    ]


def _component_type(vectors: List[Vector]) -> str:
    r = len(vectors)
    if r == 1:
        return "A1"
    norms = [dot(v, v) for v in vectors]
    shortest = min(norms)
    longest = max(norms)
    if longest != shortest:
        ratio = longest / shortest
        if ratio == 3:
            return "G2"
        if ratio != 2:
            raise RootSystemError(f"Unexpected root length ratio {ratio}")
        if r == 2:
            return "B2"
        short = sum(1 for n in norms if n == shortest)
        if short == 1:
            return f"B{r}"
        if short == r - 1:
            return f"C{r}"
        return "F4"

    neighbours = [
        [j for j in range(r) if j != i and dot(vectors[i], vectors[j]) != 0] for i in range(r)
    ]
    branch = [i for i in range(r) if len(neighbours[i]) > 2]
    if not branch:
        return f"A{r}"
    centre = branch[0]
    arms = []
    for start in neighbours[centre]:
        length = 1
        previous, current = centre, start
        while True:
            onward = [j for j in neighbours[current] if j != previous]
            if not onward:
                break
            previous, current = current, onward[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D{r}"
    if arms[:2] == [1, 2] and arms[2] in (2, 3, 4):
        return f"E{r}"
    raise RootSystemError(f"Unrecognised Dynkin diagram with arms {arms}")


_TYPE_ORDER = "ABCDEFG"


def cartan_type(simple: Sequence[Vector], torus_dim: int = 0) -> str:
    """Name a root subsystem by its simple roots, e.g. ``A1+A2`` or ``A1+T1``."""
    remaining = list(range(len(simple)))
    components: List[str] = []
    while remaining:
        stack = [remaining.pop(0)]
        component = []
        while stack:
            i = stack.pop()
            component.append(i)
            linked = [j for j in remaining if dot(simple[i], simple[j]) != 0]
            for j in linked:
                remaining.remove(j)
            stack.extend(linked)
        components.append(_component_type([simple[i] for i in sorted(component)]))
    components.sort(key=lambda name: (_TYPE_ORDER.index(name[0]), int(name[1:])))
    if torus_dim:
        components.append(f"T{torus_dim}")
    return "+".join(components) if components else "T0"
