"""Corank-one subtori and the regular subgroup H_S they determine.

A subgroup spec fixes a codimension-one subspace s of the Cartan
subalgebra t. Its normal v is moved into the dominant chamber (choosing
between v and -v by lexicographic order) and everything else is read off
from the simple roots vanishing on v.
"""

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .errors import ConsistencyError, PairError
from .grammar import SpecScanner
from .linalg import (
    QMatrix,
    Vector,
    dot,
    is_zero_vector,
    kernel_basis,
    primitive_vector,
    rank,
    vector,
)
from .roots import Block, RootSystem, build_root_system, cartan_type, parse_group_spec
from .weyl import WeylGroup, stabilizer_data

logger = logging.getLogger("isoformal.pairs")

RootRef = Union[int, Vector]

_TORUS = re.compile(r"(A2|B2|C2|G2)std(?:\s*#\s*(\d+))?")
_SIMPLE_REF = re.compile(r"a(\d+)")

_TORUS_TYPES = {"A2": ("A", 2), "B2": ("B", 2), "C2": ("C", 2), "G2": ("G", 2)}


@dataclass(frozen=True)
class SubgroupSpec:
    """Parsed subgroup spec; which fields are set depends on ``kind``."""

    kind: str
    text: str
    values: Vector = ()
    circle: Optional[Tuple[int, int]] = None
    torus: Optional[str] = None
    occurrence: int = 1
    roots: Tuple[RootRef, ...] = ()
    centers: Tuple[Vector, ...] = ()


def _parse_root_refs(scanner: SpecScanner) -> List[RootRef]:
    refs: List[RootRef] = []
    while True:
        scanner.skip_space()
        start = scanner.pos
        simple = scanner.match(_SIMPLE_REF)
        if simple:
            index = int(simple.group(1))
            if index < 1:
                raise scanner.error("simple roots are numbered from a1", start)
            refs.append(index - 1)
        elif scanner.accept("("):
            refs.append(tuple(scanner.rational_list()))
            scanner.expect(")")
        else:
            raise scanner.error("expected a root reference such as a2 or (1,-1,0)")
        if not scanner.accept(","):
            return refs


def parse_subgroup_spec(text: str) -> SubgroupSpec:
    """Parse ``v=...``, ``alpha=...``, ``circle(p,q)@A2std`` or ``sub(...)``."""
    scanner = SpecScanner(text)
    if scanner.at_end():
        raise scanner.error("empty subgroup spec")
    start = scanner.pos

    if scanner.accept("v="):
        values = tuple(scanner.rational_list())
        scanner.finish()
        return SubgroupSpec("v", text, values=values)

    if scanner.accept("alpha="):
        values = tuple(scanner.rational_list())
        scanner.finish()
        return SubgroupSpec("alpha", text, values=values)

    if scanner.accept("circle("):
        p = scanner.integer()
        scanner.expect(",")
        q = scanner.integer()
        scanner.expect(")")
        scanner.expect("@")
        torus = scanner.match(_TORUS)
        if not torus:
            raise scanner.error("expected a torus name: A2std, B2std, C2std or G2std")
        occurrence = int(torus.group(2)) if torus.group(2) else 1
        scanner.finish()
        if p == 0 and q == 0:
            raise scanner.error("circle(0,0) does not define a circle", start)
        if gcd(p, q) != 1:
            raise scanner.error(f"circle({p},{q}) needs coprime parameters", start)
        if occurrence < 1:
            raise scanner.error("torus occurrences are numbered from 1", start)
        return SubgroupSpec(
            "circle", text, circle=(p, q), torus=torus.group(1), occurrence=occurrence
        )

    if scanner.accept("sub("):
        roots: List[RootRef] = []
        centers: List[Vector] = []
        while True:
            if scanner.accept("roots="):
                roots.extend(_parse_root_refs(scanner))
            elif scanner.accept("center="):
                centers.append(tuple(scanner.rational_list()))
            else:
                raise scanner.error("expected roots= or center=")
            if not scanner.accept(";"):
                break
        scanner.expect(")")
        scanner.finish()
        return SubgroupSpec("sub", text, roots=tuple(roots), centers=tuple(centers))

    raise scanner.error("expected v=, alpha=, circle(...) or sub(...)")


def dominant_representative(rs: RootSystem, x: Sequence[Fraction]) -> Tuple[Vector, QMatrix]:
    """Move x into the closed dominant chamber; returns (image, w)."""
    current = tuple(x)
    w = QMatrix.identity(rs.ambient_dim)
    while True:
        descent = next(
            (i for i, alpha in enumerate(rs.simple_roots) if dot(alpha, current) < 0), None
        )
        if descent is None:
            return current, w
        reflection = rs.reflection_matrix(descent)
        current = reflection.apply(current)
        w = reflection @ w


def canonical_normal(rs: RootSystem, v: Sequence[Fraction]) -> Tuple[Vector, QMatrix]:
    """Primitive dominant representative of the line through v.

    Both v and -v are moved to the dominant chamber and the
    lexicographically larger primitive vector wins.
    """
    base = primitive_vector(v)
    plus, w_plus = dominant_representative(rs, base)
    minus, w_minus = dominant_representative(rs, tuple(-x for x in base))
    plus = primitive_vector(plus)
    minus = primitive_vector(minus)
    if minus > plus:
        return minus, w_minus
    return plus, w_plus


def _project_to_t(rs: RootSystem, x: Vector) -> Vector:
    t = rs.t_basis
    transpose = t.transpose()
    coords = (transpose @ t).inverse().apply(transpose.apply(x))
    return t.apply(coords)


def _find_block(rs: RootSystem, torus: str, occurrence: int) -> Block:
    letter, block_rank = _TORUS_TYPES[torus]
    matches = [b for b in rs.blocks if b.letter == letter and b.rank == block_rank]
    if len(matches) < occurrence:
        raise PairError(
            f"{torus}std#{occurrence} needs {occurrence} factor(s) of type {letter}{block_rank} "
            f"in {rs.spec}"
        )
    return matches[occurrence - 1]


def _circle_direction(torus: str, p: int, q: int) -> Vector:
    if torus == "A2":
        return vector((p, q, -p - q))
    if torus in ("B2", "C2"):
        return vector((p, q))
    # p * h_gamma + q * h_alpha for gamma = 3a + 2b long and a short
    h_gamma = (Fraction(-1, 3), Fraction(-1, 3), Fraction(2, 3))
    h_alpha = (Fraction(1), Fraction(-1), Fraction(0))
    return tuple(p * g + q * a for g, a in zip(h_gamma, h_alpha))


def _lift(rs: RootSystem, block: Block, local: Sequence[Fraction]) -> Vector:
    values = [Fraction(0)] * rs.ambient_dim
    for i, x in enumerate(local):
        values[block.offset + i] = Fraction(x)
    return tuple(values)


def _normal_of_span(rs: RootSystem, spanning: Sequence[Vector], what: str) -> Vector:
    if spanning and rank(QMatrix.from_rows(spanning)) != rs.rank - 1:
        raise PairError(
            f"{what} spans a subspace of dimension "
            f"{rank(QMatrix.from_rows(spanning))}, expected {rs.rank - 1}"
        )
    if not spanning and rs.rank != 1:
        raise PairError(f"{what} is empty but {rs.spec} has rank {rs.rank}")
    rows = list(spanning) + list(rs.complement)
    normals = kernel_basis(QMatrix.from_rows(rows, rs.ambient_dim))
    if len(normals) != 1:
        raise ConsistencyError(f"Expected a single normal direction, found {len(normals)}")
    return normals[0]


def _root_closure(rs: RootSystem, generators: Sequence[Vector]) -> List[Vector]:
    found = {tuple(g) for g in generators} | {tuple(-x for x in g) for g in generators}
    queue = list(found)
    while queue:
        beta = queue.pop()
        for gamma in generators:
            image = rs.reflect(beta, gamma)
            if image not in found:
                found.add(image)
                queue.append(image)
    return sorted(found)


def _ambient(rs: RootSystem, values: Sequence[Fraction], what: str) -> Vector:
    expanded = rs.from_compact(values)
    if expanded is None:
        sizes = sorted({rs.ambient_dim, rs.compact_dim})
        wanted = " or ".join(str(size) for size in sizes)
        raise PairError(f"{what} needs {wanted} coordinates for {rs.spec}, got {len(values)}")
    return expanded


def _resolve_normal(rs: RootSystem, spec: SubgroupSpec) -> Tuple[Vector, Optional[int]]:
    """Unnormalized normal vector and the root count of the given subgroup."""
    if spec.kind in ("v", "alpha"):
        values = _ambient(rs, spec.values, f"{spec.kind}=")
        if is_zero_vector(values):
            raise PairError(f"{spec.kind}= must be nonzero")
        if spec.kind == "v":
            if not rs.in_t(values):
                raise PairError(f"v={list(map(str, spec.values))} does not lie in t")
            return values, 0
        projected = _project_to_t(rs, values)
        if is_zero_vector(projected):
            raise PairError("alpha= projects to zero on t")
        return tuple(-x for x in projected), 0

    if spec.kind == "circle":
        assert spec.torus is not None and spec.circle is not None
        block = _find_block(rs, spec.torus, spec.occurrence)
        p, q = spec.circle
        direction = _lift(rs, block, _circle_direction(spec.torus, p, q))
        spanning = [direction]
        for other in rs.blocks:
            if other is block:
                continue
            for column in rs.t_basis.columns():
                if any(column[i] for i in other.coordinates()):
                    spanning.append(column)
        return _normal_of_span(rs, spanning, spec.text), 0

    coroots: List[Vector] = []
    generators: List[Vector] = []
    for ref in spec.roots:
        if isinstance(ref, int):
            if ref >= len(rs.simple_roots):
                raise PairError(f"a{ref + 1} is out of range for {rs.spec}")
            root = rs.simple_roots[ref]
        else:
            root = _ambient(rs, ref, f"Root {list(map(str, ref))}")
        generators.append(root)
        coroots.append(rs.coroot(root))
    centers = [_ambient(rs, center, "center=") for center in spec.centers]
    for raw, center in zip(spec.centers, centers):
        if not rs.in_t(center):
            raise PairError(f"center={list(map(str, raw))} does not lie in t")
    spanning = coroots + centers
    normal = _normal_of_span(rs, spanning, spec.text)
    closure = _root_closure(rs, generators) if generators else []
    return normal, len(closure)


@dataclass
class CorankOnePair:
    """A pair (G, S) with S of corank one, normalized by the Weyl group."""

    rs: RootSystem
    group_text: str
    subgroup: SubgroupSpec
    v: Vector
    s_basis: QMatrix
    delta_v: List[int]
    phi_hs: List[int]
    w_v: WeylGroup
    z_hs_basis: List[Vector]
    pi1_rank: int
    dim_ghs: int
    hs_type: str
    h_root_count: Optional[int]
    normalizer: QMatrix
    _stabilizer: Optional[WeylGroup] = field(default=None, repr=False)

    @property
    def alpha(self) -> Vector:
        """Weight with connected kernel S, taken as -v so that alpha(v) < 0.

        ``alpha=`` input uses the same sign: its projection to t is negated to
        give v, so passing this value back reproduces the pair.
        """
        return tuple(-x for x in self.v)

    @property
    def wv_order(self) -> int:
        return self.w_v.order

    @property
    def hs_equals_h(self) -> Optional[bool]:
        if self.h_root_count is None:
            return None
        return self.h_root_count == len(self.phi_hs)

    def stabilizer(self, cap: int) -> WeylGroup:
        """W_v enumerated, cached after the first call."""
        if self._stabilizer is None:
            self._stabilizer = self.w_v.enumerated(cap)
        return self._stabilizer

    def to_dict(self) -> Dict[str, Any]:
        return {
            "group": self.group_text,
            "subgroup": self.subgroup.text,
            "v": [int(x) for x in self.v],
            "delta_v": [i + 1 for i in self.delta_v],
            "phi_hs_count": len(self.phi_hs),
            "hs_type": self.hs_type,
            "hs_equals_h": self.hs_equals_h,
            "pi1_rank": self.pi1_rank,
            "dim_ghs": self.dim_ghs,
            "wv_order": self.wv_order,
        }


def rational_pi1_rank(rs: RootSystem, z_hs: Sequence[Vector]) -> int:
    """Rank of pi_1(G/H_S): dim z(g) minus the rank of z(h_S) projected onto z(g)."""
    central = rs.central_coordinates
    if not central or not z_hs:
        return len(central)
    projected = QMatrix.from_rows([[z[i] for i in central] for z in z_hs])
    return len(central) - rank(projected)


def build_pair(rs: RootSystem, spec: SubgroupSpec, group_text: str = "") -> CorankOnePair:
    """Normalize the subtorus described by ``spec`` and derive H_S."""
    raw, h_root_count = _resolve_normal(rs, spec)
    v, normalizer = canonical_normal(rs, raw)

    s_columns = [
        primitive_vector(x)
        for x in kernel_basis(QMatrix.from_rows([v] + list(rs.complement), rs.ambient_dim))
    ]
    s_basis = QMatrix.from_columns(s_columns, rs.ambient_dim)

    stabilizer = stabilizer_data(rs, v)
    delta_v = stabilizer.delta_v
    phi_hs = [i for i, beta in enumerate(rs.roots) if dot(beta, v) == 0]
    if phi_hs != rs.subsystem_roots(delta_v):
        raise ConsistencyError("Roots vanishing on v are not spanned by the simple roots in Delta_v")

    z_rows = [v] + list(rs.complement) + [rs.simple_roots[i] for i in delta_v]
    z_hs = kernel_basis(QMatrix.from_rows(z_rows, rs.ambient_dim))
    pi1_rank = rational_pi1_rank(rs, z_hs)

    dim_ghs = len(rs.roots) - len(phi_hs) + 1
    hs_type = cartan_type([rs.simple_roots[i] for i in delta_v], len(z_hs))

    logger.debug(
        "Pair %s / %s: v=%s delta_v=%s H_S=%s pi1_rank=%d",
        group_text or rs.spec,
        spec.text,
        [str(x) for x in v],
        delta_v,
        hs_type,
        pi1_rank,
    )
    return CorankOnePair(
        rs=rs,
        group_text=group_text or rs.spec.canonical(),
        subgroup=spec,
        v=v,
        s_basis=s_basis,
        delta_v=delta_v,
        phi_hs=phi_hs,
        w_v=stabilizer.group,
        z_hs_basis=z_hs,
        pi1_rank=pi1_rank,
        dim_ghs=dim_ghs,
        hs_type=hs_type,
        h_root_count=h_root_count,
        normalizer=normalizer,
    )


def pair_from_strings(group: str, subgroup: str) -> CorankOnePair:
    rs = build_root_system(parse_group_spec(group))
    return build_pair(rs, parse_subgroup_spec(subgroup), group_text=group)
