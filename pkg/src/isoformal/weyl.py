"""Weyl groups, longest elements and the component group N."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ConsistencyError, GroupTooLargeError, PairError, RootSystemError
from .linalg import QMatrix, Vector, dot, is_zero_vector
from .roots import RootSystem, cartan_type, weyl_order_of_type

logger = logging.getLogger("isoformal.weyl")


class WeylGroup:
    """A finite group of ambient matrices given by generators.

    ``elements`` is filled in only after enumeration; ``order`` is known
    beforehand whenever the group is a Weyl group of a known type.
    """

    def __init__(
        self,
        dimension: int,
        generators: Sequence[QMatrix],
        elements: Optional[Sequence[QMatrix]] = None,
        order: Optional[int] = None,
        label: str = "W",
    ) -> None:
        self.dimension = dimension
        self.generators = list(generators)
        self.elements: Optional[List[QMatrix]] = list(elements) if elements is not None else None
        self._order = order
        self.label = label

    @property
    def order(self) -> int:
        if self.elements is not None:
            return len(self.elements)
        if self._order is None:
            raise ValueError(f"Order of {self.label} is unknown before enumeration")
        return self._order

    def enumerated(self, cap: int) -> "WeylGroup":
        if self.elements is not None:
            return self
        return enumerate_group(
            self.generators, self.dimension, cap, expected_order=self._order, label=self.label
        )

    def contains(self, matrix: QMatrix) -> bool:
        if self.elements is None:
            raise ValueError(f"{self.label} must be enumerated before membership tests")
        return matrix in set(self.elements)


def enumerate_group(
    generators: Sequence[QMatrix],
    dimension: int,
    cap: int,
    expected_order: Optional[int] = None,
    label: str = "W",
) -> WeylGroup:
    """Breadth-first closure of ``generators`` under multiplication."""
    if expected_order is not None and expected_order > cap:
        raise GroupTooLargeError(label, expected_order, cap)

    identity = QMatrix.identity(dimension)
    seen = {identity}
    ordered = [identity]
    frontier = [identity]
    while frontier:
        next_frontier = []
        for element in frontier:
            for generator in generators:
                product = generator @ element
                if product not in seen:
                    seen.add(product)
                    ordered.append(product)
                    next_frontier.append(product)
                    if len(ordered) > cap:
                        raise GroupTooLargeError(label, len(ordered), cap)
        frontier = next_frontier

    if expected_order is not None and len(ordered) != expected_order:
        raise ConsistencyError(
            f"{label} enumerated to {len(ordered)} elements, expected {expected_order}"
        )
    logger.debug("Enumerated %s with %d elements", label, len(ordered))
    return WeylGroup(dimension, generators, ordered, label=label)


def weyl_group(rs: RootSystem, subset: Optional[Sequence[int]] = None, label: str = "W") -> WeylGroup:
    """The (parabolic) Weyl group generated by simple reflections in ``subset``."""
    chosen = list(range(len(rs.simple_roots))) if subset is None else list(subset)
    order = parabolic_order(rs, chosen)
    return WeylGroup(
        rs.ambient_dim, [rs.reflection_matrix(i) for i in chosen], order=order, label=label
    )


def parabolic_order(rs: RootSystem, subset: Sequence[int]) -> int:
    """|W_subset| from the Cartan type of the subset."""
    if not subset:
        return 1
    name = cartan_type([rs.simple_roots[i] for i in subset])
    order = 1
    for component in name.split("+"):
        order *= weyl_order_of_type(component[0], int(component[1:]))
    return order


def longest_word(
    rs: RootSystem, subset: Optional[Sequence[int]] = None
) -> Tuple[QMatrix, List[int]]:
    """Longest element of the parabolic subgroup on ``subset`` and a reduced word.

    The word lists simple reflections in the order they are applied.
    """
    chosen = list(range(len(rs.simple_roots))) if subset is None else list(subset)
    rho = rs.rho(chosen)
    x = tuple(-c for c in rho)
    matrix = QMatrix.identity(rs.ambient_dim)
    word: List[int] = []
    while True:
        descent = next((i for i in chosen if dot(rs.simple_roots[i], x) < 0), None)
        if descent is None:
            break
        reflection = rs.reflection_matrix(descent)
        x = reflection.apply(x)
        matrix = reflection @ matrix
        word.append(descent)

    simple_images = {tuple(-c for c in rs.simple_roots[i]) for i in chosen}
    for i in chosen:
        if matrix.apply(rs.simple_roots[i]) not in simple_images:
            raise ConsistencyError("Longest element does not send the simple roots to negatives")
    if not (matrix @ matrix).is_identity():
        raise ConsistencyError("Longest element is not an involution")
    return matrix, word


@dataclass
class StabilizerData:
    delta_v: List[int]
    group: WeylGroup


def stabilizer_data(rs: RootSystem, v: Sequence) -> StabilizerData:
    """Simple roots vanishing on a dominant v, and the parabolic W_v they generate."""
    if is_zero_vector(v):
        raise RootSystemError("The zero vector has no proper stabilizer")
    if not rs.is_dominant(v):
        raise RootSystemError(f"Vector {tuple(str(x) for x in v)} is not dominant")
    delta_v = [i for i, alpha in enumerate(rs.simple_roots) if dot(alpha, v) == 0]
    return StabilizerData(delta_v, weyl_group(rs, delta_v, label="W_v"))


@dataclass
class RestrictedGroup:
    """A finite group acting on s, in coordinates of ``basis``'s columns."""

    basis: QMatrix
    elements: List[QMatrix]
    kernel_size: int = 1
    source_order: int = 1
    generators: List[QMatrix] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.basis.cols

    @property
    def order(self) -> int:
        return len(self.elements)

    def contains(self, matrix: QMatrix) -> bool:
        return matrix in set(self.elements)

    @classmethod
    def from_generators(
        cls, basis: QMatrix, generators: Sequence[QMatrix], cap: int
    ) -> "RestrictedGroup":
        for g in generators:
            if g.shape != (basis.cols, basis.cols):
                raise ValueError(
                    f"Generator of shape {g.shape} does not act on a {basis.cols}-dim space"
                )
        group = enumerate_group(generators, basis.cols, cap, label="W_H")
        assert group.elements is not None
        return cls(basis, group.elements, 1, len(group.elements), list(generators))


def _left_inverse(basis: QMatrix) -> QMatrix:
    transpose = basis.transpose()
    return (transpose @ basis).inverse() @ transpose


def restrict_matrix(matrix: QMatrix, basis: QMatrix, left_inverse: Optional[QMatrix] = None) -> QMatrix:
    """Matrix X with matrix @ basis == basis @ X, or PairError."""
    inverse = left_inverse if left_inverse is not None else _left_inverse(basis)
    image = matrix @ basis
    restricted = inverse @ image
    if basis @ restricted != image:
        raise PairError("Element does not preserve the subspace s")
    return restricted


def restrict_faithful(group: WeylGroup, basis: QMatrix) -> RestrictedGroup:
    """Restrict an enumerated group to span(basis), recording the kernel."""
    if group.elements is None:
        raise ValueError("Group must be enumerated before restriction")
    if basis.cols == 0:
        return RestrictedGroup(basis, [QMatrix.identity(0)], group.order, group.order, [])
    inverse = _left_inverse(basis)
    seen: Dict[QMatrix, None] = {}
    for element in group.elements:
        seen.setdefault(restrict_matrix(element, basis, inverse), None)
    images = list(seen)
    if group.order % len(images):
        raise ConsistencyError("Restriction image size does not divide the group order")
    generators = [restrict_matrix(g, basis, inverse) for g in group.generators]
    return RestrictedGroup(basis, images, group.order // len(images), group.order, generators)


@dataclass
class ComponentGroupData:
    """N = component group of the normalizer of S, acting on s."""

    n_order: int
    wv_order: int
    w0_negates_v: bool
    w0s_in_wvs: bool
    restricted_wv: Optional[RestrictedGroup] = None
    restricted_n: Optional[RestrictedGroup] = None
    method: str = "enumeration"

    @property
    def strict(self) -> bool:
        return self.n_order > self.wv_order

    def to_dict(self) -> Dict[str, object]:
        return {
            "n_order": self.n_order,
            "wv_order": self.wv_order,
            "w0_negates_v": self.w0_negates_v,
            "w0s_in_wvs": self.w0s_in_wvs,
            "method": self.method,
        }


def _w0_membership_by_roots(rs: RootSystem, v: Vector, negates: bool) -> bool:
    # The restriction kernel of <W_v, w0> is {1, s_v}, present only when v is a root direction.
    if not negates:
        return False
    for beta in rs.positive_roots():
        if _parallel(beta, v):
            return True
    return False


def _parallel(a: Sequence, b: Sequence) -> bool:
    ab = dot(a, b)
    return ab * ab == dot(a, a) * dot(b, b) and ab != 0


def component_group_N(
    rs: RootSystem,
    v: Vector,
    basis: QMatrix,
    cap: int,
    stabilizer: Optional[WeylGroup] = None,
) -> ComponentGroupData:
    """Compute N and decide whether w0 restricted to s already lies in W_v|_s.

    Heavy (E-type) systems use the root criterion only; everything else
    enumerates and cross-checks the criterion.
    """
    data = stabilizer_data(rs, v)
    w0, _ = longest_word(rs)
    w0v = w0.apply(v)
    negates = w0v == tuple(-x for x in v)
    fixes = w0v == tuple(v)
    criterion = _w0_membership_by_roots(rs, v, negates)

    if rs.heavy:
        wv_order = data.group.order
        n_order = wv_order * (2 if negates and not criterion else 1)
        return ComponentGroupData(n_order, wv_order, negates, fixes or criterion, method="roots")

    wv = stabilizer if stabilizer is not None else data.group.enumerated(cap)
    restricted_wv = restrict_faithful(wv, basis)
    if restricted_wv.kernel_size != 1:
        raise ConsistencyError(
            f"W_v does not act faithfully on s (kernel of size {restricted_wv.kernel_size})"
        )

    if fixes:
        member = True
        restricted_n = restricted_wv
    elif not negates:
        member = False
        restricted_n = restricted_wv
    else:
        w0_on_s = restrict_matrix(w0, basis)
        member = restricted_wv.contains(w0_on_s)
        assert wv.elements is not None
        extended = WeylGroup(
            rs.ambient_dim, wv.generators + [w0], list(wv.elements) + [w0 @ g for g in wv.elements]
        )
        restricted_n = restrict_faithful(extended, basis)
        if member != criterion:
            raise ConsistencyError(
                "w0 membership by search disagrees with the root criterion"
            )

    n_order = restricted_n.order
    logger.debug(
        "N for v=%s: |W_v|=%d |N|=%d negates=%s member=%s",
        [str(x) for x in v],
        restricted_wv.order,
        n_order,
        negates,
        member,
    )
    return ComponentGroupData(
        n_order=n_order,
        wv_order=restricted_wv.order,
        w0_negates_v=negates,
        w0s_in_wvs=member,
        restricted_wv=restricted_wv,
        restricted_n=restricted_n,
    )


def parabolic_w0_negates_s(rs: RootSystem, delta_v: Sequence[int], basis: QMatrix) -> bool:
    """Whether the longest element of W_v acts on s as -id."""
    w0v, _ = longest_word(rs, delta_v)
    restricted = restrict_matrix(w0v, basis)
    return restricted == -QMatrix.identity(basis.cols)
