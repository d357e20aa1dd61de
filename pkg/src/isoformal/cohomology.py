"""Even cohomology of G/H_S as a graded quotient of invariant rings.

H^even(G/H_S) = Q[s]^{W_H} / (f_1|s, ..., f_r|s), with polynomial degree k
placed in cohomological degree 2k. The invariant ring is written as a
weighted polynomial ring in its generators and the quotient is computed
one degree at a time by sparse rank over QQ.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .config import EngineConfig
from .errors import CohomologyError, ConsistencyError, DegreeCapError
from .invariants import InvariantRing, InvariantSet, basic_invariants
from .linalg import (
    Exponent,
    MultiPoly,
    QMatrix,
    monomial_basis,
    sparse_rank,
    substitute_linear,
    weighted_monomial_basis,
)
from .pairs import CorankOnePair
from .roots import RootSystem
from .weyl import RestrictedGroup, restrict_faithful

logger = logging.getLogger("isoformal.cohomology")


@dataclass
class GradedQuotient:
    """Dimensions by cohomological degree; ``total`` is None when infinite."""

    dims: Dict[int, int]
    total: Optional[int]
    cap: int
    method: str = "polynomial"

    @property
    def finite(self) -> bool:
        return self.total is not None

    @property
    def top_degree(self) -> int:
        return max(self.dims) if self.dims else 0

    def to_dict(self) -> Dict[str, object]:
        return {
            "dims": {str(k): v for k, v in sorted(self.dims.items())},
            "total": self.total,
            "cap": self.cap,
            "method": self.method,
        }


@dataclass
class CohomologyResult:
    d: int
    quotient: GradedQuotient
    m: int
    n: int


def default_degree_cap(rs: RootSystem) -> int:
    return max(1, sum(d - 1 for d in rs.degrees))


def _shift(exponent: Exponent, other: Exponent) -> Exponent:
    return tuple(a + b for a, b in zip(exponent, other))


def weighted_quotient(
    ideal: Sequence[MultiPoly],
    weights: Sequence[int],
    cap: int,
    window: int,
    extra: Sequence[MultiPoly] = (),
) -> GradedQuotient:
    """Hilbert function of Q[y]/(ideal) for y_j of weight weights[j].

    Stops once ``window`` consecutive degrees vanish; with window at least
    the largest weight every higher degree then vanishes too. ``extra``
    polynomials join the ideal (used for the cokernel of multiplication).
    """
    generators: List[Tuple[MultiPoly, int]] = [
        (g, g.weighted_degree(weights)) for g in list(ideal) + list(extra) if not g.is_zero()
    ]
    dims: Dict[int, int] = {}
    zero_run = 0
    k = 0
    while True:
        basis = weighted_monomial_basis(weights, k)
        if basis:
            index = {e: i for i, e in enumerate(basis)}
            rows = []
            for poly, degree in generators:
                if degree > k:
                    continue
                for shift in weighted_monomial_basis(weights, k - degree):
                    rows.append({index[_shift(e, shift)]: c for e, c in poly.terms.items()})
            dim = len(basis) - sparse_rank(rows, len(basis))
        else:
            dim = 0

        if dim:
            dims[2 * k] = dim
            zero_run = 0
        else:
            zero_run += 1
        if zero_run >= window:
            return GradedQuotient(dims, sum(dims.values()), cap)
        if k >= cap + window:
            return GradedQuotient(dims, None, cap)
        k += 1


def _slice_quotient(
    ring: InvariantRing, restricted: Sequence[MultiPoly], cap: int, window: int
) -> GradedQuotient:
    """Quotient dimensions when the invariant ring is not polynomial."""
    nonzero = [(f, f.homogeneous_degree()) for f in restricted if not f.is_zero()]
    dims: Dict[int, int] = {}
    zero_run = 0
    k = 0
    while True:
        invariants_k = ring.invariant_basis(k)
        basis = monomial_basis(ring.nvars, k)
        rows = []
        for f, degree in nonzero:
            if degree > k:
                continue
            for b in ring.invariant_basis(k - degree):
                rows.append(dict(enumerate((f * b).coefficient_vector(basis))))
        dim = len(invariants_k) - sparse_rank(rows, len(basis))
        if dim:
            dims[2 * k] = dim
            zero_run = 0
        else:
            zero_run += 1
        if zero_run >= window:
            return GradedQuotient(dims, sum(dims.values()), cap, method="slice")
        if k >= cap + window:
            return GradedQuotient(dims, None, cap, method="slice")
        k += 1


def heven_quotient(
    pair: CorankOnePair,
    w_h: RestrictedGroup,
    degree_cap: Optional[int] = None,
    invariants: Optional[InvariantSet] = None,
    seed: int = 0,
) -> GradedQuotient:
    """Q[s]^{W_H} / (restricted basic invariants), graded by 2 * degree."""
    s_dim = pair.s_basis.cols
    if w_h.dimension != s_dim:
        raise CohomologyError(f"W_H acts on a {w_h.dimension}-dim space but s has dimension {s_dim}")

    inv = invariants or basic_invariants(pair.rs, seed)
    restricted = inv.restricted(pair.s_basis)
    for g in w_h.generators or w_h.elements:
        for f in restricted:
            if substitute_linear(f, g) != f:
                raise CohomologyError("W_H does not preserve the restricted basic invariants")

    cap = degree_cap or default_degree_cap(pair.rs)
    ring = InvariantRing(w_h.elements, s_dim, seed)
    if ring.is_polynomial:
        ideal = [ring.express(f) for f in restricted if not f.is_zero()]
        window = max(ring.degrees, default=1)
        result = weighted_quotient(ideal, ring.degrees, cap, window)
    else:
        logger.debug("W_H of order %d is not a reflection group; using slices", ring.order)
        result = _slice_quotient(ring, restricted, cap, ring.order)
    logger.debug("H^even dims %s (total %s)", result.dims, result.total)
    return result


def stabilizer_on_s(pair: CorankOnePair, cap: int) -> RestrictedGroup:
    restricted = restrict_faithful(pair.stabilizer(cap), pair.s_basis)
    if restricted.kernel_size != 1:
        raise ConsistencyError("W_v does not act faithfully on s")
    return restricted


def cohomology_dim_d(pair: CorankOnePair, config: Optional[EngineConfig] = None) -> CohomologyResult:
    """d = dim H(G/H_S) = 2 * dim H^even, with the sphere degrees (m, n)."""
    config = config or EngineConfig()
    quotient = heven_quotient(
        pair, stabilizer_on_s(pair, config.weyl_cap), config.degree_cap, seed=config.seed
    )
    if quotient.total is None:
        raise DegreeCapError(quotient.cap, f"H^even(G/H_S) for {pair.subgroup.text}")
    m = quotient.top_degree
    return CohomologyResult(2 * quotient.total, quotient, m, pair.dim_ghs - m)


def dimension_oracle(pair: CorankOnePair, config: Optional[EngineConfig] = None) -> GradedQuotient:
    """H^even(G/S) from the trivial group; 2 * total is d_S."""
    config = config or EngineConfig()
    trivial = RestrictedGroup(pair.s_basis, [QMatrix.identity(pair.s_basis.cols)])
    return heven_quotient(pair, trivial, config.degree_cap, seed=config.seed)


@dataclass
class CoinvariantAlgebra:
    """A = Q[t]^{W_v} / (f_i|t) and multiplication by alpha on it."""

    ring: InvariantRing
    ideal: List[MultiPoly]
    alpha: MultiPoly
    dims: Dict[int, int]
    cokernel: Dict[int, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.dims.values())

    @property
    def cokernel_total(self) -> int:
        return sum(self.cokernel.values())


def coinvariant_algebra(pair: CorankOnePair, config: Optional[EngineConfig] = None) -> CoinvariantAlgebra:
    config = config or EngineConfig()
    rs = pair.rs
    t = rs.t_basis
    on_t = restrict_faithful(pair.stabilizer(config.weyl_cap), t)
    ring = InvariantRing(on_t.elements, t.cols, config.seed)
    if not ring.is_polynomial:
        raise ConsistencyError("W_v restricted to t is not a reflection group")

    inv = basic_invariants(rs, config.seed)
    ideal = [ring.express(f) for f in inv.restricted(t) if not f.is_zero()]
    cap = config.degree_cap or default_degree_cap(rs)
    window = max(ring.degrees, default=1)
    quotient = weighted_quotient(ideal, ring.degrees, cap, window)
    if quotient.total is None:
        raise DegreeCapError(cap, "coinvariant algebra")
    expected = rs.weyl_order() // pair.wv_order
    if quotient.total != expected:
        raise ConsistencyError(
            f"Coinvariant algebra has dimension {quotient.total}, expected |W|/|W_v| = {expected}"
        )

    covector = tuple(-x for x in t.transpose().apply(pair.v))
    alpha = ring.express(MultiPoly.linear_form(covector))
    cokernel = weighted_quotient(ideal, ring.degrees, cap, window, extra=[alpha])
    dims = {k // 2: v for k, v in quotient.dims.items()}
    coker = {k // 2: v for k, v in cokernel.dims.items()}
    return CoinvariantAlgebra(ring, ideal, alpha, dims, coker)


def coinvariant_cross_check(pair: CorankOnePair, config: Optional[EngineConfig] = None) -> int:
    """d computed as twice the cokernel of multiplication by alpha on A."""
    return 2 * coinvariant_algebra(pair, config).cokernel_total


@dataclass
class HilbertCheck:
    dims: Dict[int, int]
    expected: Dict[int, int]

    @property
    def ok(self) -> bool:
        return self.dims == self.expected


def _series_product_formula(numerator_degrees: Sequence[int], denominator_degrees: Sequence[int]) -> Dict[int, int]:
    top = sum(numerator_degrees)
    coeffs = [0] * (top + 1)
    coeffs[0] = 1
    for d in numerator_degrees:
        for k in range(top, d - 1, -1):
            coeffs[k] -= coeffs[k - d]
    for e in denominator_degrees:
        for k in range(e, top + 1):
            coeffs[k] += coeffs[k - e]
    return {k: c for k, c in enumerate(coeffs) if c}


def hilbert_series_check(pair: CorankOnePair, config: Optional[EngineConfig] = None) -> HilbertCheck:
    """Compare A's Hilbert function with prod(1 - t^d_i) / prod(1 - t^e_j)."""
    algebra = coinvariant_algebra(pair, config)
    expected = _series_product_formula(pair.rs.degrees, algebra.ring.degrees)
    return HilbertCheck(dict(algebra.dims), expected)
