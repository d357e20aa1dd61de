"""Basic Weyl invariants and invariant rings of finite matrix groups.

Basic invariants are kept in structured form (elementary symmetric
functions or power sums of linear forms) so that restricting them to a
subspace only means restricting a handful of linear forms.
"""

import logging
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Dict, List, Sequence, Tuple

from .errors import ConsistencyError, UnsupportedError
from .linalg import (
    Exponent,
    MultiPoly,
    QMatrix,
    Vector,
    charpoly,
    dot,
    linear_form_power,
    monomial_basis,
    rank,
    solve,
    substitute_linear,
    weighted_monomial_basis,
)
from .roots import Block, RootSystem, type_degrees
from .weyl import enumerate_group

logger = logging.getLogger("isoformal.invariants")


@dataclass(frozen=True)
class BasicInvariant:
    """One basic invariant, described by linear forms on ambient coordinates.

    kind is one of ``elementary`` (e_index of the forms), ``elementary-squares``
    (e_index of their squares), ``product``, ``power-sum`` (sum of
    index-th powers) and ``coordinate`` (a single form).
    """

    kind: str
    degree: int
    index: int
    forms: Tuple[Vector, ...]
    label: str = ""

    def restrict(self, embedding: QMatrix) -> MultiPoly:
        """Pull back along x = embedding @ y."""
        k = embedding.cols
        columns = embedding.columns()
        restricted = [tuple(dot(column, form) for column in columns) for form in self.forms]
        if self.kind == "power-sum":
            total = MultiPoly.zero(k)
            for form in restricted:
                total = total + linear_form_power(form, self.index)
            return total
        linear = [MultiPoly.linear_form(form) for form in restricted]
        if self.kind == "coordinate":
            return linear[0]
        if self.kind == "product":
            result = MultiPoly.constant(k, 1)
            for form in linear:
                result = result * form
            return result
        if self.kind == "elementary-squares":
            linear = [form * form for form in linear]
        elif self.kind != "elementary":
            raise ValueError(f"Unknown invariant kind {self.kind}")
        return _elementary(linear, self.index, k)

    def polynomial(self, nvars: int) -> MultiPoly:
        return self.restrict(QMatrix.identity(nvars))


def _elementary(forms: Sequence[MultiPoly], k: int, nvars: int) -> MultiPoly:
    levels = [MultiPoly.constant(nvars, 1)] + [MultiPoly.zero(nvars) for _ in range(k)]
    for form in forms:
        for j in range(k, 0, -1):
            levels[j] = levels[j] + form * levels[j - 1]
    return levels[k]


@dataclass
class InvariantSet:
    """Basic invariants of W(G) acting on the ambient coordinates."""

    generators: List[BasicInvariant]
    nvars: int

    @property
    def degrees(self) -> List[int]:
        return [g.degree for g in self.generators]

    def restricted(self, embedding: QMatrix) -> List[MultiPoly]:
        return [g.restrict(embedding) for g in self.generators]

    def polynomials(self) -> List[MultiPoly]:
        return [g.polynomial(self.nvars) for g in self.generators]


def _unit(n: int, i: int) -> Vector:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def _local(block: Block, x: Vector) -> Vector:
    return tuple(x[i] for i in block.coordinates())


def _lift(n: int, block: Block, local: Vector) -> Vector:
    values = [Fraction(0)] * n
    for i, value in zip(block.coordinates(), local):
        values[i] = value
    return tuple(values)


def _orbit(vector: Vector, simple: Sequence[Vector]) -> List[Vector]:
    seen = {vector}
    queue = [vector]
    while queue:
        x = queue.pop()
        for alpha in simple:
            factor = 2 * dot(x, alpha) / dot(alpha, alpha)
            if factor:
                image = tuple(a - factor * b for a, b in zip(x, alpha))
                if image not in seen:
                    seen.add(image)
                    queue.append(image)
    return sorted(seen)


def _power_sum(forms: Sequence[Vector], degree: int, nvars: int) -> MultiPoly:
    total = MultiPoly.zero(nvars)
    for form in forms:
        total = total + linear_form_power(form, degree)
    return total


def _decomposables(found: List[Tuple[int, MultiPoly]], degree: int, nvars: int) -> List[MultiPoly]:
    weights = [d for d, _ in found]
    if not weights:
        return []
    products = []
    for exponent in weighted_monomial_basis(weights, degree):
        term = MultiPoly.constant(nvars, 1)
        for (_, poly), k in zip(found, exponent):
            if k:
                term = term * poly**k
        products.append(term)
    return products


def _search_exceptional(rs: RootSystem, block: Block, seed: int) -> List[BasicInvariant]:
    """Choose power-sum invariants for G2 or F4, one per degree."""
    simple = [_local(block, rs.simple_roots[i]) for i in block.simple_indices()]
    positive = [
        _local(block, beta)
        for beta in rs.positive_roots()
        if any(beta[i] for i in block.coordinates())
    ]
    norms = {dot(b, b) for b in positive}
    long_roots = [b for b in positive if dot(b, b) == max(norms)]
    short_roots = [b for b in positive if dot(b, b) == min(norms)]
    rho = tuple(sum(b[i] for b in positive) / 2 for i in range(block.size))

    candidates: List[Tuple[str, List[Vector]]] = [
        ("positive roots", positive),
        ("long roots", long_roots),
        ("short roots", short_roots),
        ("rho orbit", _orbit(rho, simple)),
    ]
    rng = random.Random(seed)
    for attempt in range(4):
        generic = [Fraction(rng.randint(1, 9)) for _ in simple]
        point = tuple(sum(c * a[i] for c, a in zip(generic, simple)) for i in range(block.size))
        candidates.append((f"generic orbit {attempt}", _orbit(point, simple)))

    found: List[Tuple[int, MultiPoly]] = []
    chosen: List[BasicInvariant] = []
    basis_cache: Dict[int, List[Exponent]] = {}
    for degree in type_degrees(block.letter, block.rank):
        basis = basis_cache.setdefault(degree, monomial_basis(block.size, degree))
        rows = [p.coefficient_vector(basis) for p in _decomposables(found, degree, block.size)]
        base_rank = rank(QMatrix.from_rows(rows, len(basis))) if rows else 0
        for label, forms in candidates:
            poly = _power_sum(forms, degree, block.size)
            if poly.is_zero():
                continue
            trial = rank(QMatrix.from_rows(rows + [poly.coefficient_vector(basis)], len(basis)))
            if trial > base_rank:
                found.append((degree, poly))
                chosen.append(
                    BasicInvariant(
                        "power-sum",
                        degree,
                        degree,
                        tuple(_lift(rs.ambient_dim, block, f) for f in forms),
                        f"{block.name} p{degree}({label})",
                    )
                )
                break
        else:
            raise ConsistencyError(f"No basic invariant of degree {degree} found for {block.name}")
    return chosen


_CACHE: Dict[str, InvariantSet] = {}


def basic_invariants(rs: RootSystem, seed: int = 0) -> InvariantSet:
    """Homogeneous basic invariants of W(G), checked for invariance and independence."""
    key = f"{rs.spec.canonical()}:{seed}"
    if key in _CACHE:
        return _CACHE[key]

    n = rs.ambient_dim
    generators: List[BasicInvariant] = []
    for block in rs.blocks:
        units = tuple(_unit(n, i) for i in block.coordinates())
        if block.letter == "E":
            raise UnsupportedError(
                f"Basic invariants for {block.name} are not implemented; "
                "the cohomology engine supports types A-D, F4, G2 and tori"
            )
        if block.letter == "A":
            generators.extend(
                BasicInvariant("elementary", k, k, units, f"{block.name} e{k}")
                for k in range(2, block.rank + 2)
            )
        elif block.letter in ("B", "C"):
            generators.extend(
                BasicInvariant("elementary-squares", 2 * k, k, units, f"{block.name} e{k}(x^2)")
                for k in range(1, block.rank + 1)
            )
        elif block.letter == "D":
            generators.extend(
                BasicInvariant("elementary-squares", 2 * k, k, units, f"{block.name} e{k}(x^2)")
                for k in range(1, block.rank)
            )
            generators.append(
                BasicInvariant("product", block.rank, block.rank, units, f"{block.name} pfaffian")
            )
        elif block.letter == "T":
            generators.extend(
                BasicInvariant("coordinate", 1, 1, (u,), f"z{j + 1}") for j, u in enumerate(units)
            )
        else:
            generators.extend(_search_exceptional(rs, block, seed))

    invariant_set = InvariantSet(generators, n)
    _verify_invariants(rs, invariant_set, seed)
    _CACHE[key] = invariant_set
    logger.debug("Basic invariants of %s have degrees %s", rs.spec, invariant_set.degrees)
    return invariant_set


def _verify_invariants(rs: RootSystem, invariant_set: InvariantSet, seed: int) -> None:
    polys = invariant_set.polynomials()
    for i in range(len(rs.simple_roots)):
        reflection = rs.reflection_matrix(i)
        for generator, poly in zip(invariant_set.generators, polys):
            if generator.restrict(reflection) != poly:
                raise ConsistencyError(f"{generator.label} is not invariant under s_{i + 1}")

    on_t = invariant_set.restricted(rs.t_basis)
    if len(on_t) != rs.rank:
        raise ConsistencyError(f"Expected {rs.rank} basic invariants, got {len(on_t)}")
    if rs.rank == 0:
        return
    partials = [[p.partial(j) for j in range(rs.rank)] for p in on_t]
    rng = random.Random(seed)
    for _ in range(3):
        point = [rng.randint(-20, 20) for _ in range(rs.rank)]
        jacobian = QMatrix.from_rows([[d.evaluate(point) for d in row] for row in partials])
        if rank(jacobian) == rs.rank:
            return
    raise ConsistencyError(f"Basic invariants of {rs.spec} are algebraically dependent")


class InvariantRing:
    """Invariant ring of a finite group of k x k rational matrices.

    When the group is generated by reflections the ring is polynomial and
    ``generators`` holds homogeneous generators found degree by degree,
    with dimensions taken from the Molien series.
    """

    def __init__(self, elements: Sequence[QMatrix], nvars: int, seed: int = 0) -> None:
        self.nvars = nvars
        self.elements = list(elements) or [QMatrix.identity(nvars)]
        self.order = len(self.elements)
        self._rng = random.Random(seed)
        self._transposes = [g.transpose() for g in self.elements]
        self._classes = Counter(charpoly(g) for g in self.elements)
        self._series: Dict[Tuple[Fraction, ...], List[Fraction]] = {}
        self._products: Dict[Exponent, MultiPoly] = {}
        self._invariant_bases: Dict[int, List[MultiPoly]] = {}
        self.generators: List[MultiPoly] = []
        self.degrees: List[int] = []
        self.is_polynomial = self._generated_by_reflections()
        if self.is_polynomial:
            self._find_generators()

    def _generated_by_reflections(self) -> bool:
        identity = QMatrix.identity(self.nvars)
        reflections = [g for g in self.elements if rank(g - identity) == 1]
        if self.order == 1:
            return True
        if not reflections:
            return False
        subgroup = enumerate_group(reflections, self.nvars, cap=self.order, label="reflections")
        return subgroup.order == self.order

    def molien(self, max_degree: int) -> List[int]:
        """Dimensions of the invariants in degrees 0..max_degree."""
        totals = [Fraction(0)] * (max_degree + 1)
        for poly, count in self._classes.items():
            series = self._series.setdefault(poly, [Fraction(1)])
            # det(I - tg) has coefficients poly[0..k] in increasing powers of t
            while len(series) <= max_degree:
                n = len(series)
                value = -sum(
                    (poly[i] * series[n - i] for i in range(1, min(n, len(poly) - 1) + 1)),
                    Fraction(0),
                )
                series.append(value)
            for d in range(max_degree + 1):
                totals[d] += count * series[d]
        dims = []
        for total in totals:
            value = total / self.order
            if value.denominator != 1:
                raise ConsistencyError(f"Molien coefficient {value} is not an integer")
            dims.append(int(value))
        return dims

    def reynolds_power(self, u: Sequence[Fraction], degree: int) -> MultiPoly:
        """Average of (g^T u . y)^degree over the orbit of u."""
        orbit = {g.apply(u) for g in self._transposes}
        return _power_sum(sorted(orbit), degree, self.nvars)

    def _random_vector(self) -> Vector:
        while True:
            u = tuple(Fraction(self._rng.randint(-9, 9)) for _ in range(self.nvars))
            if any(u):
                return u

    def _find_generators(self) -> None:
        if self.order == 1:
            self.generators = [MultiPoly.variable(self.nvars, i) for i in range(self.nvars)]
            self.degrees = [1] * self.nvars
            return
        degree = 0
        while len(self.generators) < self.nvars or prod(self.degrees) != self.order:
            degree += 1
            if degree > self.order:
                raise ConsistencyError("Invariant generators exceed the Noether bound")
            target = self.molien(degree)[degree]
            basis = monomial_basis(self.nvars, degree)
            rows = [
                self._product(e).coefficient_vector(basis)
                for e in weighted_monomial_basis(self.degrees, degree)
            ] if self.degrees else []
            current = rank(QMatrix.from_rows(rows, len(basis))) if rows else 0
            attempts = 0
            while current < target:
                attempts += 1
                if attempts > 50 + 10 * target:
                    raise ConsistencyError(f"Could not find invariants of degree {degree}")
                poly = self.reynolds_power(self._random_vector(), degree)
                trial = rank(QMatrix.from_rows(rows + [poly.coefficient_vector(basis)], len(basis)))
                if trial > current:
                    rows.append(poly.coefficient_vector(basis))
                    current = trial
                    self.generators.append(poly)
                    self.degrees.append(degree)
                    self._products.clear()
            if len(self.generators) > self.nvars:
                raise ConsistencyError("More generators than variables for a reflection group")
        logger.debug("Invariant ring of order %d has degrees %s", self.order, self.degrees)

    def _product(self, exponent: Exponent) -> MultiPoly:
        if exponent not in self._products:
            index = next((i for i, k in enumerate(exponent) if k), None)
            if index is None:
                self._products[exponent] = MultiPoly.constant(self.nvars, 1)
            else:
                lowered = exponent[:index] + (exponent[index] - 1,) + exponent[index + 1 :]
                self._products[exponent] = self._product(lowered) * self.generators[index]
        return self._products[exponent]

    def express(self, poly: MultiPoly) -> MultiPoly:
        """Write an invariant as a polynomial in the generators."""
        if not self.is_polynomial:
            raise ValueError("express() needs a polynomial invariant ring")
        count = len(self.generators)
        if poly.is_zero():
            return MultiPoly.zero(count)
        degree = poly.homogeneous_degree()
        exponents = weighted_monomial_basis(self.degrees, degree)
        basis = monomial_basis(self.nvars, degree)
        if not exponents:
            raise ConsistencyError(f"No invariants of degree {degree} to express {poly}")
        columns = [self._product(e).coefficient_vector(basis) for e in exponents]
        matrix = QMatrix.from_columns(columns, len(basis))
        solution = solve(matrix, poly.coefficient_vector(basis))
        if solution is None:
            raise ConsistencyError(f"{poly} is not invariant")
        return MultiPoly(count, dict(zip(exponents, solution)))

    def is_invariant(self, poly: MultiPoly) -> bool:
        return all(substitute_linear(poly, g) == poly for g in self.elements)

    def invariant_basis(self, degree: int) -> List[MultiPoly]:
        """A basis of the degree-``degree`` invariants, built from Reynolds images."""
        if degree in self._invariant_bases:
            return self._invariant_bases[degree]
        target = self.molien(degree)[degree]
        basis = monomial_basis(self.nvars, degree)
        found: List[MultiPoly] = []
        rows: List[List[Fraction]] = []
        attempts = 0
        while len(found) < target:
            attempts += 1
            if attempts > 50 + 10 * target:
                raise ConsistencyError(f"Could not span the invariants of degree {degree}")
            poly = self.reynolds_power(self._random_vector(), degree)
            candidate = rows + [poly.coefficient_vector(basis)]
            if rank(QMatrix.from_rows(candidate, len(basis))) > len(found):
                rows = candidate
                found.append(poly)
        self._invariant_bases[degree] = found
        return found
