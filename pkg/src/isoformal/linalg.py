"""Exact rational linear algebra and sparse multivariate polynomials.

Matrices are small and dense, so products are plain Python loops over
Fraction entries. Row reduction, rank and characteristic polynomials are
delegated to sympy's DomainMatrix over QQ, which stays exact and is much
faster than Matrix for the wide sparse systems the cohomology engine builds.
"""

from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

Number = Union[int, Fraction]
Vector = Tuple[Fraction, ...]
Exponent = Tuple[int, ...]


def to_fraction(value: Any) -> Fraction:
    """Convert ints, Fractions, "n/d" strings and sympy/gmpy rationals."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(int(value.numerator), int(value.denominator))


def vector(values: Iterable[Any]) -> Vector:
    return tuple(to_fraction(v) for v in values)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"Length mismatch in dot product: {len(a)} vs {len(b)}")
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def is_zero_vector(values: Sequence[Fraction]) -> bool:
    return all(v == 0 for v in values)


def primitive_vector(values: Sequence[Any]) -> Vector:
    """Scale a rational vector to coprime integers, keeping its direction."""
    fractions = [to_fraction(v) for v in values]
    if all(v == 0 for v in fractions):
        raise ValueError("Cannot normalize the zero vector")
    denominator = 1
    for v in fractions:
        denominator = denominator * v.denominator // gcd(denominator, v.denominator)
    integers = [int(v * denominator) for v in fractions]
    divisor = 0
    for n in integers:
        divisor = gcd(divisor, n)
    return tuple(Fraction(n // divisor) for n in integers)


def _qq(value: Fraction) -> Any:
    return QQ(value.numerator, value.denominator)


class QMatrix:
    """Immutable dense rational matrix stored row-major."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    rows: int
    cols: int
    entries: Tuple[Fraction, ...]
    _hash: Optional[int]

    def __init__(self, rows: int, cols: int, entries: Iterable[Any]) -> None:
        values = tuple(to_fraction(e) for e in entries)
        if rows < 0 or cols < 0:
            raise ValueError(f"Invalid matrix shape {rows}x{cols}")
        if len(values) != rows * cols:
            raise ValueError(
                f"Expected {rows * cols} entries for a {rows}x{cols} matrix, "
                f"got {len(values)}"
            )
        self.rows = rows
        self.cols = cols
        self.entries = values
        self._hash = None

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[Any]], cols: Optional[int] = None
    ) -> "QMatrix":
        if not rows:
            return cls(0, cols or 0, [])
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise ValueError("Ragged rows in matrix literal")
        return cls(len(rows), width, [e for row in rows for e in row])

    @classmethod
    def from_columns(
        cls, columns: Sequence[Sequence[Any]], rows: Optional[int] = None
    ) -> "QMatrix":
        if not columns:
            return cls(rows or 0, 0, [])
        return cls.from_rows(columns).transpose()

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls(rows, cols, [0] * (rows * cols))

    @classmethod
    def from_domain(cls, matrix: DomainMatrix) -> "QMatrix":
        rows, cols = matrix.shape
        if rows == 0 or cols == 0:
            return cls.zeros(rows, cols)
        return cls.from_rows([[to_fraction(e) for e in row] for row in matrix.to_list()])

    def to_domain(self) -> DomainMatrix:
        return DomainMatrix(
            [[_qq(e) for e in self.row(i)] for i in range(self.rows)],
            (self.rows, self.cols),
            QQ,
        )

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        i, j = key
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "QMatrix":
        return QMatrix(
            self.cols,
            self.rows,
            [self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)],
        )

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError(f"Cannot multiply {self.shape} by {other.shape}")
        other_cols = other.columns()
        out: List[Fraction] = []
        for i in range(self.rows):
            row = self.row(i)
            for col in other_cols:
                total = Fraction(0)
                for a, b in zip(row, col):
                    if a and b:
                        total += a * b
                out.append(total)
        return QMatrix(self.rows, other.cols, out)

    def apply(self, values: Sequence[Fraction]) -> Vector:
        if len(values) != self.cols:
            raise ValueError(f"Cannot apply a {self.shape} matrix to length {len(values)}")
        return tuple(dot(self.row(i), values) for i in range(self.rows))

    def __add__(self, other: "QMatrix") -> "QMatrix":
        if self.shape != other.shape:
            raise ValueError(f"Shape mismatch: {self.shape} vs {other.shape}")
        return QMatrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return self + (-other)

    def __neg__(self) -> "QMatrix":
        return QMatrix(self.rows, self.cols, [-a for a in self.entries])

    def hstack(self, other: "QMatrix") -> "QMatrix":
        if self.rows != other.rows:
            raise ValueError(f"Cannot stack {self.shape} beside {other.shape}")
        return QMatrix.from_rows(
            [self.row(i) + other.row(i) for i in range(self.rows)], self.cols + other.cols
        )

    def inverse(self) -> "QMatrix":
        if self.rows != self.cols:
            raise ValueError(f"Cannot invert a non-square {self.shape} matrix")
        n = self.rows
        reduced, matrix_rank, _ = rref(self.hstack(QMatrix.identity(n)))
        if matrix_rank < n or any(reduced[i, i] != 1 for i in range(n)):
            raise ValueError("Matrix is singular")
        return QMatrix.from_rows([reduced.row(i)[n:] for i in range(n)], n)

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == QMatrix.identity(self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __repr__(self) -> str:
        return f"QMatrix({self.rows}x{self.cols}, {self.format_rows()})"

    def format_rows(self) -> List[List[str]]:
        return [[str(e) for e in self.row(i)] for i in range(self.rows)]


def rref(matrix: QMatrix) -> Tuple[QMatrix, int, Tuple[int, ...]]:
    """Reduced row echelon form, rank and pivot columns."""
    if matrix.rows == 0 or matrix.cols == 0:
        return matrix, 0, ()
    reduced, pivots = matrix.to_domain().rref()
    return QMatrix.from_domain(reduced), len(pivots), tuple(pivots)


def rank(matrix: QMatrix) -> int:
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    return int(matrix.to_domain().rank())


def kernel_basis(matrix: QMatrix) -> List[Vector]:
    """Basis of {x : matrix @ x = 0}, one vector per free column."""
    reduced, _, pivots = rref(matrix)
    free = [j for j in range(matrix.cols) if j not in pivots]
    basis: List[Vector] = []
    for f in free:
        x = [Fraction(0)] * matrix.cols
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -reduced[i, f]
        basis.append(tuple(x))
    return basis


def solve(matrix: QMatrix, rhs: Sequence[Any]) -> Optional[Vector]:
    """One solution of matrix @ x = rhs, or None when inconsistent."""
    if len(rhs) != matrix.rows:
        raise ValueError(f"Right-hand side has length {len(rhs)}, expected {matrix.rows}")
    if matrix.cols == 0:
        return () if all(to_fraction(b) == 0 for b in rhs) else None
    augmented = matrix.hstack(QMatrix.from_columns([vector(rhs)], matrix.rows))
    reduced, _, pivots = rref(augmented)
    if matrix.cols in pivots:
        return None
    x = [Fraction(0)] * matrix.cols
    for i, p in enumerate(pivots):
        x[p] = reduced[i, matrix.cols]
    return tuple(x)


def charpoly(matrix: QMatrix) -> Tuple[Fraction, ...]:
    """Coefficients of det(tI - M), leading coefficient first."""
    if matrix.rows == 0:
        return (Fraction(1),)
    return tuple(to_fraction(c) for c in matrix.to_domain().charpoly())


def sparse_rank(rows: Sequence[Mapping[int, Fraction]], ncols: int) -> int:
    """Rank of a matrix given as a list of {column: value} rows."""
    data = {i: {j: _qq(v) for j, v in row.items() if v} for i, row in enumerate(rows)}
    data = {i: row for i, row in data.items() if row}
    if not data or ncols == 0:
        return 0
    matrix = DomainMatrix(data, (len(rows), ncols), QQ)
    return int(matrix.rank())


@lru_cache(maxsize=None)
def _monomials(nvars: int, degree: int) -> Tuple[Exponent, ...]:
    if nvars == 0:
        return ((),) if degree == 0 else ()
    if nvars == 1:
        return ((degree,),)
    out: List[Exponent] = []
    for first in range(degree, -1, -1):
        for rest in _monomials(nvars - 1, degree - first):
            out.append((first,) + rest)
    return tuple(out)


def monomial_basis(nvars: int, degree: int) -> List[Exponent]:
    """Exponents of total degree ``degree``, graded lex, descending.

    monomial_basis(2, 2) is [(2, 0), (1, 1), (0, 2)].
    """
    if degree < 0:
        return []
    return list(_monomials(nvars, degree))


@lru_cache(maxsize=None)
def _weighted_monomials(weights: Tuple[int, ...], degree: int) -> Tuple[Exponent, ...]:
    if not weights:
        return ((),) if degree == 0 else ()
    head, tail = weights[0], weights[1:]
    out: List[Exponent] = []
    for first in range(degree // head, -1, -1):
        for rest in _weighted_monomials(tail, degree - first * head):
            out.append((first,) + rest)
    return tuple(out)


def weighted_monomial_basis(weights: Sequence[int], degree: int) -> List[Exponent]:
    """Exponents e with sum(e_i * w_i) == degree."""
    if any(w <= 0 for w in weights):
        raise ValueError(f"Weights must be positive, got {list(weights)}")
    if degree < 0:
        return []
    return list(_weighted_monomials(tuple(weights), degree))


def _add_exponents(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


class MultiPoly:
    """Sparse polynomial with rational coefficients in ``nvars`` variables."""

    __slots__ = ("nvars", "terms")

    nvars: int
    terms: Dict[Exponent, Fraction]

    def __init__(self, nvars: int, terms: Optional[Mapping[Exponent, Any]] = None) -> None:
        self.nvars = nvars
        cleaned: Dict[Exponent, Fraction] = {}
        for exponent, coefficient in (terms or {}).items():
            if len(exponent) != nvars:
                raise ValueError(f"Exponent {exponent} does not have {nvars} entries")
            value = cleaned.get(exponent, Fraction(0)) + to_fraction(coefficient)
            if value:
                cleaned[exponent] = value
            else:
                cleaned.pop(exponent, None)
        self.terms = cleaned

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value: Any) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "MultiPoly":
        exponent = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(nvars, {exponent: 1})

    @classmethod
    def linear_form(cls, coefficients: Sequence[Any]) -> "MultiPoly":
        n = len(coefficients)
        return cls(
            n,
            {tuple(1 if i == j else 0 for i in range(n)): c for j, c in enumerate(coefficients)},
        )

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def homogeneous_degree(self) -> int:
        degrees = {sum(e) for e in self.terms}
        if not degrees:
            raise ValueError("The zero polynomial has no degree")
        if len(degrees) > 1:
            raise ValueError(f"Polynomial is not homogeneous: degrees {sorted(degrees)}")
        return degrees.pop()

    def weighted_degree(self, weights: Sequence[int]) -> int:
        degrees = {sum(a * w for a, w in zip(e, weights)) for e in self.terms}
        if not degrees:
            raise ValueError("The zero polynomial has no degree")
        if len(degrees) > 1:
            raise ValueError(f"Polynomial is not weighted-homogeneous: {sorted(degrees)}")
        return degrees.pop()

    def coefficient(self, exponent: Exponent) -> Fraction:
        return self.terms.get(exponent, Fraction(0))

    def coefficient_vector(self, basis: Sequence[Exponent]) -> List[Fraction]:
        return [self.terms.get(e, Fraction(0)) for e in basis]

    def _check(self, other: "MultiPoly") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"Variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return MultiPoly(self.nvars, terms)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other: Union["MultiPoly", int, Fraction]) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            c = to_fraction(other)
            return MultiPoly(self.nvars, {e: c * v for e, v in self.terms.items()})
        self._check(other)
        terms: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exponents(e1, e2)
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(self.nvars, terms)

    def __rmul__(self, other: Union[int, Fraction]) -> "MultiPoly":
        return self * other

    def __pow__(self, exponent: int) -> "MultiPoly":
        if exponent < 0:
            raise ValueError("Negative powers are not polynomials")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def evaluate(self, point: Sequence[Any]) -> Fraction:
        values = vector(point)
        if len(values) != self.nvars:
            raise ValueError(f"Expected a point with {self.nvars} coordinates")
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(values, e):
                if k:
                    term *= x**k
            total += term
        return total

    def partial(self, index: int) -> "MultiPoly":
        terms: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            k = e[index]
            if k:
                lowered = e[:index] + (k - 1,) + e[index + 1 :]
                terms[lowered] = c * k
        return MultiPoly(self.nvars, terms)

    def substitute(self, matrix: QMatrix) -> "MultiPoly":
        return substitute_linear(self, matrix)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"MultiPoly({self.nvars}, {self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            factors = [
                f"x{i}" if k == 1 else f"x{i}^{k}" for i, k in enumerate(e) if k
            ]
            if not factors:
                pieces.append(str(c))
            elif c == 1:
                pieces.append("*".join(factors))
            elif c == -1:
                pieces.append("-" + "*".join(factors))
            else:
                pieces.append(f"{c}*" + "*".join(factors))
        return " + ".join(pieces).replace("+ -", "- ")


def multinomial(exponent: Exponent) -> int:
    result = factorial(sum(exponent))
    for k in exponent:
        result //= factorial(k)
    return result


def linear_form_power(coefficients: Sequence[Any], degree: int) -> MultiPoly:
    """Expand (sum_i c_i x_i)^degree by the multinomial formula."""
    coeffs = vector(coefficients)
    n = len(coeffs)
    support = [i for i, c in enumerate(coeffs) if c]
    if not support:
        return MultiPoly.constant(n, 1) if degree == 0 else MultiPoly.zero(n)
    terms: Dict[Exponent, Fraction] = {}
    for local in monomial_basis(len(support), degree):
        value = Fraction(multinomial(local))
        for i, k in zip(support, local):
            if k:
                value *= coeffs[i] ** k
        exponent = [0] * n
        for i, k in zip(support, local):
            exponent[i] = k
        terms[tuple(exponent)] = value
    return MultiPoly(n, terms)


def substitute_linear(poly: MultiPoly, matrix: QMatrix) -> MultiPoly:
    """Compose ``poly`` with x = matrix @ y.

    ``matrix`` is nvars x k and the result is a polynomial in k variables.
    """
    if matrix.rows != poly.nvars:
        raise ValueError(
            f"Cannot substitute a {matrix.shape} matrix into {poly.nvars} variables"
        )
    k = matrix.cols
    forms = [MultiPoly.linear_form(matrix.row(i)) for i in range(matrix.rows)]
    powers: Dict[Tuple[int, int], MultiPoly] = {}

    def power(i: int, n: int) -> MultiPoly:
        key = (i, n)
        if key not in powers:
            powers[key] = linear_form_power(matrix.row(i), n)
        return powers[key]

    result = MultiPoly.zero(k)
    for e, c in poly.terms.items():
        term = MultiPoly.constant(k, c)
        for i, n in enumerate(e):
            if n:
                term = term * (power(i, n) if n > 1 else forms[i])
        result = result + term
    return result
