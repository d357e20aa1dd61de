"""Tests for exact rational linear algebra and polynomials."""

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from isoformal.linalg import (
    MultiPoly,
    QMatrix,
    charpoly,
    kernel_basis,
    linear_form_power,
    monomial_basis,
    primitive_vector,
    rank,
    solve,
    sparse_rank,
    substitute_linear,
    to_fraction,
    weighted_monomial_basis,
)

small_ints = st.integers(min_value=-6, max_value=6)


class TestQMatrix:
    """Test dense rational matrices."""

    def test_identity_and_product(self):
        """Test identity is neutral for products."""
        m = QMatrix.from_rows([[1, 2], [3, 4]])
        assert QMatrix.identity(2) @ m == m
        assert m @ QMatrix.identity(2) == m
        assert QMatrix.identity(3).is_identity()

    def test_inverse(self):
        """Test inverse of an integer matrix."""
        m = QMatrix.from_rows([[2, 1], [1, 1]])
        assert m.inverse() == QMatrix.from_rows([[1, -1], [-1, 2]])

    def test_singular_inverse_raises(self):
        """Test singular matrices cannot be inverted."""
        with pytest.raises(ValueError, match="singular"):
            QMatrix.from_rows([[1, 2], [2, 4]]).inverse()

    def test_shape_checks(self):
        """Test mismatched shapes are rejected."""
        with pytest.raises(ValueError):
            QMatrix(2, 2, [1, 2, 3])
        with pytest.raises(ValueError):
            QMatrix.from_rows([[1, 2]]) @ QMatrix.from_rows([[1, 2]])
        with pytest.raises(ValueError, match="Ragged"):
            QMatrix.from_rows([[1, 2], [3]])

    def test_transpose_and_columns(self):
        """Test transpose swaps rows and columns."""
        m = QMatrix.from_rows([[1, 2, 3], [4, 5, 6]])
        assert m.transpose().shape == (3, 2)
        assert m.transpose().row(0) == (1, 4)
        assert QMatrix.from_columns(m.columns()) == m

    def test_entries_are_fractions(self):
        """Test entries are converted to Fraction."""
        m = QMatrix(1, 2, ["1/2", 3])
        assert m[0, 0] == Fraction(1, 2)
        assert isinstance(m[0, 1], Fraction)

    def test_hashable(self):
        """Test equal matrices hash equally."""
        a = QMatrix.from_rows([[1, 0], [0, -1]])
        b = QMatrix.from_rows([[1, 0], [0, -1]])
        assert len({a, b}) == 1


class TestLinearAlgebra:
    """Test rank, kernels and solving."""

    def test_rank(self):
        """Test rank of a rank-deficient matrix."""
        assert rank(QMatrix.from_rows([[1, 2, 3], [2, 4, 6], [0, 1, 1]])) == 2
        assert rank(QMatrix.zeros(0, 3)) == 0

    def test_kernel_basis(self):
        """Test kernel vectors are annihilated."""
        m = QMatrix.from_rows([[1, 1, 0], [0, 1, 1]])
        basis = kernel_basis(m)
        assert len(basis) == 1
        assert m.apply(basis[0]) == (0, 0)

    def test_solve(self):
        """Test solving consistent and inconsistent systems."""
        m = QMatrix.from_rows([[1, 1], [1, -1]])
        assert solve(m, [2, 0]) == (1, 1)
        assert solve(QMatrix.from_rows([[1, 1], [2, 2]]), [1, 3]) is None

    def test_charpoly(self):
        """Test characteristic polynomial of a swap."""
        assert charpoly(QMatrix.from_rows([[0, 1], [1, 0]])) == (1, 0, -1)

    def test_sparse_rank(self):
        """Test rank of a sparse row list."""
        rows = [{0: Fraction(1)}, {0: Fraction(2)}, {1: Fraction(1), 2: Fraction(1)}, {}]
        assert sparse_rank(rows, 3) == 2
        assert sparse_rank([], 3) == 0

    def test_primitive_vector(self):
        """Test scaling to coprime integers."""
        assert primitive_vector([Fraction(1, 2), Fraction(-3, 2)]) == (1, -3)
        assert primitive_vector([4, 6, 0]) == (2, 3, 0)
        with pytest.raises(ValueError):
            primitive_vector([0, 0])

    def test_to_fraction(self):
        """Test conversion from strings and ints."""
        assert to_fraction("-2/3") == Fraction(-2, 3)
        assert to_fraction(5) == Fraction(5)


class TestMonomials:
    """Test monomial enumeration."""

    def test_monomial_basis(self):
        """Test graded lex order."""
        assert monomial_basis(2, 2) == [(2, 0), (1, 1), (0, 2)]
        assert monomial_basis(3, 0) == [(0, 0, 0)]
        assert monomial_basis(2, -1) == []

    def test_weighted_monomial_basis(self):
        """Test monomials of a weighted degree."""
        assert weighted_monomial_basis([2, 3], 6) == [(3, 0), (0, 2)]
        assert weighted_monomial_basis([2, 4], 3) == []
        with pytest.raises(ValueError):
            weighted_monomial_basis([0, 1], 2)

    @given(st.integers(min_value=1, max_value=4), st.integers(min_value=0, max_value=5))
    def test_monomial_count(self, nvars, degree):
        """Test the number of monomials is a binomial coefficient."""
        assert len(monomial_basis(nvars, degree)) == comb(nvars + degree - 1, degree)


class TestMultiPoly:
    """Test sparse polynomials."""

    def test_arithmetic(self):
        """Test (x + y)(x - y) = x^2 - y^2."""
        x = MultiPoly.variable(2, 0)
        y = MultiPoly.variable(2, 1)
        assert (x + y) * (x - y) == x * x - y * y
        assert (x + y) ** 2 == x * x + 2 * x * y + y * y

    def test_degrees(self):
        """Test homogeneous and weighted degrees."""
        x = MultiPoly.variable(2, 0)
        y = MultiPoly.variable(2, 1)
        assert (x * y).homogeneous_degree() == 2
        assert (x * y).weighted_degree([2, 3]) == 5
        with pytest.raises(ValueError, match="not homogeneous"):
            (x + x * y).homogeneous_degree()
        assert MultiPoly.zero(2).degree() == -1

    def test_partial(self):
        """Test partial derivative."""
        x = MultiPoly.variable(2, 0)
        y = MultiPoly.variable(2, 1)
        assert (x**3 * y).partial(0) == 3 * x**2 * y

    def test_linear_form_power(self):
        """Test multinomial expansion of (x + y)^2."""
        expected = MultiPoly(2, {(2, 0): 1, (1, 1): 2, (0, 2): 1})
        assert linear_form_power([1, 1], 2) == expected
        assert linear_form_power([0, 0], 0) == MultiPoly.constant(2, 1)

    def test_substitute_linear(self):
        """Test x*y under x = u + v, y = u - v."""
        poly = MultiPoly(2, {(1, 1): 1})
        result = substitute_linear(poly, QMatrix.from_rows([[1, 1], [1, -1]]))
        assert result == MultiPoly(2, {(2, 0): 1, (0, 2): -1})

    def test_substitute_shape_mismatch(self):
        """Test substitution needs one row per variable."""
        with pytest.raises(ValueError):
            substitute_linear(MultiPoly.variable(3, 0), QMatrix.identity(2))

    def test_str(self):
        """Test readable rendering."""
        x = MultiPoly.variable(2, 0)
        y = MultiPoly.variable(2, 1)
        assert str(x * x - y) == "x0^2 - x1"
        assert str(MultiPoly.zero(2)) == "0"

    @given(
        st.lists(small_ints, min_size=3, max_size=3),
        st.lists(small_ints, min_size=3, max_size=3),
        st.integers(min_value=0, max_value=4),
    )
    def test_linear_form_power_evaluates(self, coefficients, point, degree):
        """Test (c . p)^d matches evaluating the expansion at p."""
        expected = Fraction(sum(c * p for c, p in zip(coefficients, point))) ** degree
        assert linear_form_power(coefficients, degree).evaluate(point) == expected

    @given(st.lists(small_ints, min_size=4, max_size=4), st.lists(small_ints, min_size=2, max_size=2))
    def test_substitution_commutes_with_evaluation(self, entries, point):
        """Test f(M y) evaluated at y equals f evaluated at M y."""
        x = MultiPoly.variable(2, 0)
        y = MultiPoly.variable(2, 1)
        poly = x**2 * y - 3 * y + x
        matrix = QMatrix(2, 2, entries)
        image = matrix.apply(tuple(Fraction(p) for p in point))
        assert substitute_linear(poly, matrix).evaluate(point) == poly.evaluate(image)
