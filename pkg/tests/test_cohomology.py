"""Tests for even cohomology of G/H_S and the dimension cross-checks."""

import random
from fractions import Fraction

import pytest

from isoformal.config import EngineConfig
from isoformal.cohomology import (
    coinvariant_algebra,
    coinvariant_cross_check,
    cohomology_dim_d,
    default_degree_cap,
    dimension_oracle,
    heven_quotient,
    hilbert_series_check,
    weighted_quotient,
)
from isoformal.errors import CohomologyError, DegreeCapError
from isoformal.linalg import MultiPoly, QMatrix, dot
from isoformal.pairs import pair_from_strings
from isoformal.roots import build_root_system, parse_group_spec
from isoformal.weyl import RestrictedGroup


class TestWeightedQuotient:
    """Test Hilbert functions of weighted quotients."""

    def test_truncated_polynomial_ring(self):
        """Test Q[y]/(y^3) has dimensions 1, 1, 1."""
        quotient = weighted_quotient([MultiPoly(1, {(3,): 1})], [1], cap=10, window=1)
        assert quotient.dims == {0: 1, 2: 1, 4: 1}
        assert quotient.total == 3
        assert quotient.top_degree == 4

    def test_weighted_generators(self):
        """Test Q[u, w]/(u + w, uw) with u, w of weight 2."""
        u_plus_w = MultiPoly(2, {(1, 0): 1, (0, 1): 1})
        uw = MultiPoly(2, {(1, 1): 1})
        quotient = weighted_quotient([u_plus_w, uw], [2, 2], cap=10, window=2)
        assert quotient.dims == {0: 1, 4: 1}

    def test_infinite_quotient_hits_cap(self):
        """Test an empty ideal never vanishes."""
        quotient = weighted_quotient([], [1], cap=5, window=1)
        assert quotient.total is None
        assert not quotient.finite

    def test_to_dict(self):
        """Test string keys for JSON."""
        quotient = weighted_quotient([MultiPoly(1, {(2,): 1})], [1], cap=4, window=1)
        assert quotient.to_dict()["dims"] == {"0": 1, "2": 1}


class TestHevenQuotient:
    """Test H^even(G/H_S) for explicit pairs."""

    def test_su4_two_su2(self):
        """Test SU(4) / SU(2) x SU(2) ~ S^4 x S^5."""
        result = cohomology_dim_d(pair_from_strings("SU(4)", "sub(roots=a1,a3)"))
        assert result.d == 4
        assert result.quotient.dims == {0: 1, 4: 1}
        assert (result.m, result.n) == (4, 5)

    def test_odd_sphere(self):
        """Test SU(3) / SU(2) = S^5."""
        result = cohomology_dim_d(pair_from_strings("SU(3)", "sub(roots=a1)"))
        assert result.d == 2
        assert result.n == 5

    def test_so8_three_five_correction(self):
        """Test SO(8) with W_H of type B1 x B2 on s has H^even of dimension 3."""
        pair = pair_from_strings("SO(8)", "v=1,0,0,0")
        assert pair.s_basis.columns() == [(0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
        generators = [
            QMatrix.from_rows([[-1, 0, 0], [0, 1, 0], [0, 0, 1]]),
            QMatrix.from_rows([[1, 0, 0], [0, 0, 1], [0, 1, 0]]),
            QMatrix.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, -1]]),
        ]
        w_h = RestrictedGroup.from_generators(pair.s_basis, generators, 100)
        assert w_h.order == 16
        quotient = heven_quotient(pair, w_h)
        assert quotient.dims == {0: 1, 4: 1, 8: 1}
        assert quotient.total == 3

    def test_w_h_dimension_mismatch(self):
        """Test W_H must act on s."""
        pair = pair_from_strings("SU(4)", "sub(roots=a1,a3)")
        w_h = RestrictedGroup(QMatrix.identity(3), [QMatrix.identity(3)])
        with pytest.raises(CohomologyError, match="dim"):
            heven_quotient(pair, w_h)

    def test_w_h_must_preserve_invariants(self):
        """Test -1 on s does not preserve the cubic invariant of SU(3)."""
        pair = pair_from_strings("SU(3)", "alpha=1,-1,0")
        w_h = RestrictedGroup.from_generators(pair.s_basis, [QMatrix.from_rows([[-1]])], 10)
        with pytest.raises(CohomologyError, match="preserve"):
            heven_quotient(pair, w_h)

    def test_degree_cap(self):
        """Test a tiny degree cap is reported, not truncated."""
        pair = pair_from_strings("SU(4)", "sub(roots=a1,a3)")
        with pytest.raises(DegreeCapError) as info:
            cohomology_dim_d(pair, EngineConfig(degree_cap=1))
        assert info.value.cap == 1

    def test_default_degree_cap(self):
        """Test the default cap is sum(d_i - 1)."""
        pair = pair_from_strings("SU(4)", "sub(roots=a1,a3)")
        assert default_degree_cap(pair.rs) == 6


class TestCrossChecks:
    """Test the dimension oracle and the coinvariant algebra."""

    def test_dimension_oracle_sp2_circle(self):
        """Test d_S = 4 for Sp(2) / U(1) on a root circle."""
        quotient = dimension_oracle(pair_from_strings("Sp(2)", "circle(1,1)@C2std"))
        assert quotient.dims == {0: 1, 2: 1}
        assert 2 * quotient.total == 4

    def test_dimension_oracle_su4(self):
        """Test d_S = 16 for SU(4) / T2."""
        quotient = dimension_oracle(pair_from_strings("SU(4)", "sub(roots=a1,a3)"))
        assert 2 * quotient.total == 16

    def test_coinvariant_algebra(self):
        """Test dim A = |W| / |W_v| and the cokernel of alpha gives d."""
        pair = pair_from_strings("SU(4)", "sub(roots=a1,a3)")
        algebra = coinvariant_algebra(pair)
        assert algebra.total == 6
        assert coinvariant_cross_check(pair) == 4

    def test_hilbert_series(self):
        """Test A's Hilbert function against the product formula."""
        check = hilbert_series_check(pair_from_strings("SU(4)", "sub(roots=a1,a3)"))
        assert check.ok
        assert sum(check.dims.values()) == 6

    @pytest.mark.parametrize(
        "group,subgroup,index",
        [
            ("SU(4)", "v=3,1,-1,-3", 24),
            ("SO(7)", "v=1,0,0", 6),
            ("Sp(2)", "v=1,1", 4),
        ],
    )
    def test_coinvariant_dimension_is_index(self, group, subgroup, index):
        """Test dim A^{W_v} = |W| / |W_v| and the product formula."""
        check = hilbert_series_check(pair_from_strings(group, subgroup))
        assert check.ok
        assert sum(check.dims.values()) == index


def _random_normals(text, count=10):
    """Seeded random nonzero vectors of t, written as v= specs."""
    rs = build_root_system(parse_group_spec(text))
    rng = random.Random(text)
    specs = []
    while len(specs) < count:
        x = [Fraction(rng.randint(-2, 2)) for _ in range(rs.ambient_dim)]
        for c in rs.complement:
            ratio = dot(x, c) / dot(c, c)
            x = [a - ratio * b for a, b in zip(x, c)]
        if any(x):
            specs.append("v=" + ",".join(str(a) for a in x))
    return specs


@pytest.mark.parametrize(
    "text",
    ["A3", "A4", "B3", "C2", "C3", "D4", "G2", pytest.param("F4", marks=pytest.mark.slow)],
)
def test_coinvariant_identities_on_random_normals(text):
    """dim A^{W_v} is |W| / |W_v| and A^{W_v} has the product Hilbert series."""
    for spec in _random_normals(text):
        pair = pair_from_strings(text, spec)
        check = hilbert_series_check(pair)
        assert check.ok, spec
        assert sum(check.dims.values()) == pair.rs.weyl_order() // pair.wv_order, spec
