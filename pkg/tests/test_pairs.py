"""Tests for subgroup specs and corank-one pairs."""

from fractions import Fraction

import pytest

from isoformal.errors import PairError, RootSystemError, SpecParseError
from isoformal.linalg import dot, vector
from isoformal.pairs import (
    canonical_normal,
    pair_from_strings,
    parse_subgroup_spec,
    rational_pi1_rank,
)
from isoformal.roots import build_root_system, parse_group_spec


class TestSubgroupSpec:
    """Test parsing of subgroup specs."""

    def test_v_and_alpha(self):
        """Test coordinate specs keep exact rationals."""
        spec = parse_subgroup_spec("v=1, -2/3, 0")
        assert spec.kind == "v"
        assert spec.values == (1, Fraction(-2, 3), 0)
        assert parse_subgroup_spec("alpha=1,-1,0").kind == "alpha"

    def test_circle(self):
        """Test circle specs with an occurrence index."""
        spec = parse_subgroup_spec("circle(3,-1)@G2std#2")
        assert spec.kind == "circle"
        assert spec.circle == (3, -1)
        assert spec.torus == "G2"
        assert spec.occurrence == 2
        assert parse_subgroup_spec("circle(1,0)@A2std").occurrence == 1

    def test_sub(self):
        """Test sub() with simple-root refs, explicit roots and centers."""
        spec = parse_subgroup_spec("sub(roots=a1,(1,-1,0,0); center=0,0,1/2,-1/2; center=1,1,1,1)")
        assert spec.kind == "sub"
        assert spec.roots[0] == 0
        assert spec.roots[1] == (1, -1, 0, 0)
        assert len(spec.centers) == 2
        assert spec.centers[0][2] == Fraction(1, 2)

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "w=1,2",
            "v=1,2/0",
            "v=1,2 x",
            "circle(0,0)@A2std",
            "circle(2,4)@A2std",
            "circle(1,1)@D4std",
            "circle(1,1)@A2std#0",
            "sub(roots=a0)",
            "sub(roots=b1)",
            "sub(roots=a1",
        ],
    )
    def test_invalid_specs(self, text):
        """Test malformed subgroup specs raise SpecParseError."""
        with pytest.raises(SpecParseError):
            parse_subgroup_spec(text)

    def test_error_points_at_bad_token(self):
        """Test the caret sits under the offending input."""
        with pytest.raises(SpecParseError) as info:
            parse_subgroup_spec("sub(roots=a1; hat=2)")
        assert info.value.offset == len("sub(roots=a1; ")


class TestCanonicalNormal:
    """Test normalization of v."""

    def test_dominant_and_primitive(self):
        """Test v is moved into the dominant chamber and made primitive."""
        rs = build_root_system(parse_group_spec("SU(3)"))
        v, w = canonical_normal(rs, vector((0, 2, -2)))
        assert v == (1, 0, -1)
        assert rs.is_dominant(v)

    def test_sign_choice_is_lexicographic(self):
        """Test v and -v give the same normal."""
        rs = build_root_system(parse_group_spec("SU(3)"))
        plus, _ = canonical_normal(rs, vector((1, -2, 1)))
        minus, _ = canonical_normal(rs, vector((-1, 2, -1)))
        assert plus == minus == (2, -1, -1)


class TestCorankOnePair:
    """Test construction of (G, S) pairs and H_S."""

    def test_su4_two_su2(self):
        """Test SU(4) / SU(2) x SU(2)."""
        pair = pair_from_strings("SU(4)", "sub(roots=a1,a3)")
        assert pair.v == (1, 1, -1, -1)
        assert pair.delta_v == [0, 2]
        assert pair.hs_type == "A1+A1"
        assert pair.hs_equals_h is True
        assert pair.pi1_rank == 0
        assert pair.dim_ghs == 9
        assert pair.wv_order == 4
        assert pair.s_basis.shape == (4, 2)

    def test_v_spec_gives_same_pair(self):
        """Test v= reaches the same S, with H_S != H."""
        pair = pair_from_strings("SU(4)", "v=1,1,-1,-1")
        assert pair.v == (1, 1, -1, -1)
        assert pair.hs_type == "A1+A1"
        assert pair.hs_equals_h is False

    def test_alpha_spec(self):
        """Test alpha= is the kernel of a weight."""
        pair = pair_from_strings("SU(3)", "alpha=1,-1,0")
        assert pair.v == (1, 0, -1)
        assert pair.delta_v == []
        assert pair.hs_type == "T1"

    def test_alpha_sign(self):
        """Test alpha is -v, negative on v, and reproduces the pair."""
        pair = pair_from_strings("SU(4)", "sub(roots=a1,a3)")
        assert pair.alpha == (-1, -1, 1, 1)
        assert dot(pair.alpha, pair.v) < 0
        text = ",".join(str(x) for x in pair.alpha)
        assert pair_from_strings("SU(4)", f"alpha={text}").v == pair.v

    def test_circle_kernel(self):
        """Test circle(1,0) in SU(3) gives H_S = SU(2)."""
        pair = pair_from_strings("SU(3)", "circle(1,0)@A2std")
        assert pair.v == (2, -1, -1)
        assert pair.hs_type == "A1"
        assert pair.dim_ghs == 5

    def test_centers_in_product(self):
        """Test a sub() with a diagonal center in Sp(2) x Sp(1)."""
        pair = pair_from_strings("C2xC1", "sub(roots=(0,2,0); center=1,0,1)")
        assert pair.pi1_rank == 0
        assert "A1" in pair.hs_type

    def test_root_line_with_central_torus(self):
        """Test U(2) / SU(2) has pi_1 of rank one."""
        pair = pair_from_strings("A1xT1", "sub(roots=a1)")
        assert pair.v == (0, 0, 1)
        assert pair.pi1_rank == 1
        assert pair.hs_type == "A1"
        assert pair.dim_ghs == 1

    def test_type_a_blocks_need_all_coordinates(self):
        """Test A1 x T1 takes three coordinates, central last."""
        with pytest.raises(PairError, match="needs 3 coordinates"):
            pair_from_strings("A1xT1", "v=0,1")
        assert pair_from_strings("A1xT1", "v=0,0,1").pi1_rank == 1

    def test_central_circle_has_finite_pi1(self):
        """Test s on the central line of U(2) leaves pi_1 finite."""
        pair = pair_from_strings("A1xT1", "v=1,-1,0")
        assert pair.hs_type == "T1"
        assert rational_pi1_rank(pair.rs, pair.z_hs_basis) == 0

    def test_semisimple_pi1_rank(self):
        """Test a semisimple group never gives infinite pi_1."""
        pair = pair_from_strings("SU(3)", "sub(roots=a1)")
        assert rational_pi1_rank(pair.rs, pair.z_hs_basis) == 0

    def test_to_dict(self):
        """Test the summary dictionary uses 1-based simple roots."""
        data = pair_from_strings("SU(4)", "sub(roots=a1,a3)").to_dict()
        assert data["delta_v"] == [1, 3]
        assert data["v"] == [1, 1, -1, -1]
        assert data["phi_hs_count"] == 4
        assert data["hs_equals_h"] is True

    @pytest.mark.parametrize(
        "group,subgroup",
        [
            ("SU(3)", "v=1,0,0"),
            ("SU(3)", "v=1,-1"),
            ("SU(3)", "v=0,0,0"),
            ("SU(4)", "sub(roots=a1)"),
            ("SU(3)", "sub(roots=a3)"),
            ("SU(3)", "circle(1,1)@B2std"),
            ("SU(3)", "circle(1,1)@A2std#2"),
            ("SU(3)", "sub(roots=a1; center=1,0,0)"),
        ],
    )
    def test_invalid_pairs(self, group, subgroup):
        """Test subgroup specs that do not give a corank-one subtorus."""
        with pytest.raises(PairError):
            pair_from_strings(group, subgroup)

    def test_non_root_in_sub(self):
        """Test sub() rejects vectors that are not roots."""
        with pytest.raises(RootSystemError):
            pair_from_strings("SU(3)", "sub(roots=(1,1,0))")


class TestG2Coordinates:
    """Test two-coordinate input for G2 blocks."""

    def test_two_coordinates_match_three(self):
        """Test v=(x, y) on G2 means (x, y, -x-y)."""
        compact = pair_from_strings("G2", "v=1,0")
        ambient = pair_from_strings("G2", "v=1,0,-1")
        assert compact.v == ambient.v
        assert compact.delta_v == ambient.delta_v

    def test_simple_root_in_two_coordinates(self):
        """Test alpha=(1,-1) is the first simple root of G2."""
        pair = pair_from_strings("G2", "alpha=1,-1")
        assert pair.hs_type == pair_from_strings("G2", "alpha=1,-1,0").hs_type

    def test_product_with_g2(self):
        """Test a G2 x SU(2) center written with 2 + 2 coordinates."""
        compact = pair_from_strings("G2xA1", "sub(center=1,0,0,0; center=0,0,1,-1)")
        ambient = pair_from_strings("G2xA1", "sub(center=1,0,-1,0,0; center=0,0,0,1,-1)")
        assert compact.v == ambient.v

    def test_wrong_length_names_both_counts(self):
        """Test the error lists the two accepted lengths."""
        with pytest.raises(PairError, match="2 or 3 coordinates"):
            pair_from_strings("G2", "v=1")
