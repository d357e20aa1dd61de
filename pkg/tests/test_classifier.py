"""Tests for the isotropy-formality decision procedure."""

import random
from pathlib import Path

import pytest

from isoformal.classifier import (
    Branch,
    Verdict,
    classify,
    cross_validate,
    onishchik_screen,
)
from isoformal.config import EngineConfig
from isoformal.corpus import load_corpus
from isoformal.errors import PairError, SpecParseError, UnsupportedError
from isoformal.linalg import QMatrix
from isoformal.pairs import pair_from_strings
from isoformal.roots import build_root_system, parse_group_spec
from isoformal.weyl import weyl_group


class TestClassify:
    """Test verdicts for known pairs."""

    def test_su4_two_su2_is_formal(self):
        """Test SU(4) / SU(2) x SU(2) takes the strict-N branch."""
        verdict = classify("SU(4)", "sub(roots=a1,a3)")
        assert verdict.formal is True
        assert verdict.branch == Branch.D_EQUALS_4_N_STRICT
        assert verdict.d == 4
        assert verdict.mn == (4, 5)
        assert verdict.n_order == 8
        assert verdict.wv_order == 4
        assert verdict.rational_type == "S^4 x S^5"
        assert verdict.poincare == {0: 1, 4: 1, 5: 1, 9: 1}

    @pytest.mark.slow
    def test_su5_is_not_formal(self):
        """Test SU(5) / SU(2) x SU(3) has N = W_v."""
        verdict = classify("SU(5)", "sub(roots=a1,a3,a4)")
        assert verdict.formal is False
        assert verdict.branch == Branch.D_EQUALS_4_N_EQUAL
        assert verdict.mn == (4, 9)
        assert verdict.n_order == 12

    def test_sp2_root_circle(self):
        """Test Sp(2) over a root circle is an odd-sphere case."""
        verdict = classify("Sp(2)", "circle(1,1)@C2std")
        assert verdict.formal is True
        assert verdict.branch == Branch.D_EQUALS_2
        assert verdict.d == 2
        assert verdict.mn is None

    def test_odd_sphere(self):
        """Test SU(3) / SU(2) = S^5."""
        verdict = classify("SU(3)", "sub(roots=a1)")
        assert verdict.d == 2
        assert verdict.rational_type == "S^5"
        assert verdict.poincare == {0: 1, 5: 1}

    def test_infinite_fundamental_group(self):
        """Test U(2) / SU(2) is formal without any cohomology."""
        verdict = classify("U(2)", "sub(roots=a1)")
        assert verdict.formal is True
        assert verdict.branch == Branch.PI1_INFINITE
        assert verdict.d == "infinite"
        assert verdict.n_order is None

    @pytest.mark.parametrize(
        "circle,formal",
        [("circle(1,1)@A2std", False), ("circle(1,-1)@A2std", True)],
    )
    def test_su3_circles(self, circle, formal):
        """Test two circles in SU(3) that differ in formality."""
        assert classify("SU(3)", circle).formal is formal

    @pytest.mark.parametrize(
        "group,subgroup",
        [("E6", "sub(roots=a1,a2,a3,a4,a5)"), ("E8", "sub(roots=a1,a2,a3,a4,a5,a6,a7)")],
    )
    def test_e_types_are_unsupported(self, group, subgroup):
        """Test E-type groups give an unsupported verdict, not a guess."""
        verdict = classify(group, subgroup)
        assert verdict.unsupported
        assert verdict.branch == Branch.UNSUPPORTED
        assert "E-type" in verdict.reason

    def test_degree_cap_is_unsupported(self):
        """Test exceeding the degree cap is reported as unsupported."""
        verdict = classify("SU(4)", "sub(roots=a1,a3)", EngineConfig(degree_cap=1))
        assert verdict.unsupported
        assert "degree cap" in verdict.reason

    def test_weyl_cap_is_unsupported(self):
        """Test exceeding the Weyl cap is reported as unsupported."""
        verdict = classify("SU(4)", "sub(roots=a1,a3)", EngineConfig(weyl_cap=2))
        assert verdict.unsupported

    def test_fast_path(self):
        """Test the parabolic shortcut only applies when w0 = -id."""
        config = EngineConfig(fast_path=True)
        so7 = classify("SO(7)", "sub(roots=a1,a2)", config)
        assert so7.fast_path is True
        assert so7.formal is True
        assert classify("SU(4)", "sub(roots=a1,a3)", config).fast_path is False

    def test_fast_path_agrees_with_enumeration(self):
        """Test fast path and enumeration give the same N."""
        slow = classify("SO(7)", "sub(roots=a1,a2)")
        fast = classify("SO(7)", "sub(roots=a1,a2)", EngineConfig(fast_path=True))
        assert slow.n_order == fast.n_order
        assert slow.formal == fast.formal

    def test_trace_records_each_step(self):
        """Test the trace walks pair, pi1, N, cohomology and decision."""
        verdict = classify("SU(4)", "sub(roots=a1,a3)")
        steps = [step.step for step in verdict.trace]
        assert steps == ["pair", "pi1", "component-group", "cohomology", "decision"]

    def test_verdict_json_round_trip(self):
        """Test a verdict survives JSON serialization."""
        verdict = classify("SU(4)", "sub(roots=a1,a3)")
        restored = Verdict.model_validate_json(verdict.model_dump_json())
        assert restored.branch == verdict.branch
        assert restored.mn == (4, 5)
        assert restored.poincare == verdict.poincare

    @pytest.mark.parametrize("v", ["v=1,-1,1,-1", "v=-1,1,1,-1", "v=1,-1,-1,1"])
    def test_weyl_translates_agree(self, v):
        """Test Weyl translates of v give the same verdict."""
        base = classify("SU(4)", "v=1,1,-1,-1")
        moved = classify("SU(4)", v)
        assert moved.formal == base.formal
        assert (moved.d, moved.n_order, moved.mn) == (base.d, base.n_order, base.mn)

    def test_input_errors_propagate(self):
        """Test bad specs raise instead of producing verdicts."""
        with pytest.raises(SpecParseError):
            classify("SU(q)", "sub(roots=a1)")
        with pytest.raises(PairError):
            classify("SU(4)", "sub(roots=a1)")


class TestDegreeScreen:
    """Test the odd-degree screen."""

    def test_product_case(self):
        """Test SO(8) vs SO(3) x SO(5)."""
        result = onishchik_screen("SO(8)", "B1xB2")
        assert result.passed
        assert result.classification == "product(n=11, m=4)"
        assert (result.n, result.m) == (11, 4)

    def test_su5_product(self):
        """Test SU(5) vs SU(2) x SU(3)."""
        assert onishchik_screen("SU(5)", "A1xA2").classification == "product(n=9, m=4)"

    def test_odd_sphere(self):
        """Test SU(4) vs Sp(2) gives S^5."""
        result = onishchik_screen("SU(4)", "Sp(2)")
        assert result.classification == "odd-sphere(5)"
        assert result.alternatives == []

    def test_odd_sphere_with_alternative(self):
        """Test Spin(7) vs G2 is also consistent with a product."""
        result = onishchik_screen("Spin(7)", "G2")
        assert result.classification == "odd-sphere(7)"
        assert result.alternatives == ["product-case-b(n=3, m=4)"]

    def test_circle(self):
        """Test SU(3) vs a circle."""
        assert onishchik_screen("SU(3)", "T1").classification == "product(n=5, m=2)"

    def test_fail(self):
        """Test SU(4) vs a circle fails the screen."""
        result = onishchik_screen("SU(4)", "T1")
        assert not result.passed
        assert result.classification == "fail"
        assert result.only_in_g == [3, 5, 7]


class TestCrossValidation:
    """Test the d_S and coinvariant cross-checks."""

    def test_formal_pair_agrees(self):
        """Test d_S = 2|N| for a formal pair."""
        report = cross_validate("SU(4)", "sub(roots=a1,a3)")
        assert report.ok
        assert report.d_s == 16
        assert report.n_order == 8
        assert report.coinvariant_d == 4

    def test_root_circle(self):
        """Test d_S = 4 for Sp(2) over a root circle."""
        report = cross_validate("Sp(2)", "circle(1,1)@C2std")
        assert report.ok
        assert report.d_s == 4

    @pytest.mark.slow
    def test_non_formal_pair_exceeds(self):
        """Test d_S > 2|N| for SU(5) / SU(2) x SU(3)."""
        report = cross_validate("SU(5)", "sub(roots=a1,a3,a4)")
        assert not report.formal
        assert report.d_s > 24
        assert report.ok

    def test_infinite_pi1_cannot_cross_validate(self):
        """Test cross-validation needs a finite d."""
        with pytest.raises(UnsupportedError):
            cross_validate("U(2)", "sub(roots=a1)")


DATA_DIR = Path(__file__).parent.parent / "data"
CORPORA = ["sphere_products.jsonl", "odd_spheres.jsonl", "odd_spheres_reducible.jsonl"]


def _v_spec(values):
    return "v=" + ",".join(str(x) for x in values)


@pytest.mark.slow
@pytest.mark.parametrize("name", CORPORA)
def test_weyl_translates_of_corpus_rows(name):
    """Ten random Weyl translates of every row's v normalize back to the same pair."""
    rng = random.Random(name)
    elements = {}
    for row in load_corpus(DATA_DIR / name):
        pair = pair_from_strings(row.group, row.subgroup)
        rs = pair.rs
        if row.group not in elements:
            elements[row.group] = weyl_group(rs).enumerated(10_000).elements
        column = QMatrix.from_columns([pair.v], rs.ambient_dim)
        base = classify(row.group, _v_spec(pair.v)) if rs.rank <= 3 else None
        for w in rng.sample(elements[row.group], min(10, len(elements[row.group]))):
            moved_spec = _v_spec((w @ column).column(0))
            moved = pair_from_strings(row.group, moved_spec)
            assert (moved.v, moved.delta_v, moved.hs_type) == (
                pair.v,
                pair.delta_v,
                pair.hs_type,
            ), (row.source, moved_spec)
            if base is not None:
                verdict = classify(row.group, moved_spec)
                assert (verdict.formal, verdict.branch, verdict.d, verdict.mn) == (
                    base.formal,
                    base.branch,
                    base.d,
                    base.mn,
                ), (row.source, moved_spec)


@pytest.mark.slow
@pytest.mark.parametrize("name", CORPORA)
def test_cross_validation_on_corpus_rows(name):
    """The d_S oracle and the coinvariant check agree on every row of rank at most 4."""
    for row in load_corpus(DATA_DIR / name):
        if build_root_system(parse_group_spec(row.group)).rank > 4:
            continue
        try:
            report = cross_validate(row.group, row.subgroup)
        except UnsupportedError:
            assert classify(row.group, row.subgroup).branch == Branch.PI1_INFINITE, row.source
            continue
        assert report.ok, row.source
        assert report.formal is row.expected_formal, row.source
