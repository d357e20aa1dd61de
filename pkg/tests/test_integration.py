"""Integration tests for isoformal components."""

import json
import tempfile
from pathlib import Path

import pytest

from isoformal.classifier import classify, cross_validate, onishchik_screen
from isoformal.config import EngineConfig
from isoformal.corpus import CorpusRow, dump_rows, load_corpus, verify_corpus
from isoformal.logging import RunLogger


class TestIntegration:
    """Integration tests combining multiple modules."""

    def test_classify_log_and_reload(self):
        """Test classify -> log -> reload history."""
        with tempfile.TemporaryDirectory() as temp_dir:
            logger = RunLogger(temp_dir)
            for group, subgroup in [("SU(4)", "sub(roots=a1,a3)"), ("SU(3)", "sub(roots=a1)")]:
                logger.log_classification(group, subgroup, classify(group, subgroup))
            logger.close()

            reloaded = RunLogger(temp_dir)
            stats = reloaded.get_run_statistics()
            assert stats["formal"] == 2
            assert stats["groups"] == ["SU(3)", "SU(4)"]
            reloaded.close()

    def test_screen_agrees_with_verdict(self):
        """Test (m, n) from the degree screen matches the classifier."""
        verdict = classify("SU(4)", "sub(roots=a1,a3)")
        screen = onishchik_screen("SU(4)", "A1xA1")
        assert (screen.m, screen.n) == verdict.mn

    def test_cross_validation_matches_verdict(self):
        """Test the dimension oracle confirms a formal verdict."""
        report = cross_validate("Sp(2)", "circle(1,1)@C2std")
        assert report.formal is classify("Sp(2)", "circle(1,1)@C2std").formal
        assert report.ok

    def test_corpus_round_trip_and_verify(self):
        """Test building rows from verdicts, writing them and verifying them."""
        pairs = [("SU(3)", "circle(1,-1)@A2std"), ("SU(3)", "circle(1,1)@A2std")]
        rows = []
        for group, subgroup in pairs:
            verdict = classify(group, subgroup)
            rows.append(
                CorpusRow(
                    group=group,
                    subgroup=subgroup,
                    expected_formal=verdict.formal,
                    expected_mn=verdict.mn,
                    h_group="T1",
                    source=f"sphere products: {group} / {subgroup}",
                )
            )

        with tempfile.TemporaryDirectory() as temp_dir:
            path = Path(temp_dir) / "rows.jsonl"
            path.write_text(dump_rows(rows))
            assert load_corpus(path) == rows

            report = verify_corpus(path, EngineConfig())
            assert report.passed
            assert [r.verdict.formal for r in report.results] == [True, False]

            logger = RunLogger(temp_dir)
            for result in report.results:
                logger.log_corpus_row(
                    result.row.source, result.row.group, result.row.subgroup, result.passed
                )
            logger.log_corpus_summary(report.paths, report.total, len(report.failed))
            exported = logger.export_history("export.json")
            logger.close()

            events = json.loads(exported.read_text())
            assert [e["event_type"] for e in events] == [
                "corpus_row",
                "corpus_row",
                "corpus_summary",
            ]

    @pytest.mark.slow
    def test_fast_path_matches_on_bundled_rows(self):
        """Test the -id shortcut never changes a bundled verdict."""
        data = Path(__file__).parent.parent / "data" / "odd_spheres.jsonl"
        slow = verify_corpus(data, EngineConfig())
        fast = verify_corpus(data, EngineConfig(fast_path=True))
        assert [r.verdict.formal for r in slow.results] == [r.verdict.formal for r in fast.results]
