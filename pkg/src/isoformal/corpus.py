"""Classification corpora: JSON-lines rows with expected verdicts."""

import json
import logging
import time
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, ValidationError

from .classifier import Verdict, classify, onishchik_screen
from .config import EngineConfig
from .errors import CorpusError, IsoformalError, SpecParseError
from .pairs import parse_subgroup_spec
from .roots import parse_group_spec

logger = logging.getLogger("isoformal.corpus")

# factor subgroup marker for equal-rank factors, which are always formal
EQUAL_RANK = "equal-rank"


class CorpusRow(BaseModel):
    """One expected classification, cited to its source."""

    group: str
    subgroup: str
    expected_formal: bool
    expected_hs_equals_h: Optional[bool] = None
    expected_mn: Optional[Tuple[int, int]] = None
    expected_hs_type: Optional[str] = None
    # H as a group spec, for the odd-degree screen
    h_group: Optional[str] = None
    # (group, subgroup) per factor of a product pair
    factors: List[Tuple[str, str]] = Field(default_factory=list)
    source: str = Field(min_length=1)

    def matches(self, pattern: str) -> bool:
        needle = pattern.lower()
        return any(needle in field.lower() for field in (self.group, self.subgroup, self.source))


class RowResult(BaseModel):
    index: int
    row: CorpusRow
    passed: bool
    diffs: List[str] = Field(default_factory=list)
    verdict: Optional[Verdict] = None
    error: Optional[str] = None
    elapsed: float = 0.0


class CorpusReport(BaseModel):
    paths: List[str]
    results: List[RowResult] = Field(default_factory=list)
    elapsed: float = 0.0

    @property
    def total(self) -> int:
        return len(self.results)

    @property
    def failed(self) -> List[RowResult]:
        return [r for r in self.results if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.failed

    def summary(self) -> Dict[str, Any]:
        return {
            "paths": self.paths,
            "total": self.total,
            "passed": self.total - len(self.failed),
            "failed": len(self.failed),
            "elapsed": round(self.elapsed, 3),
        }


def _check_specs(row: CorpusRow) -> None:
    parse_group_spec(row.group)
    parse_subgroup_spec(row.subgroup)
    if row.h_group:
        parse_group_spec(row.h_group)
    for group, subgroup in row.factors:
        parse_group_spec(group)
        if subgroup != EQUAL_RANK:
            parse_subgroup_spec(subgroup)


def load_corpus(file_path: Union[str, Path]) -> List[CorpusRow]:
    """Load rows from a JSON-lines file; blank lines and # comments are skipped."""
    path = Path(file_path)
    if not path.exists():
        raise CorpusError(f"Corpus file not found: {file_path}")

    with open(path, "r", encoding="utf-8") as f:
        lines = f.readlines()

    rows = []
    for line_num, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            row = CorpusRow.model_validate(json.loads(line))
            _check_specs(row)
        except json.JSONDecodeError as e:
            raise CorpusError(f"Error parsing line {line_num} of {path}: {e}") from e
        except ValidationError as e:
            raise CorpusError(f"Invalid row at line {line_num} of {path}: {e}") from e
        except SpecParseError as e:
            raise CorpusError(f"Bad spec at line {line_num} of {path}: {e}") from e
        rows.append(row)
    return rows


def filter_rows(rows: Sequence[CorpusRow], pattern: Optional[str]) -> List[Tuple[int, CorpusRow]]:
    """Pair each row with its position, keeping those that match ``pattern``."""
    return [(i, row) for i, row in enumerate(rows) if not pattern or row.matches(pattern)]


def _compare(row: CorpusRow, verdict: Verdict, config: EngineConfig) -> List[str]:
    if verdict.unsupported:
        return [f"unsupported: {verdict.reason}"]

    diffs = []
    if verdict.formal != row.expected_formal:
        diffs.append(f"formal: expected {row.expected_formal}, got {verdict.formal}")
    if row.expected_hs_equals_h is not None and verdict.pair.hs_equals_h != row.expected_hs_equals_h:
        diffs.append(
            f"H_S = H: expected {row.expected_hs_equals_h}, got {verdict.pair.hs_equals_h}"
        )
    if row.expected_mn is not None and verdict.mn != tuple(row.expected_mn):
        diffs.append(f"(m, n): expected {tuple(row.expected_mn)}, got {verdict.mn}")
    if row.expected_hs_type is not None and verdict.pair.hs_type != row.expected_hs_type:
        diffs.append(f"H_S type: expected {row.expected_hs_type}, got {verdict.pair.hs_type}")

    if row.factors:
        factor_formal = all(
            s == EQUAL_RANK or classify(g, s, config).formal for g, s in row.factors
        )
        if factor_formal != verdict.formal:
            diffs.append(f"product: factors give formal={factor_formal}, pair gives {verdict.formal}")

    if row.h_group:
        screen = onishchik_screen(row.group, row.h_group)
        if not screen.passed:
            diffs.append(f"degree screen failed for {row.group} / {row.h_group}")
        elif row.expected_mn is not None and screen.m is not None:
            m, n = row.expected_mn
            if (screen.m, screen.n) != (m, n):
                diffs.append(f"degree screen gives (m, n) = ({screen.m}, {screen.n})")
    return diffs


def verify_row(index: int, row: CorpusRow, config: EngineConfig) -> RowResult:
    """Classify one row and compare it with its expectations."""
    start = time.monotonic()
    try:
        verdict = classify(row.group, row.subgroup, config)
        diffs = _compare(row, verdict, config)
    except IsoformalError as e:
        logger.debug("Row %d (%s) raised %s", index, row.source, e)
        return RowResult(
            index=index,
            row=row,
            passed=False,
            diffs=[str(e)],
            error=type(e).__name__,
            elapsed=time.monotonic() - start,
        )
    return RowResult(
        index=index,
        row=row,
        passed=not diffs,
        diffs=diffs,
        verdict=verdict,
        elapsed=time.monotonic() - start,
    )


def _verify_task(task: Tuple[int, CorpusRow, EngineConfig]) -> RowResult:
    return verify_row(*task)


def verify_corpus(
    paths: Union[str, Path, Sequence[Union[str, Path]]],
    config: Optional[EngineConfig] = None,
    pattern: Optional[str] = None,
) -> CorpusReport:
    """Verify every (matching) row of one or more corpus files.

    Rows run in a process pool when ``config.jobs`` > 1; results always come
    back in file order.
    """
    config = config or EngineConfig()
    if isinstance(paths, (str, Path)):
        paths = [paths]

    tasks: List[Tuple[int, CorpusRow, EngineConfig]] = []
    for path in paths:
        for _, row in filter_rows(load_corpus(path), pattern):
            tasks.append((len(tasks), row, config))

    start = time.monotonic()
    if config.jobs > 1 and len(tasks) > 1:
        with Pool(min(config.jobs, len(tasks))) as pool:
            results = pool.map(_verify_task, tasks)
    else:
        results = [_verify_task(task) for task in tasks]

    report = CorpusReport(
        paths=[str(p) for p in paths], results=results, elapsed=time.monotonic() - start
    )
    logger.info(
        "Verified %d rows from %s: %d failed", report.total, report.paths, len(report.failed)
    )
    return report


def dump_rows(rows: Sequence[CorpusRow]) -> str:
    return "\n".join(json.dumps(row.model_dump(exclude_defaults=True)) for row in rows) + "\n"
