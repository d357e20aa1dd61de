"""Main CLI entry point for isoformal."""

import json
import logging
import sys
from typing import Any, Dict, List, NoReturn, Optional, Tuple

import click
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .classifier import Verdict, classify, cross_validate, onishchik_screen
from .config import EngineConfig, load_config
from .corpus import CorpusReport, filter_rows, load_corpus, verify_corpus
from .errors import (
    ConsistencyError,
    DegreeCapError,
    GroupTooLargeError,
    IsoformalError,
    SpecParseError,
    UnsupportedError,
)
from .invariants import basic_invariants
from .logging import RunLogger
from .pairs import pair_from_strings
from .roots import build_root_system, parse_group_spec, weyl_degrees
from .weyl import longest_word, weyl_group

console = Console()
error_console = Console(stderr=True)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_UNSUPPORTED = 3


def exit_code_for(error: BaseException) -> int:
    if isinstance(error, (GroupTooLargeError, DegreeCapError, UnsupportedError)):
        return EXIT_UNSUPPORTED
    if isinstance(error, ConsistencyError):
        return EXIT_MISMATCH
    if isinstance(error, (ValueError, OSError)):
        return EXIT_INPUT
    return EXIT_MISMATCH


def _fail(ctx: click.Context, error: BaseException) -> NoReturn:
    error_console.print(f"[red]Error:[/red] {str(error)}")
    if isinstance(error, SpecParseError):
        error_console.print(error.caret(), markup=False, highlight=False)
    run_logger: Optional[RunLogger] = ctx.obj.get("logger") if ctx.obj else None
    if run_logger and isinstance(error, (GroupTooLargeError, DegreeCapError)):
        run_logger.log_cap_exceeded(str(error), getattr(error, "cap", 0))
    sys.exit(exit_code_for(error))


def _echo_json(document: Any) -> None:
    click.echo(json.dumps(document, indent=2, default=str))


def _mark(flag: Optional[bool]) -> str:
    if flag is None:
        return "-"
    return "[green]✓[/green]" if flag else "[red]✗[/red]"


@click.group()
@click.option("--config", "config_path", help="Path to a YAML config file")
@click.option("--log-dir", help="Directory for logs and run history")
@click.option("--no-history", is_flag=True, help="Do not write logs or run history")
@click.option("--verbose", "-v", is_flag=True, help="Debug-level logging")
@click.version_option(version=__version__, prog_name="isoformal")
@click.pass_context
def main(
    ctx: click.Context,
    config_path: Optional[str],
    log_dir: Optional[str],
    no_history: bool,
    verbose: bool,
) -> None:
    """isoformal: isotropy formality of corank-one pairs (G, K)."""
    ctx.ensure_object(dict)
    try:
        config = load_config(config_path)
        if log_dir:
            config = config.with_overrides(log_dir=log_dir)
    except IsoformalError as e:
        _fail(ctx, e)

    ctx.obj["config"] = config
    ctx.obj["logger"] = None
    if verbose:
        logging.getLogger("isoformal").setLevel(logging.DEBUG)
    if not no_history:
        run_logger = RunLogger(config.log_dir, "DEBUG" if verbose else "INFO")
        ctx.obj["logger"] = run_logger
        ctx.call_on_close(run_logger.close)


def _verdict_panel(verdict: Verdict) -> Panel:
    pair = verdict.pair
    lines = [
        f"[bold]{pair.group}[/bold] / [bold]{pair.subgroup}[/bold]",
        f"Formal: {_mark(None if verdict.unsupported else verdict.formal)}  "
        f"[dim]({verdict.branch.value})[/dim]",
        f"v = {pair.v}   Delta_v = {pair.delta_v}   H_S = {pair.hs_type}",
        f"dim G/H_S = {pair.dim_ghs}   pi_1 rank = {pair.pi1_rank}",
    ]
    if verdict.d is not None:
        lines.append(f"d = {verdict.d}")
    if verdict.n_order is not None:
        lines.append(f"|W_v| = {verdict.wv_order}   |N| = {verdict.n_order}")
    if verdict.w0_negates_v is not None:
        lines.append(
            f"w0 v = -v: {_mark(verdict.w0_negates_v)}   w0|s in W_v|s: {_mark(verdict.w0s_in_wvs)}"
        )
    if verdict.mn:
        lines.append(f"(m, n) = {verdict.mn}")
    if verdict.rational_type:
        lines.append(f"G/H_S ~ {verdict.rational_type} rationally")
    if verdict.fast_path:
        lines.append("[dim]decided by the -id fast path[/dim]")
    if verdict.reason:
        lines.append(f"[yellow]{verdict.reason}[/yellow]")
    return Panel.fit("\n".join(lines), title="[bold white]Verdict[/bold white]", border_style="cyan")


def _trace_table(verdict: Verdict) -> Table:
    table = Table(title="Trace")
    table.add_column("Step", style="cyan")
    table.add_column("Detail")
    for step in verdict.trace:
        table.add_row(step.step, step.detail)
    return table


@main.command("classify")
@click.option("--group", "-g", required=True, help="Group spec, e.g. SU(4) or A2xC1")
@click.option("--subgroup", "-s", required=True, help="Subgroup spec, e.g. sub(roots=a1,a3)")
@click.option("--json", "as_json", is_flag=True, help="Print the verdict as JSON")
@click.option("--trace", is_flag=True, help="Show every decision step")
@click.option("--fast-path", is_flag=True, help="Use the w0 = -id shortcut when it applies")
@click.option("--weyl-cap", type=int, help="Weyl group enumeration cap")
@click.option("--degree-cap", type=int, help="Polynomial degree cap for graded quotients")
@click.option("--cross-validate", "run_cross_validation", is_flag=True, help="Also run the dimension oracle")
@click.pass_context
def classify_command(
    ctx: click.Context,
    group: str,
    subgroup: str,
    as_json: bool,
    trace: bool,
    fast_path: bool,
    weyl_cap: Optional[int],
    degree_cap: Optional[int],
    run_cross_validation: bool,
) -> None:
    """Decide whether (G, K) is isotropy-formal."""
    run_logger: Optional[RunLogger] = ctx.obj["logger"]
    try:
        config = ctx.obj["config"].with_overrides(
            weyl_cap=weyl_cap, degree_cap=degree_cap, fast_path=True if fast_path else None
        )
        verdict = classify(group, subgroup, config)
    except IsoformalError as e:
        _fail(ctx, e)

    if run_logger:
        run_logger.log_classification(group, subgroup, verdict)

    report = None
    if run_cross_validation and not verdict.unsupported and verdict.d != "infinite":
        try:
            report = cross_validate(group, subgroup, config)
        except IsoformalError as e:
            _fail(ctx, e)
        if run_logger:
            run_logger.log_cross_validation(
                group,
                subgroup,
                report.d,
                report.d_s,
                report.n_order,
                report.coinvariant_d,
                report.ok,
            )

    if as_json:
        document: Dict[str, Any] = verdict.model_dump(mode="json")
        if report is not None:
            document = {"verdict": document, "cross_validation": report.model_dump(mode="json")}
        _echo_json(document)
    else:
        console.print(_verdict_panel(verdict))
        if trace:
            console.print(_trace_table(verdict))
        if report is not None:
            console.print(
                f"{_mark(report.ok)} Cross-validation: d_S = {report.d_s}, 2|N| = "
                f"{2 * report.n_order}, coinvariant d = {report.coinvariant_d}"
            )

    if verdict.unsupported:
        sys.exit(EXIT_UNSUPPORTED)
    if report is not None and not report.ok:
        sys.exit(EXIT_MISMATCH)


@main.group()
def corpus() -> None:
    """Verify or list classification corpora."""


def _report_table(report: CorpusReport) -> Table:
    table = Table(title="Corpus verification")
    table.add_column("#", justify="right")
    table.add_column("Source")
    table.add_column("Group")
    table.add_column("Subgroup")
    table.add_column("Expected")
    table.add_column("Got")
    table.add_column("Status")
    for result in report.results:
        got = "-"
        if result.verdict is not None:
            got = "unsupported" if result.verdict.unsupported else str(result.verdict.formal)
        table.add_row(
            str(result.index + 1),
            result.row.source,
            result.row.group,
            result.row.subgroup,
            str(result.row.expected_formal),
            got,
            _mark(result.passed),
        )
    return table


@corpus.command("verify")
@click.argument("files", nargs=-1, required=True)
@click.option("--filter", "-f", "pattern", help="Only rows whose specs or source contain this")
@click.option("--jobs", "-j", type=int, help="Worker processes")
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON")
@click.pass_context
def corpus_verify(
    ctx: click.Context, files: Tuple[str, ...], pattern: Optional[str], jobs: Optional[int], as_json: bool
) -> None:
    """Classify every corpus row and compare with its expectations."""
    run_logger: Optional[RunLogger] = ctx.obj["logger"]
    try:
        config = ctx.obj["config"].with_overrides(jobs=jobs)
        report = verify_corpus(list(files), config, pattern)
    except IsoformalError as e:
        _fail(ctx, e)

    if run_logger:
        for result in report.results:
            run_logger.log_corpus_row(
                result.row.source,
                result.row.group,
                result.row.subgroup,
                result.passed,
                result.diffs,
                result.elapsed,
            )
        run_logger.log_corpus_summary(report.paths, report.total, len(report.failed))

    if as_json:
        _echo_json(
            {
                "summary": report.summary(),
                "rows": [
                    {
                        "index": r.index,
                        "source": r.row.source,
                        "group": r.row.group,
                        "subgroup": r.row.subgroup,
                        "passed": r.passed,
                        "diffs": r.diffs,
                        "formal": r.verdict.formal if r.verdict else None,
                        "branch": r.verdict.branch.value if r.verdict else None,
                    }
                    for r in report.results
                ],
            }
        )
    else:
        if report.results:
            console.print(_report_table(report))
        for result in report.failed:
            console.print(f"[red]✗[/red] {result.row.source}: {'; '.join(result.diffs)}")
        failed = len(report.failed)
        mark = "[green]✓[/green]" if not failed else "[red]✗[/red]"
        console.print(
            f"{mark} {report.total - failed}/{report.total} rows passed in {report.elapsed:.1f}s"
        )

    if not report.passed:
        sys.exit(EXIT_MISMATCH)


@corpus.command("list")
@click.argument("file")
@click.option("--filter", "-f", "pattern", help="Only rows whose specs or source contain this")
@click.pass_context
def corpus_list(ctx: click.Context, file: str, pattern: Optional[str]) -> None:
    """Show the rows of a corpus file."""
    try:
        rows = filter_rows(load_corpus(file), pattern)
    except IsoformalError as e:
        _fail(ctx, e)

    table = Table(title=f"Corpus {file}")
    table.add_column("#", justify="right")
    table.add_column("Group")
    table.add_column("Subgroup")
    table.add_column("Formal")
    table.add_column("(m, n)")
    table.add_column("Source")
    for index, row in rows:
        table.add_row(
            str(index + 1),
            row.group,
            row.subgroup,
            _mark(row.expected_formal),
            str(tuple(row.expected_mn)) if row.expected_mn else "-",
            row.source,
        )
    console.print(table)
    console.print(f"[green]✓[/green] {len(rows)} rows")


@main.command()
@click.option("--g", "group", required=True, help="Group spec for G")
@click.option("--h", "subgroup", required=True, help="Group spec for H")
@click.option("--json", "as_json", is_flag=True, help="Print the result as JSON")
@click.pass_context
def degrees(ctx: click.Context, group: str, subgroup: str, as_json: bool) -> None:
    """Screen (G, H) by the odd degrees of their rational cohomology."""
    try:
        result = onishchik_screen(group, subgroup)
        g_degrees = [2 * d - 1 for d in weyl_degrees(parse_group_spec(group))]
        h_degrees = [2 * d - 1 for d in weyl_degrees(parse_group_spec(subgroup))]
    except IsoformalError as e:
        _fail(ctx, e)

    if as_json:
        _echo_json({"deg_g": g_degrees, "deg_h": h_degrees, **result.model_dump(mode="json")})
        return

    table = Table(title="Odd generator degrees")
    table.add_column("Group")
    table.add_column("Degrees")
    table.add_row(group, ", ".join(map(str, g_degrees)))
    table.add_row(subgroup, ", ".join(map(str, h_degrees)))
    console.print(table)
    console.print(f"{_mark(result.passed)} {result.classification}")
    for alternative in result.alternatives:
        console.print(f"  [dim]also consistent with {alternative}[/dim]")
    if result.passed:
        console.print("[dim]Passing the screen is necessary, not sufficient.[/dim]")


@main.command()
@click.option("--group", "-g", required=True, help="Group spec")
@click.option("--order", "enumerate_order", is_flag=True, help="Enumerate W and count it")
@click.option("--longest-word", "show_longest_word", is_flag=True, help="Show a reduced word for w0")
@click.option("--weyl-cap", type=int, help="Weyl group enumeration cap")
@click.pass_context
def weyl(
    ctx: click.Context,
    group: str,
    enumerate_order: bool,
    show_longest_word: bool,
    weyl_cap: Optional[int],
) -> None:
    """Show the Weyl group of G."""
    try:
        config: EngineConfig = ctx.obj["config"].with_overrides(weyl_cap=weyl_cap)
        rs = build_root_system(parse_group_spec(group))
        table = Table(title=f"Weyl group of {rs.spec.canonical()}")
        table.add_column("Property", style="cyan")
        table.add_column("Value")
        table.add_row("Rank", str(rs.rank))
        table.add_row("Positive roots", str(len(rs.positive_roots())))
        table.add_row("Degrees", ", ".join(map(str, rs.degrees)))
        table.add_row("|W| (product of degrees)", str(rs.weyl_order()))
        if enumerate_order:
            enumerated = weyl_group(rs).enumerated(config.weyl_cap)
            table.add_row("|W| (enumerated)", str(enumerated.order))
        if show_longest_word:
            w0, word = longest_word(rs)
            table.add_row("w0", " ".join(f"s{i + 1}" for i in word) or "1")
            table.add_row("Length", str(len(word)))
            table.add_row("w0 = -id on t", _mark(w0 @ rs.t_basis == -rs.t_basis))
    except IsoformalError as e:
        _fail(ctx, e)
    console.print(table)


@main.command()
@click.option("--group", "-g", required=True, help="Group spec")
@click.pass_context
def invariants(ctx: click.Context, group: str) -> None:
    """List basic invariants of the Weyl group of G."""
    try:
        config: EngineConfig = ctx.obj["config"]
        rs = build_root_system(parse_group_spec(group))
        invariant_set = basic_invariants(rs, config.seed)
    except IsoformalError as e:
        _fail(ctx, e)

    table = Table(title=f"Basic invariants of {rs.spec.canonical()}")
    table.add_column("#", justify="right")
    table.add_column("Degree", justify="right")
    table.add_column("Kind")
    table.add_column("Description")
    for i, invariant in enumerate(invariant_set.generators, 1):
        table.add_row(str(i), str(invariant.degree), invariant.kind, invariant.label or "-")
    console.print(table)
    console.print(f"[green]✓[/green] Degrees {invariant_set.degrees} (product {rs.weyl_order()})")


@main.command()
@click.option("--group", "-g", required=True, help="Group spec")
@click.option("--subgroup", "-s", required=True, help="Subgroup spec")
@click.option("--json", "as_json", is_flag=True, help="Print the pair as JSON")
@click.pass_context
def pair(ctx: click.Context, group: str, subgroup: str, as_json: bool) -> None:
    """Structural data of the pair (G, H_S) without any cohomology."""
    try:
        built = pair_from_strings(group, subgroup)
    except IsoformalError as e:
        _fail(ctx, e)

    data = built.to_dict()
    if as_json:
        _echo_json(data)
        return
    table = Table(title="Corank-one pair")
    table.add_column("Field", style="cyan")
    table.add_column("Value")
    rows: List[Tuple[str, Any]] = [
        ("Group", data["group"]),
        ("Subgroup", data["subgroup"]),
        ("v", data["v"]),
        ("Delta_v", data["delta_v"] or "-"),
        ("H_S type", data["hs_type"]),
        ("Roots of H_S", data["phi_hs_count"]),
        ("H_S = H", "-" if data["hs_equals_h"] is None else data["hs_equals_h"]),
        ("|W_v|", data["wv_order"]),
        ("pi_1 rank", data["pi1_rank"]),
        ("dim G/H_S", data["dim_ghs"]),
    ]
    for name, value in rows:
        table.add_row(name, str(value))
    console.print(table)


if __name__ == "__main__":
    main()
