"""Isotropy-formality verdicts for corank-one pairs."""

import logging
import time
from collections import Counter
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from .cohomology import CohomologyResult, cohomology_dim_d, coinvariant_cross_check, dimension_oracle
from .config import EngineConfig
from .errors import (
    ConsistencyError,
    DegreeCapError,
    GroupTooLargeError,
    UnsupportedError,
)
from .pairs import CorankOnePair, build_pair, parse_subgroup_spec
from .roots import build_root_system, parse_group_spec, weyl_degrees
from .weyl import ComponentGroupData, component_group_N, longest_word, parabolic_w0_negates_s

logger = logging.getLogger("isoformal.classifier")


class Branch(str, Enum):
    """Which step of the decision procedure settled the verdict."""

    PI1_INFINITE = "pi1-infinite"
    D_EQUALS_2 = "d-equals-2"
    D_EQUALS_4_N_STRICT = "d-equals-4-N-strict"
    D_EQUALS_4_N_EQUAL = "d-equals-4-N-equal"
    D_AT_LEAST_6 = "d-at-least-6"
    UNSUPPORTED = "unsupported"


FORMAL_BRANCHES = {Branch.PI1_INFINITE, Branch.D_EQUALS_2, Branch.D_EQUALS_4_N_STRICT}


class TraceStep(BaseModel):
    step: str
    detail: str
    data: Dict[str, Any] = Field(default_factory=dict)


class PairSummary(BaseModel):
    group: str
    subgroup: str
    v: List[int]
    delta_v: List[int]
    phi_hs_count: int
    hs_type: str
    hs_equals_h: Optional[bool] = None
    pi1_rank: int
    dim_ghs: int
    wv_order: int


class Verdict(BaseModel):
    """Outcome of classify(); serializes to and from JSON losslessly."""

    model_config = ConfigDict(use_enum_values=False)

    formal: bool
    branch: Branch
    d: Optional[Union[int, Literal["infinite"]]] = None
    n_order: Optional[int] = None
    wv_order: Optional[int] = None
    w0_negates_v: Optional[bool] = None
    w0s_in_wvs: Optional[bool] = None
    mn: Optional[Tuple[int, int]] = None
    rational_type: Optional[str] = None
    poincare: Optional[Dict[int, int]] = None
    pair: PairSummary
    reason: Optional[str] = None
    fast_path: bool = False
    elapsed: float = 0.0
    trace: List[TraceStep] = Field(default_factory=list)

    @property
    def unsupported(self) -> bool:
        return self.branch == Branch.UNSUPPORTED


def _summary(pair: CorankOnePair) -> PairSummary:
    return PairSummary.model_validate(pair.to_dict())


def _poincare(d: int, m: int, n: int) -> Tuple[Optional[str], Optional[Dict[int, int]]]:
    if d == 2:
        return f"S^{n}", {0: 1, n: 1}
    if d == 4:
        return f"S^{m} x S^{n}", {0: 1, m: 1, n: 1, m + n: 1}
    return None, None


def _fast_component_group(pair: CorankOnePair) -> Optional[ComponentGroupData]:
    """N from the parabolic longest element when w0 = -id on t."""
    rs = pair.rs
    if not rs.is_semisimple:
        return None
    w0, _ = longest_word(rs)
    t = rs.t_basis
    if w0 @ t != -t:
        return None
    member = parabolic_w0_negates_s(rs, pair.delta_v, pair.s_basis)
    wv_order = pair.wv_order
    return ComponentGroupData(
        n_order=wv_order if member else 2 * wv_order,
        wv_order=wv_order,
        w0_negates_v=True,
        w0s_in_wvs=member,
        method="fast-path",
    )


def _unsupported(
    pair: CorankOnePair, reason: str, trace: List[TraceStep], n_data: Optional[ComponentGroupData]
) -> Verdict:
    trace.append(TraceStep(step="decision", detail=f"unsupported: {reason}"))
    return Verdict(
        formal=False,
        branch=Branch.UNSUPPORTED,
        n_order=n_data.n_order if n_data else None,
        wv_order=n_data.wv_order if n_data else pair.wv_order,
        w0_negates_v=n_data.w0_negates_v if n_data else None,
        w0s_in_wvs=n_data.w0s_in_wvs if n_data else None,
        pair=_summary(pair),
        reason=reason,
        trace=trace,
    )


def classify_pair(pair: CorankOnePair, config: Optional[EngineConfig] = None) -> Verdict:
    """Decide isotropy formality of (G, S) for a built pair."""
    config = config or EngineConfig()
    start = time.monotonic()
    trace = [
        TraceStep(
            step="pair",
            detail=f"v={[int(x) for x in pair.v]}, H_S={pair.hs_type}, dim G/H_S={pair.dim_ghs}",
            data=pair.to_dict(),
        )
    ]

    if pair.pi1_rank > 0:
        trace.append(
            TraceStep(
                step="pi1",
                detail=f"pi_1(G/H_S) has rank {pair.pi1_rank}; formal",
                data={"pi1_rank": pair.pi1_rank},
            )
        )
        verdict = Verdict(
            formal=True,
            branch=Branch.PI1_INFINITE,
            d="infinite",
            wv_order=pair.wv_order,
            pair=_summary(pair),
            trace=trace,
        )
        verdict.elapsed = time.monotonic() - start
        return verdict
    trace.append(TraceStep(step="pi1", detail="pi_1(G/H_S) is finite", data={"pi1_rank": 0}))

    n_data: Optional[ComponentGroupData] = None
    used_fast_path = False
    try:
        if config.fast_path:
            n_data = _fast_component_group(pair)
            used_fast_path = n_data is not None
        if n_data is None:
            stabilizer = None if pair.rs.heavy else pair.stabilizer(config.weyl_cap)
            n_data = component_group_N(
                pair.rs, pair.v, pair.s_basis, config.weyl_cap, stabilizer
            )
        trace.append(
            TraceStep(
                step="component-group",
                detail=(
                    f"|W_v|={n_data.wv_order}, |N|={n_data.n_order}, "
                    f"w0 v = -v: {n_data.w0_negates_v}, w0|s in W_v|s: {n_data.w0s_in_wvs}"
                ),
                data=n_data.to_dict(),
            )
        )
        if pair.rs.heavy:
            raise UnsupportedError(
                f"E-type factor in {pair.rs.spec}: cohomology of G/H_S is not computed"
            )
        result: CohomologyResult = cohomology_dim_d(pair, config)
    except (UnsupportedError, GroupTooLargeError, DegreeCapError) as e:
        verdict = _unsupported(pair, str(e), trace, n_data)
        verdict.elapsed = time.monotonic() - start
        return verdict

    trace.append(
        TraceStep(
            step="cohomology",
            detail=f"H^even dims {dict(sorted(result.quotient.dims.items()))}, d={result.d}",
            data={"d": result.d, **result.quotient.to_dict()},
        )
    )

    mn: Optional[Tuple[int, int]] = None
    if result.d == 2:
        branch, formal = Branch.D_EQUALS_2, True
    elif result.d == 4:
        mn = (result.m, result.n)
        if n_data.w0_negates_v and not n_data.w0s_in_wvs:
            branch, formal = Branch.D_EQUALS_4_N_STRICT, True
        else:
            branch, formal = Branch.D_EQUALS_4_N_EQUAL, False
    elif result.d >= 6:
        branch, formal = Branch.D_AT_LEAST_6, False
    else:
        raise ConsistencyError(f"Impossible cohomology dimension d={result.d}")

    rational_type, poincare = _poincare(result.d, result.m, result.n)
    trace.append(TraceStep(step="decision", detail=f"{branch.value}: formal={formal}"))
    verdict = Verdict(
        formal=formal,
        branch=branch,
        d=result.d,
        n_order=n_data.n_order,
        wv_order=n_data.wv_order,
        w0_negates_v=n_data.w0_negates_v,
        w0s_in_wvs=n_data.w0s_in_wvs,
        mn=mn,
        rational_type=rational_type,
        poincare=poincare,
        pair=_summary(pair),
        fast_path=used_fast_path,
        trace=trace,
    )
    verdict.elapsed = time.monotonic() - start
    logger.debug("Verdict for %s / %s: %s", pair.group_text, pair.subgroup.text, branch.value)
    return verdict


def classify(group: str, subgroup: str, config: Optional[EngineConfig] = None) -> Verdict:
    """Parse both specs, build the pair and decide isotropy formality."""
    rs = build_root_system(parse_group_spec(group))
    pair = build_pair(rs, parse_subgroup_spec(subgroup), group_text=group)
    return classify_pair(pair, config)


class DegreeScreenResult(BaseModel):
    """Outcome of the odd-degree screen; passing is necessary, not sufficient."""

    classification: str
    passed: bool
    n: Optional[int] = None
    m: Optional[int] = None
    only_in_g: List[int]
    only_in_h: List[int]
    alternatives: List[str] = Field(default_factory=list)


def _odd_degrees(spec_text: str) -> List[int]:
    return [2 * d - 1 for d in weyl_degrees(parse_group_spec(spec_text))]


def onishchik_screen(g: str, h: str) -> DegreeScreenResult:
    """Compare odd generator degrees of H(G) and H(H) against sphere products."""
    g_degrees = Counter(_odd_degrees(g))
    h_degrees = Counter(_odd_degrees(h))
    only_g = sorted((g_degrees - h_degrees).elements())
    only_h = sorted((h_degrees - g_degrees).elements())

    if not only_h and len(only_g) == 1:
        a = only_g[0]
        alternatives = []
        m = (a + 1) // 2
        if m % 2 == 0 and h_degrees[m - 1] and g_degrees[m - 1]:
            alternatives.append(f"product-case-b(n={m - 1}, m={m})")
        return DegreeScreenResult(
            classification=f"odd-sphere({a})",
            passed=True,
            n=a,
            only_in_g=only_g,
            only_in_h=only_h,
            alternatives=alternatives,
        )

    if len(only_h) == 1 and len(only_g) == 2:
        m = only_h[0] + 1
        if m % 2 == 0 and (2 * m - 1) in only_g:
            rest = list(only_g)
            rest.remove(2 * m - 1)
            return DegreeScreenResult(
                classification=f"product(n={rest[0]}, m={m})",
                passed=True,
                n=rest[0],
                m=m,
                only_in_g=only_g,
                only_in_h=only_h,
            )

    return DegreeScreenResult(
        classification="fail", passed=False, only_in_g=only_g, only_in_h=only_h
    )


class CrossValidationReport(BaseModel):
    group: str
    subgroup: str
    formal: bool
    d: int
    d_s: int
    n_order: int
    coinvariant_d: int
    oracle_agrees: bool
    coinvariant_agrees: bool

    @property
    def ok(self) -> bool:
        return self.oracle_agrees and self.coinvariant_agrees


def cross_validate(group: str, subgroup: str, config: Optional[EngineConfig] = None) -> CrossValidationReport:
    """Check the verdict against d_S = 2|N| and d against the coinvariant algebra.

    Formal pairs must satisfy d_S == 2|N| exactly; non-formal ones d_S > 2|N|.
    """
    config = config or EngineConfig()
    pair = build_pair(
        build_root_system(parse_group_spec(group)), parse_subgroup_spec(subgroup), group
    )
    verdict = classify_pair(pair, config)
    if verdict.unsupported or verdict.d == "infinite" or verdict.n_order is None:
        raise UnsupportedError(
            f"Cross-validation needs a finite d and N; got branch {verdict.branch.value}"
        )
    assert isinstance(verdict.d, int)
    oracle = dimension_oracle(pair, config)
    if oracle.total is None:
        raise DegreeCapError(oracle.cap, "dimension oracle")
    d_s = 2 * oracle.total
    if verdict.formal:
        oracle_agrees = d_s == 2 * verdict.n_order
    else:
        oracle_agrees = d_s > 2 * verdict.n_order
    coinvariant_d = coinvariant_cross_check(pair, config)
    return CrossValidationReport(
        group=group,
        subgroup=subgroup,
        formal=verdict.formal,
        d=verdict.d,
        d_s=d_s,
        n_order=verdict.n_order,
        coinvariant_d=coinvariant_d,
        oracle_agrees=oracle_agrees,
        coinvariant_agrees=coinvariant_d == verdict.d,
    )
