"""Per-graph parameter reports and the inequality-chain audit."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..errors import CapExceeded, VerificationFailed
from ..graph import Graph, chromatic_number_exact, strict_degeneracy
from ..orientations import at_number, is_alon_tarsi_orientation
from ..tokens import verify_removal_scheme, verify_sd3_sequence
from . import choosability, dp_painting, painting, removal, sd3 as sd3_solver

PARAMETERS = ("chi", "ch", "chi_P", "chi_DPP", "AT", "sd3", "rem", "sd4", "sd")

# (smaller, larger): both inequality chains, removability placed
# between sd3 and sd4, and the trivial ends
CHAIN_PAIRS = (
    ("chi", "ch"),
    ("ch", "chi_P"),
    ("chi_P", "AT"),
    ("AT", "sd3"),
    ("sd3", "sd4"),
    ("sd4", "sd"),
    ("chi_P", "chi_DPP"),
    ("chi_DPP", "sd3"),
    ("sd3", "rem"),
    ("rem", "sd4"),
)


@dataclass
class ParameterReport:
    graph: Graph
    values: dict[str, int | None] = field(default_factory=dict)
    status: dict[str, str] = field(default_factory=dict)
    brackets: dict[str, tuple[int, int]] = field(default_factory=dict)
    witnesses: dict[str, dict] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    def to_payload(self) -> dict:
        return {
            "n": self.graph.n,
            "m": self.graph.m,
            "values": {k: self.values.get(k) for k in PARAMETERS},
            "status": {k: self.status.get(k, "absent") for k in PARAMETERS},
            "brackets": {k: list(v) for k, v in self.brackets.items()},
            "witnesses": self.witnesses,
            "violations": list(self.violations),
        }


def check_chains(report: ParameterReport) -> list[str]:
    """Violated inequalities among the computed values (and brackets)."""
    out = []
    vals = report.values
    for a, b in CHAIN_PAIRS:
        x, y = vals.get(a), vals.get(b)
        if x is None and a in report.brackets:
            x = report.brackets[a][0]
        if y is None and b in report.brackets:
            y = report.brackets[b][1]
        if x is not None and y is not None and x > y:
            out.append(f"{a}={x} > {b}={y}")
    for name, (lo, hi) in report.brackets.items():
        if lo > hi:
            out.append(f"{name} bracket [{lo}, {hi}] is empty")
        v = vals.get(name)
        if v is not None and not lo <= v <= hi:
            out.append(f"{name}={v} outside bracket [{lo}, {hi}]")
    return out


def _try(report: ParameterReport, name: str, fn):
    try:
        value = fn()
    except CapExceeded as exc:
        report.values[name] = None
        report.status[name] = f"capped: {exc}"
        return None
    report.values[name] = value
    report.status[name] = "computed"
    return value


def parameter_report(
    g: Graph,
    dpp_exact_max: int = 4,
    dpp_budget: int = 200_000,
    witnesses: bool = True,
) -> ParameterReport:
    """Compute every parameter of ``g``; capped entries stay absent, never guessed.

    DP-paintability is exact up to ``dpp_exact_max`` vertices. Above that the
    bracket [chi_P, sd3] is recorded and an exact value is attempted under
    ``dpp_budget`` covers.
    """
    rep = ParameterReport(g)
    rep.values["sd"] = strict_degeneracy(g)
    rep.status["sd"] = "computed"
    _try(rep, "chi", lambda: chromatic_number_exact(g))
    _try(rep, "ch", lambda: choosability.ch(g))
    _try(rep, "chi_P", lambda: painting.paintability(g))
    orient = None

    def at_value():
        nonlocal orient
        k, orient = at_number(g)
        return k

    _try(rep, "AT", at_value)
    if witnesses and orient is not None:
        rep.witnesses["AT"] = {"arcs": [list(a) for a in orient.arcs], "alon_tarsi": is_alon_tarsi_orientation(orient)}
    s3 = _try(rep, "sd3", lambda: sd3_solver.sd3(g))
    _try(rep, "rem", lambda: removal.removability_number(g))
    _try(rep, "sd4", lambda: removal.removability_number(g, restricted=True))

    token_cap = max(dp_painting.MAX_TOKEN, rep.values["sd"])
    if g.n <= dpp_exact_max:
        _try(rep, "chi_DPP", lambda: dp_painting.dp_paintability(g, token_cap=token_cap))
    else:
        lo, hi = rep.values.get("chi_P"), s3
        if lo is not None and hi is not None:
            rep.brackets["chi_DPP"] = (lo, hi)
        value = _try(rep, "chi_DPP", lambda: dp_painting.dp_paintability(
            g, cap=g.n, token_cap=token_cap, budget=dpp_budget))
        if value is None:
            rep.status["chi_DPP"] = "bracket"

    if witnesses and g.n:
        _attach_witnesses(g, rep)
    rep.violations = check_chains(rep)
    return rep


def _attach_witnesses(g: Graph, rep: ParameterReport) -> None:
    n = g.n
    k = rep.values.get("sd3")
    if k:
        seq = sd3_solver.is_sd3_degenerate(g, [k] * n)
        if not verify_sd3_sequence(g, [k] * n, seq):
            raise VerificationFailed("sd3 witness rejected")
        rep.witnesses["sd3"] = seq.to_payload([k] * n)
    for name, restricted in (("rem", False), ("sd4", True)):
        k = rep.values.get(name)
        if k:
            scheme = removal.removability(g, [k] * n, restricted)
            if not verify_removal_scheme(g, [k] * n, scheme, restricted):
                raise VerificationFailed(f"{name} witness rejected")
            rep.witnesses[name] = scheme.to_payload([k] * n, restricted)
    k = rep.values.get("ch")
    if k and k > 1:
        bad = choosability.is_f_choosable(g, [k - 1] * n).bad_lists
        rep.witnesses["ch"] = {"bad_lists": [list(x) for x in bad], "size": k - 1}


@dataclass
class AuditResult:
    reports: list[ParameterReport]

    @property
    def violations(self) -> list[tuple[int, str]]:
        return [(i, v) for i, r in enumerate(self.reports) for v in r.violations]


def chain_audit(graphs: Iterable[Graph], **kwargs) -> AuditResult:
    """Reports for every graph in order; violations are collected per report."""
    return AuditResult([parameter_report(g, **kwargs) for g in graphs])
