"""TSV tables and matplotlib figures for the CLI report paths."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .formats import encode_graph6  # noqa: E402
from .solvers.audit import PARAMETERS, AuditResult  # noqa: E402
from .solvers.knn import KnnStudy, harmonic_cap  # noqa: E402

# PNG metadata without a version string keeps figures byte-stable across runs
_PNG_META = {"Software": None}


def write_tsv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if x is None else x for x in row])
    return path


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
    return path


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------


def audit_rows(result: AuditResult) -> tuple[list[str], list[list]]:
    header = ["index", "graph6", "n", "m"] + list(PARAMETERS) + ["violations"]
    rows = []
    for i, rep in enumerate(result.reports):
        g = rep.graph
        rows.append([i, encode_graph6(g).decode(), g.n, g.m]
                    + [rep.values.get(k) for k in PARAMETERS] + [";".join(rep.violations)])
    return header, rows


def plot_audit(result: AuditResult, path) -> Path:
    """Each parameter against the graph index, one marker series per parameter."""
    fig, ax = plt.subplots(figsize=(8, 4))
    xs = range(len(result.reports))
    for j, name in enumerate(PARAMETERS):
        ys = [rep.values.get(name) for rep in result.reports]
        pts = [(x, y + 0.06 * (j - len(PARAMETERS) / 2)) for x, y in zip(xs, ys) if y is not None]
        if pts:
            ax.plot(*zip(*pts), ".", markersize=3, label=name)
    ax.set_xlabel("graph index")
    ax.set_ylabel("value (jittered per parameter)")
    ax.legend(ncol=5, fontsize=7, loc="upper left")
    fig.tight_layout()
    return _save(fig, path)


# ---------------------------------------------------------------------------
# K_{n,n}
# ---------------------------------------------------------------------------


def knn_rows(studies: Sequence[KnnStudy]) -> tuple[list[str], list[list]]:
    header = ["n", "k", "lower_bound", "upper_bound", "schemes", "sigma_max", "sigma_bound", "violations"]
    rows = [[s.n, s.k, f"{s.lower_bound:.6f}", s.upper_bound, s.schemes, s.sigma_max,
             f"{s.sigma_bound:.6f}", len(s.violations)] for s in studies]
    return header, rows


def plot_knn(study: KnnStudy, path) -> Path:
    """Largest observed save size per same-side deletion index against the cap (k-1)/(k-i)."""
    fig, ax = plt.subplots(figsize=(5, 3.5))
    k = study.k
    idx = list(range(k))
    ax.plot(idx, [float(harmonic_cap(k, i)) for i in idx], "k--", label="cap (k-1)/(k-i)")
    for side, marker in (("A", "o"), ("B", "s")):
        prof = study.profile.get(side, {})
        if prof:
            ax.plot(sorted(prof), [prof[i] for i in sorted(prof)], marker, label=f"side {side}")
    ax.set_xlabel("earlier same-side deletions i")
    ax.set_ylabel("|sv|")
    ax.set_title(f"K_{{{study.n},{study.n}}}, k={k}")
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


# ---------------------------------------------------------------------------
# scheme pipeline
# ---------------------------------------------------------------------------


def _phase_list(trace_payload: dict) -> list[dict]:
    if "phases" in trace_payload:
        return trace_payload["phases"]
    out = []
    for entry in trace_payload.get("bipartite", []):
        inner = entry.get("trace") or {}
        for ph in inner.get("phases", []):
            out.append(dict(ph, phase=f"L{entry['level']}:{ph['phase']}"))
    return out


def pipeline_rows(trace_payload: dict) -> tuple[list[str], list[list]]:
    header = ["phase", "deleted", "min_tokens"]
    return header, [[p["phase"], p["deleted"], p["min_tokens"]] for p in _phase_list(trace_payload)]


def plot_pipeline(trace_payload: dict, path) -> Path:
    """Minimum token count among surviving vertices after each phase."""
    phases = _phase_list(trace_payload)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    names = [p["phase"] for p in phases]
    vals = [p["min_tokens"] if p["min_tokens"] is not None else 0 for p in phases]
    ax.bar(range(len(names)), vals, color="tab:blue")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("min tokens after phase")
    fig.tight_layout()
    return _save(fig, path)
