"""Command line entry point: parameter reports, audits, witnesses and constructions.

Exit codes: 0 success (including a reported construction failure), 1 usage,
2 verification reject or audit violation, 3 cap exceeded, 4 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import (
    CapExceeded,
    ConstantInput,
    DegreeExceeds,
    HashMismatch,
    ParseError,
    PipelineFailed,
    SchemaViolation,
)
from .formats import (
    WitnessDocument,
    decode_edge_list,
    decode_witness,
    encode_edge_list,
    encode_graph6,
    encode_witness,
    load_graph,
    read_graph6_corpus,
    write_graph6_corpus,
)
from .graph import Graph, proper_coloring
from .orientations import (
    Orientation,
    has_directed_odd_cycle,
    is_alon_tarsi_orientation,
    odd_cycle_free_bounded_orientation,
    outdegree_bound,
)
from .tokens import RemovalScheme, Sd3Sequence, build_nonconstant_gadget, verify_removal_scheme, verify_sd3_sequence

EXIT_OK, EXIT_USAGE, EXIT_REJECT, EXIT_CAP, EXIT_IO = 0, 1, 2, 3, 4
AT_CLAIM_MAX_EDGES = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _graph(args) -> Graph:
    return load_graph(args.graph, args.format)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"expected a comma separated list of integers, got {text!r}") from None


def _overrides(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--override-const expects name=value, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError:
            raise UsageError(f"override {name} is not a number") from None
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_params(args) -> int:
    from .solvers.audit import PARAMETERS, parameter_report

    g = _graph(args)
    rep = parameter_report(g, dpp_budget=args.dpp_budget, witnesses=not args.no_witnesses)
    doc = WitnessDocument.for_graph("parameter-report", g, rep.to_payload())
    _emit(encode_witness(doc), args.output)
    if args.table:
        from .reporting import write_tsv

        write_tsv(args.table, ["parameter", "value", "status"],
                  [[k, rep.values.get(k), rep.status.get(k, "absent")] for k in PARAMETERS])
    if any(s.startswith("capped") for s in rep.status.values()):
        return EXIT_CAP
    return EXIT_REJECT if rep.violations else EXIT_OK


def _audit_one(item):
    g, kwargs = item
    from .solvers.audit import parameter_report

    return parameter_report(g, **kwargs)


def cmd_audit(args) -> int:
    from .solvers.audit import AuditResult

    graphs = read_graph6_corpus(Path(args.corpus).read_bytes())
    kwargs = {"witnesses": args.witnesses, "dpp_budget": args.dpp_budget}
    items = [(g, kwargs) for g in graphs]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            reports = list(pool.map(_audit_one, items, chunksize=8))
    else:
        reports = [_audit_one(it) for it in items]
    result = AuditResult(reports)
    summary = {
        "graphs": len(reports),
        "violations": [[i, v] for i, v in result.violations],
        "capped": [[i, k] for i, r in enumerate(reports) for k, s in sorted(r.status.items()) if s.startswith("capped")],
        "reports": [r.to_payload() for r in reports],
    }
    _emit(_dump(summary), args.output)
    if args.table or args.figures:
        from .reporting import audit_rows, plot_audit, write_tsv

        if args.table:
            write_tsv(args.table, *audit_rows(result))
        if args.figures:
            plot_audit(result, Path(args.figures) / "audit_parameters.png")
    return EXIT_REJECT if result.violations else EXIT_OK


def cmd_orient_at(args) -> int:
    g = _graph(args)
    if args.coloring:
        coloring = _int_list(args.coloring)
    else:
        coloring = proper_coloring(g, args.r)
        if coloring is None:
            raise UsageError(f"graph is not {args.r}-colorable")
    trace: list = []
    o = odd_cycle_free_bounded_orientation(g, args.d, coloring, args.r, trace)
    claims = {"max_outdegree": o.max_outdegree(), "odd_cycle_free": True}
    if g.m <= AT_CLAIM_MAX_EDGES:
        claims["alon_tarsi"] = is_alon_tarsi_orientation(o)
    payload = {
        "arcs": [list(a) for a in o.arcs],
        "claims": claims,
        "meta": {"d": args.d, "r": args.r, "bound": outdegree_bound(args.d, args.r), "trace": trace},
    }
    _emit(encode_witness(WitnessDocument.for_graph("orientation", g, payload)), args.output)
    return EXIT_OK


def cmd_build_scheme(args) -> int:
    from .schemes import build_bipartite_scheme, build_chromatic_scheme

    g = _graph(args)
    overrides = _overrides(args.override_const)
    try:
        if args.chromatic:
            if args.d is None or (args.r is None and not args.coloring):
                raise UsageError("--chromatic needs --d and --r (or --coloring)")
            coloring = _int_list(args.coloring) if args.coloring else None
            scheme, trace = build_chromatic_scheme(
                g, args.d, args.r, coloring, args.seed, args.save_budget, overrides, args.resample_budget)
            tokens = [args.d - trace.save_budget] * g.n
        else:
            scheme, trace = build_bipartite_scheme(
                g, args.alpha, args.save_budget, args.seed, overrides, d=args.d, budget=args.resample_budget)
            tokens = trace.tokens
    except PipelineFailed as exc:
        report = {
            "outcome": "failed",
            "phase": exc.phase,
            "vertex": exc.vertex,
            "message": exc.message,
            "trace": exc.trace.to_payload() if exc.trace is not None else None,
        }
        _emit(_dump(report), args.output)
        _report_files(args, report["trace"])
        return EXIT_OK
    except (ValueError, DegreeExceeds) as exc:
        raise UsageError(str(exc)) from None
    payload = scheme.to_payload(tokens, False)
    payload["trace"] = trace.to_payload()
    _emit(encode_witness(WitnessDocument.for_graph("removal-scheme", g, payload)), args.output)
    _report_files(args, payload["trace"])
    return EXIT_OK


def _report_files(args, trace_payload) -> None:
    if not trace_payload or not (args.table or args.figures):
        return
    from .reporting import pipeline_rows, plot_pipeline, write_tsv

    if args.table:
        write_tsv(args.table, *pipeline_rows(trace_payload))
    if args.figures:
        plot_pipeline(trace_payload, Path(args.figures) / "pipeline_tokens.png")


def _verify_doc(g: Graph, doc: WitnessDocument) -> tuple[bool, str]:
    p = doc.payload
    if doc.kind == "removal-scheme":
        v = verify_removal_scheme(g, p["tokens"], RemovalScheme.from_payload(p), p["restricted"])
        return v.accepted, v.reason
    if doc.kind == "sd3-sequence":
        v = verify_sd3_sequence(g, p["tokens"], Sd3Sequence.from_payload(p))
        return v.accepted, v.reason
    if doc.kind == "orientation":
        try:
            o = Orientation(g, [tuple(a) for a in p["arcs"]])
        except ValueError as exc:
            return False, str(exc)
        claims = p.get("claims", {})
        if "max_outdegree" in claims and o.max_outdegree() > claims["max_outdegree"]:
            return False, f"max out-degree {o.max_outdegree()} exceeds the claimed {claims['max_outdegree']}"
        if "odd_cycle_free" in claims:
            odd, cycle = has_directed_odd_cycle(o)
            if claims["odd_cycle_free"] == odd:
                return False, f"odd cycle claim is false (cycle {cycle})"
        if "alon_tarsi" in claims and is_alon_tarsi_orientation(o) != claims["alon_tarsi"]:
            return False, "Alon-Tarsi claim is false"
        return True, ""
    if doc.kind == "painting-strategy":
        from .solvers.painting import verify_painting_strategy

        return verify_painting_strategy(g, p["tokens"], p["policy"])
    if doc.kind == "parameter-report":
        from .solvers.audit import parameter_report

        fresh = parameter_report(g, witnesses=False).to_payload()
        for name, value in p["values"].items():
            if value is not None and fresh["values"].get(name) is not None and fresh["values"][name] != value:
                return False, f"{name}: claimed {value}, recomputed {fresh['values'][name]}"
        return True, ""
    return False, f"unknown kind {doc.kind}"  # pragma: no cover - the schema restricts kinds


def cmd_verify(args) -> int:
    g = _graph(args)
    text = Path(args.witness).read_text()
    try:
        doc = decode_witness(text, g)
    except HashMismatch as exc:
        print(f"reject: {exc}")
        return EXIT_REJECT
    ok, reason = _verify_doc(g, doc)
    print("accept" if ok else f"reject: {reason}")
    return EXIT_OK if ok else EXIT_REJECT


def cmd_knn(args) -> int:
    from .solvers.knn import MAX_N, knn_study

    if args.n == MAX_N and not args.long:
        raise UsageError(f"n={MAX_N} runs for minutes; pass --long")
    study = knn_study(args.n)
    out = {
        "n": study.n, "k": study.k, "lower_bound": study.lower_bound, "upper_bound": study.upper_bound,
        "bound_holds": study.bound_holds, "schemes": study.schemes, "truncated": study.truncated,
        "profile": {side: {str(i): s for i, s in sorted(p.items())} for side, p in study.profile.items()},
        "violations": study.violations, "sigma_max": study.sigma_max, "sigma_bound": study.sigma_bound,
        "example": [[s.vertex, sorted(s.save)] for s in study.example.steps] if study.example else None,
    }
    _emit(_dump(out), args.output)
    if args.table or args.figures:
        from .reporting import knn_rows, plot_knn, write_tsv

        if args.table:
            write_tsv(args.table, *knn_rows([study]))
        if args.figures:
            plot_knn(study, Path(args.figures) / f"knn_{args.n}_save_profile.png")
    return EXIT_REJECT if study.violations or not study.bound_holds else EXIT_OK


def cmd_gadget(args) -> int:
    g = _graph(args)
    h = _int_list(args.tokens)
    if len(h) != g.n:
        raise UsageError(f"{len(h)} tokens given for {g.n} vertices")
    rounds = []
    graph, tokens, seq = g, h, None
    while True:
        try:
            graph, tokens, rep = build_nonconstant_gadget(graph, tokens, seq)
        except ConstantInput:
            if not rounds:
                raise UsageError("token function is already constant") from None
            break
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rounds.append({"n": graph.n, "M": rep.M, "m": rep.m, "D": rep.D, "spread": rep.spread,
                       "sequence_status": rep.sequence_status})
        seq = rep.sequence
        if not args.iterate or seq is None:
            break
    out = {"rounds": rounds, "graph6": encode_graph6(graph).decode(), "tokens": tokens}
    if seq is not None:
        out["witness"] = json.loads(encode_witness(
            WitnessDocument.for_graph("sd3-sequence", graph, seq.to_payload(tokens))))
    _emit(_dump(out), args.output)
    if seq is not None:
        return EXIT_OK
    return EXIT_CAP if "no witness" in rounds[-1]["sequence_status"] else EXIT_REJECT


def cmd_convert(args) -> int:
    src = Path(args.input)
    fmt_in = args.from_ or ("graph6" if src.suffix in (".g6", ".graph6") else "edges")
    fmt_out = args.to or ("graph6" if args.output.endswith((".g6", ".graph6")) else "edges")
    if fmt_in == "graph6":
        graphs = read_graph6_corpus(src.read_bytes())
    else:
        graphs = [decode_edge_list(src.read_text())]
    if fmt_out == "graph6":
        data = write_graph6_corpus(graphs)
        if args.output == "-":
            sys.stdout.write(data.decode())
        else:
            Path(args.output).write_bytes(data)
        return EXIT_OK
    if len(graphs) != 1:
        raise UsageError(f"edge-list output holds one graph, the input has {len(graphs)}")
    _emit(encode_edge_list(graphs[0]), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_graph(p) -> None:
    p.add_argument("graph", help="graph file (.g6 for graph6, otherwise an edge list)")
    p.add_argument("--format", choices=("graph6", "edges"), default=None)


def _add_report(p) -> None:
    p.add_argument("--table", help="write a TSV table here")
    p.add_argument("--figures", help="write PNG figures into this directory")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="listpaint", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("params", help="every parameter of one graph, as a JSON report")
    _add_graph(p)
    p.add_argument("-o", "--output")
    p.add_argument("--table")
    p.add_argument("--dpp-budget", type=int, default=200_000)
    p.add_argument("--no-witnesses", action="store_true")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("audit", help="inequality-chain audit of a graph6 corpus")
    p.add_argument("corpus")
    p.add_argument("-o", "--output")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--witnesses", action="store_true")
    p.add_argument("--dpp-budget", type=int, default=200_000)
    _add_report(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("orient-at", help="odd-cycle-free orientation with bounded out-degree")
    _add_graph(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--coloring", help="comma separated proper coloring (default: searched)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_orient_at)

    p = sub.add_parser("build-scheme", help="construct a removal scheme")
    _add_graph(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--bipartite", action="store_true", default=True)
    mode.add_argument("--chromatic", action="store_true")
    p.add_argument("--d", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--coloring")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--save-budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--override-const", action="append", metavar="NAME=VALUE")
    p.add_argument("--resample-budget", type=int, default=10_000)
    p.add_argument("-o", "--output")
    _add_report(p)
    p.set_defaults(func=cmd_build_scheme)

    p = sub.add_parser("verify", help="replay a witness against a graph")
    _add_graph(p)
    p.add_argument("witness")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("knn", help="removability study of K_{n,n}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--long", action="store_true", help="allow the slow n=4 case")
    p.add_argument("-o", "--output")
    _add_report(p)
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("gadget", help="spread-reducing gadget for a non-constant token function")
    _add_graph(p)
    p.add_argument("tokens", help="comma separated tokens, one per vertex")
    p.add_argument("--iterate", action="store_true", help="repeat until the tokens are constant")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("convert", help="convert between graph6 and edge lists")
    p.add_argument("input")
    p.add_argument("output", help="output path, or - for stdout")
    p.add_argument("--from", dest="from_", choices=("graph6", "edges"))
    p.add_argument("--to", choices=("graph6", "edges"))
    p.set_defaults(func=cmd_convert)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"listpaint: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"listpaint: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ParseError, SchemaViolation) as exc:
        print(f"listpaint: parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"listpaint: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
