"""Command-line interface.

Subcommands: validate, cluster, cut, decide, span, serve, report. Outputs go
to stdout as canonical JSON (or text/svg renders for cluster --out). Errors
are single-line JSON on stderr; exit codes: 0 success, 2 usage error,
1 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from tuba import workflows
from tuba.clustering import parse_dendrogram
from tuba.decisions import Mode, Rule
from tuba.errors import ModelFormatError, TubaError
from tuba.metrics import Category, Kind, Linkage, MetricKind
from tuba.model import model_warnings
from tuba.modelfile import parse_dist, parse_model, parse_partition


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _ids(raw: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in raw.split(",") if x.strip())


def _weights(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in raw.split(","))
    except ValueError:
        raise _UsageError(f"bad --weights value {raw!r}") from None


def build_parser() -> _Parser:
    parser = _Parser(prog="tuba", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, dist=False):
        p.add_argument("--model", required=True, help="model JSON file")
        p.add_argument("--weights", type=_weights,
                       help="override attribute weights, e.g. 0.9,0.1")
        p.add_argument("--actions", type=_ids,
                       help="restrict to these actions (comma separated)")
        p.add_argument("--hypotheses", type=_ids,
                       help="restrict to these hypotheses (comma separated)")
        if dist:
            p.add_argument("--dist", help="probability distribution JSON file")

    p = sub.add_parser("validate", help="validate a model and print it canonically")
    p.add_argument("--model", required=True)

    p = sub.add_parser("cluster", help="build an abstraction hierarchy")
    add_common(p, dist=True)
    p.add_argument("--target", required=True,
                   choices=[k.value for k in Kind])
    p.add_argument("--metric", required=True,
                   choices=[m.value for m in MetricKind])
    p.add_argument("--linkage", required=True,
                   choices=[l.value for l in Linkage])
    p.add_argument("--out", default="json", choices=["json", "text", "svg"])

    p = sub.add_parser("cut", help="extract a partition from a dendrogram")
    add_common(p)
    p.add_argument("--dendrogram", required=True, help="dendrogram JSON file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--tolerance", type=float,
                       help="maximum admissible merge height")
    group.add_argument("--k", type=int, help="exact number of categories")

    p = sub.add_parser("decide", help="pick an action or category")
    add_common(p)
    p.add_argument("--dist", required=True)
    p.add_argument("--partition", help="partition JSON file (omit for base level)")
    p.add_argument("--rule", default="eu", choices=[r.value for r in Rule])
    p.add_argument("--mode", default="conditional",
                   choices=[m.value for m in Mode])

    p = sub.add_parser("span", help="utility span of one category")
    add_common(p)
    p.add_argument("--category", required=True,
                   help="comma-separated member ids")
    p.add_argument("--target", choices=[k.value for k in Kind],
                   help="axis of the members (inferred when unambiguous)")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int,
                   default=int(os.environ.get("TUBA_PORT", "8334")))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--state-dir", help="snapshot uploaded models here")
    p.add_argument("--ui-dir", help="serve the explorer UI from this directory")

    p = sub.add_parser("report",
                       help="write figures and delimited summaries to a directory")
    add_common(p, dist=True)
    p.add_argument("--target", required=True, choices=[k.value for k in Kind])
    p.add_argument("--metric", required=True,
                   choices=[m.value for m in MetricKind])
    p.add_argument("--linkage", required=True,
                   choices=[l.value for l in Linkage])
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--tolerance", type=float)
    group.add_argument("--k", type=int)
    p.add_argument("--out-dir", required=True)
    return parser


def _load_model(args):
    model = parse_model(_read(args.model))
    return model


def _load_dist(args):
    # Coverage against the (possibly subset) hypothesis axis is checked at
    # use, so subset flags compose with distribution-taking subcommands.
    if getattr(args, "dist", None):
        return parse_dist(_read(args.dist))
    return None


def _infer_span_kind(args, model, members) -> Kind:
    if args.target:
        return Kind(args.target)
    in_h = all(m in model.hypotheses for m in members)
    in_a = all(m in model.actions for m in members)
    if in_h and not in_a:
        return Kind.HYPOTHESES
    if in_a and not in_h:
        return Kind.ACTIONS
    raise TubaError(
        "cannot infer the category axis from the member ids; pass --target")


def _cmd_validate(args, stdout, stderr) -> int:
    model = parse_model(_read(args.model))
    for w in model_warnings(model):
        print(json.dumps({"warning": w}), file=stderr)
    print(workflows.model_output(model), file=stdout)
    return 0


def _cmd_cluster(args, stdout, stderr) -> int:
    model = _load_model(args)
    dendrogram = workflows.cluster(
        model, Kind(args.target), MetricKind(args.metric),
        Linkage(args.linkage), weights=args.weights, actions=args.actions,
        hypotheses=args.hypotheses, dist=_load_dist(args))
    print(workflows.dendrogram_output(dendrogram, args.out), file=stdout)
    return 0


def _cmd_cut(args, stdout, stderr) -> int:
    model = _load_model(args)
    dendrogram = parse_dendrogram(_read(args.dendrogram))
    matrix = workflows.build_matrix(model, args.weights, args.actions,
                                    args.hypotheses)
    axis = (matrix.hypotheses if dendrogram.kind is Kind.HYPOTHESES
            else matrix.actions)
    if set(dendrogram.leaves) != set(axis):
        raise TubaError(
            "dendrogram leaves do not match the projected model axis; "
            "pass the same subset flags used for clustering")
    partition = workflows.cut(dendrogram, matrix, tolerance=args.tolerance,
                              k=args.k)
    print(workflows.partition_output(partition), file=stdout)
    return 0


def _cmd_decide(args, stdout, stderr) -> int:
    model = _load_model(args)
    matrix = workflows.build_matrix(model, args.weights, args.actions,
                                    args.hypotheses)
    dist = parse_dist(_read(args.dist))
    partition = (parse_partition(_read(args.partition))
                 if args.partition else None)
    report = workflows.decide(matrix, dist, partition, Rule(args.rule),
                              Mode(args.mode))
    print(workflows.report_output(report), file=stdout)
    return 0


def _cmd_span(args, stdout, stderr) -> int:
    model = _load_model(args)
    members = _ids(args.category)
    if not members:
        raise _UsageError("--category must name at least one member")
    kind = _infer_span_kind(args, model, members)
    matrix = workflows.build_matrix(model, args.weights, args.actions,
                                    args.hypotheses)
    category = Category(kind, members)
    print(workflows.span_output(category, workflows.span(matrix, category)),
          file=stdout)
    return 0


def _cmd_serve(args, stdout, stderr) -> int:
    from tuba.service import serve_forever

    print(json.dumps({"serving": f"http://{args.host}:{args.port}"}),
          file=stderr)
    serve_forever(args.host, args.port, state_dir=args.state_dir,
                  ui_dir=args.ui_dir)
    return 0


def _cmd_report(args, stdout, stderr) -> int:
    from tuba.report import write_report

    model = _load_model(args)
    paths = write_report(
        model, target=Kind(args.target), metric=MetricKind(args.metric),
        linkage=Linkage(args.linkage), weights=args.weights,
        actions=args.actions, hypotheses=args.hypotheses,
        dist=_load_dist(args), tolerance=args.tolerance, k=args.k,
        out_dir=args.out_dir)
    for path in paths:
        print(json.dumps({"wrote": str(path)}), file=stdout)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "cluster": _cmd_cluster,
    "cut": _cmd_cut,
    "decide": _cmd_decide,
    "span": _cmd_span,
    "serve": _cmd_serve,
    "report": _cmd_report,
}


def run_cli(argv, stdout=None, stderr=None) -> int:
    """Run one command; returns the exit code instead of exiting."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args, stdout, stderr)
    except _UsageError as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=stderr)
        return 2
    except ModelFormatError as exc:
        payload = {"error": "ModelFormatError", "message": str(exc)}
        if exc.violations:
            payload["violations"] = exc.violations
        print(json.dumps(payload), file=stderr)
        return 1
    except (TubaError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=stderr)
        return 1


def main(argv=None) -> int:
    return run_cli(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
