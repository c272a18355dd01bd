"""Command-line entry point: serve the API or run one-shot analyses.

Exit codes: 0 success, 1 usage error, 2 data/model error. All subcommands
rebuild state from the given files per invocation; only ``serve`` opens a
socket. JSON goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ServiceConfig, apply_overrides, load_config
from .errors import PeercfError
from .service import AnalysisService, dumps

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract reserves 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_EXIT)


class UsageError(Exception):
    """Malformed flag values detected after argparse (e.g. a bad --set spec)."""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


def _add_data_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="service config JSON; flags below override it")
    parser.add_argument("--data", help="dataset CSV path")
    parser.add_argument("--schema", help="schema JSON path")
    parser.add_argument("--graph", help="causal graph JSON path")
    parser.add_argument("--geo", help="GeoJSON boundary path")


def _build_config(args) -> ServiceConfig:
    if args.config:
        config = load_config(args.config)
    else:
        missing = [f for f in ("data", "schema", "graph") if not getattr(args, f)]
        if missing:
            flags = ", ".join(f"--{m}" for m in missing)
            raise UsageError(f"missing {flags} (or --config)")
        config = ServiceConfig(
            data_path=Path(args.data),
            schema_path=Path(args.schema),
            graph_path=Path(args.graph),
        )
    overrides = {}
    if args.data:
        overrides["data_path"] = Path(args.data)
    if args.schema:
        overrides["schema_path"] = Path(args.schema)
    if args.graph:
        overrides["graph_path"] = Path(args.graph)
    if args.geo:
        overrides["geo_path"] = Path(args.geo)
    if getattr(args, "port", None) is not None:
        overrides["port"] = args.port
    return apply_overrides(config, **overrides)


def _emit(payload: dict, compact: bool) -> None:
    if compact:
        sys.stdout.write(dumps(payload) + "\n")
    else:
        sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def _parse_set(spec: str) -> tuple[str, float]:
    attribute, sep, raw = spec.partition("=")
    if not sep or not attribute:
        raise UsageError(f"--set expects attr=value, got {spec!r}")
    try:
        return attribute, float(raw)
    except ValueError:
        raise UsageError(f"--set value {raw!r} is not a number") from None


def build_parser() -> _Parser:
    parser = _Parser(prog="peercf", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    serve = sub.add_parser("serve", help="run the HTTP API server")
    _add_data_flags(serve)
    serve.add_argument("--port", type=int)
    serve.add_argument("--host", default="127.0.0.1")

    intervene = sub.add_parser("intervene", help="one-shot counterfactual")
    _add_data_flags(intervene)
    intervene.add_argument("--unit", required=True)
    intervene.add_argument("--n", type=int)
    intervene.add_argument("--set", required=True, metavar="ATTR=VALUE")
    intervene.add_argument("--json", action="store_true", help="compact one-line JSON")

    explain = sub.add_parser("explain", help="one-shot explanation")
    _add_data_flags(explain)
    explain.add_argument("--unit", required=True)
    explain.add_argument("--n", type=int)
    explain.add_argument("--method", choices=["lime", "shap"], required=True)
    explain.add_argument("--seed", type=int, help="LIME sampling seed override")
    explain.add_argument("--json", action="store_true")

    recommend = sub.add_parser("recommend", help="rank single-attribute interventions")
    _add_data_flags(recommend)
    recommend.add_argument("--unit", required=True)
    recommend.add_argument("--n", type=int)
    recommend.add_argument("--target", type=float, required=True)
    recommend.add_argument("--grid-size", type=int)
    recommend.add_argument("--json", action="store_true")

    validate = sub.add_parser("validate", help="run load-time checks and report")
    _add_data_flags(validate)

    return parser


def _cmd_serve(args) -> int:
    from .server import serve

    config = _build_config(args)
    serve(config, host=args.host)
    return 0


def _cmd_intervene(args) -> int:
    attribute, value = _parse_set(getattr(args, "set"))
    service = AnalysisService(_build_config(args))
    payload = service.intervene_payload(args.unit, attribute, value, args.n)
    _emit(payload, args.json)
    return 0


def _cmd_explain(args) -> int:
    service = AnalysisService(_build_config(args))
    if args.method == "lime":
        payload = service.lime_payload(args.unit, args.n, seed=args.seed)
    else:
        payload = service.shap_payload(args.unit, args.n)
    _emit(payload, args.json)
    return 0


def _cmd_recommend(args) -> int:
    service = AnalysisService(_build_config(args))
    payload = service.recommend_payload(args.unit, args.target, args.grid_size, args.n)
    _emit(payload, args.json)
    return 0


def _cmd_validate(args) -> int:
    from .causal import check_graph_matches_schema, load_graph
    from .dataset import load_dataset, load_schema

    config = _build_config(args)
    failures = 0

    def report(ok: bool, label: str, detail: str) -> None:
        nonlocal failures
        if not ok:
            failures += 1
        print(f"[{'pass' if ok else 'fail'}] {label}: {detail}")

    schema = None
    try:
        schema = load_schema(config.schema_path)
        report(True, "schema", f"{len(schema.treatments)} treatments, outcome {schema.outcome!r}")
    except (PeercfError, ValueError, KeyError, OSError) as exc:
        report(False, "schema_invalid", str(exc))

    dataset = None
    if schema is not None:
        try:
            with open(config.data_path, "rb") as fh:
                dataset = load_dataset(fh, schema)
            report(True, "dataset", f"{len(dataset)} units")
        except PeercfError as exc:
            report(False, exc.code, exc.message)
        except OSError as exc:
            report(False, "dataset_unreadable", str(exc))

    graph = None
    try:
        graph = load_graph(config.graph_path)
        report(True, "graph", f"{len(graph.nodes)} nodes, {len(graph.edges)} edges, acyclic")
    except PeercfError as exc:
        report(False, exc.code, exc.message)
    except (ValueError, KeyError, OSError) as exc:
        report(False, "graph_invalid", str(exc))

    if graph is not None and schema is not None:
        try:
            check_graph_matches_schema(graph, schema)
            report(True, "graph_schema", "graph nodes match schema attributes")
        except PeercfError as exc:
            report(False, exc.code, exc.message)

    return DATA_EXIT if failures else 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "serve": _cmd_serve,
        "intervene": _cmd_intervene,
        "explain": _cmd_explain,
        "recommend": _cmd_recommend,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.subcommand](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"peercf: error: {exc.message}\n")
        return USAGE_EXIT
    except PeercfError as exc:
        sys.stderr.write(f"peercf: {exc.code}: {exc.message}\n")
        return DATA_EXIT
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"peercf: {exc}\n")
        return DATA_EXIT


if __name__ == "__main__":
    raise SystemExit(main())
