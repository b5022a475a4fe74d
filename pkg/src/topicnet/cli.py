"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import xml.etree.ElementTree as ET

from . import __version__, export, pipeline, pubmed
from .config import ConfigError, load_config, make_config
from .cooccurrence import CountConsistencyError, EmptyCoreError
from .diff import NodeSetMismatch
from .mesh import TaxonomyError

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

DATA_ERRORS = (
    OSError, ValueError, KeyError, TaxonomyError, CountConsistencyError,
    EmptyCoreError, NodeSetMismatch, pubmed.FetchError, ET.ParseError,
)


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


class JsonLineFormatter(logging.Formatter):
    def format(self, record):
        msg = record.getMessage()
        if msg.startswith("{"):
            return msg
        return json.dumps({"level": record.levelname.lower(), "logger": record.name, "message": msg})


def _run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat TOML config; flags override its keys")
    p.add_argument("--year", type=int)
    p.add_argument("--ni-month", type=int, help="month of the NI subsample (default 6)")
    p.add_argument("--taxonomy", help="MeSH descriptor TSV")
    p.add_argument("--journals", help="impactful journal list CSV")
    p.add_argument("--corpus", nargs="+", help="corpus JSONL file(s)")
    p.add_argument("--out", help="output directory (default ./out)")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--core-policy", choices=["intersection", "per-network"])
    p.add_argument("--viz-threshold", type=float)
    p.add_argument("--bins", type=int, help="histogram bins (default 30)")
    p.add_argument("--regression-bins", type=int)
    p.add_argument("--top-k", type=int)
    p.add_argument("--diff-top-k", type=int)
    p.add_argument("--betweenness-norm", choices=["graph", "component"])
    p.add_argument("--inter-mode", choices=["full", "half"])
    p.add_argument("--network-a", help="first network for diff (edges CSV or GraphML)")
    p.add_argument("--network-b", help="second network for diff")


RUN_KEYS = (
    "year", "ni_month", "taxonomy", "journals", "corpus", "out", "seed", "workers",
    "core_policy", "viz_threshold", "bins", "regression_bins", "top_k", "diff_top_k",
    "betweenness_norm", "inter_mode", "network_a", "network_b",
)

REQUIRED = {
    "ingest": ("corpus", "journals", "taxonomy", "year"),
    "build": ("taxonomy",),
    "pipeline": ("corpus", "journals", "taxonomy", "year"),
}


def build_parser() -> Parser:
    parser = Parser(prog="topicnet", description="Topic co-occurrence network analysis")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=Parser, required=True)

    fetch = sub.add_parser("fetch", help="download a corpus JSONL from PubMed E-utilities")
    fetch.add_argument("--year", type=int, required=True)
    fetch.add_argument("--month", type=int)
    fetch.add_argument("--out", required=True, help="output JSONL path")
    fetch.add_argument("--rate-limit", type=float)
    fetch.add_argument("--batch-size", type=int, default=200)
    fetch.add_argument("--base-url", default=pubmed.DEFAULT_BASE_URL)
    fetch.add_argument("--query-template", default=pubmed.DEFAULT_QUERY)

    helps = {
        "ingest": "stratify records and reduce them to topic bags",
        "build": "build co-occurrence networks and extract the core",
        "metrics": "global and node-level network measures",
        "rollup": "first-level category strength roll-up",
        "diff": "difference network, adjacency regression and rankings",
        "fit": "strength histograms and distribution fits",
        "pipeline": "run every stage for one year",
    }
    for name, text in helps.items():
        _run_options(sub.add_parser(name, help=text))

    verify = sub.add_parser("verify", help="check artifact hashes against the manifest")
    verify.add_argument("--out", required=True)
    return parser


def _run_config(args):
    file_values = load_config(args.config) if args.config else None
    overrides = {k: getattr(args, k) for k in RUN_KEYS}
    cfg = make_config(file_values, overrides)
    missing = [k for k in REQUIRED.get(args.command, ()) if getattr(cfg, k) in (None, [])]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))
    return cfg


def _fetch(args) -> int:
    plan = pubmed.FetchPlan(args.year, args.month, args.batch_size, args.rate_limit,
                            query_template=args.query_template)
    written, skipped = pubmed.fetch_to_jsonl(plan, args.out, args.base_url)
    pipeline.event("fetch", out=args.out, written=written, skipped=skipped)
    return EXIT_OK


def _verify(args) -> int:
    problems = export.verify_bundle(args.out)
    for p in problems:
        print(p, file=sys.stderr)
    if problems:
        return EXIT_DATA
    print(f"{args.out}: all artifacts match the manifest")
    return EXIT_OK


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonLineFormatter())
    root = logging.getLogger("topicnet")
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if args.verbose else logging.INFO)

    try:
        if args.command == "fetch":
            return _fetch(args)
        if args.command == "verify":
            return _verify(args)
        cfg = _run_config(args)
        if args.command == "pipeline":
            pipeline.pipeline(cfg)
        else:
            pipeline.STAGE_FUNCS[args.command](cfg)
    except (UsageError, ConfigError) as exc:
        sub = parser._subparsers._group_actions[0].choices.get(args.command)
        print(f"{(sub or parser).format_usage()}topicnet {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NodeSetMismatch as exc:
        print(f"topicnet {args.command}: node set mismatch", file=sys.stderr)
        print(f"  only in first:  {' '.join(exc.only_a) or '-'}", file=sys.stderr)
        print(f"  only in second: {' '.join(exc.only_b) or '-'}", file=sys.stderr)
        return EXIT_DATA
    except DATA_ERRORS as exc:
        print(f"topicnet {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
