"""Command-line entry point: load ontology, replay the log, serve HTTP."""

from __future__ import annotations

import argparse
from pathlib import Path

import uvicorn

from .engine import Engine, ServiceConfig
from .service import create_app


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metaonce",
        description="Rule-constrained, event-sourced, multi-scene knowledge-graph service",
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8420)
    parser.add_argument("--data-dir", type=Path, required=True, help="directory holding events.log")
    parser.add_argument("--ontology", type=Path, default=None, help="ontology document (default: bundled)")
    parser.add_argument("--seed", type=Path, default=None, help="seed script run once on an empty log")
    parser.add_argument("--max-hops", type=int, default=8, help="default bound for all_simple_paths")
    parser.add_argument("--core-threshold", type=float, default=0.5, help="default core-vertex threshold")
    return parser


def main(argv: list[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    config = ServiceConfig(
        host=args.host,
        port=args.port,
        data_dir=args.data_dir,
        ontology_path=args.ontology,
        seed_path=args.seed,
        max_hops=args.max_hops,
        core_threshold=args.core_threshold,
    )
    engine = Engine.from_config(config)
    app = create_app(engine, config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


if __name__ == "__main__":
    main()
