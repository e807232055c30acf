"""Command-line entry points.

``covmap`` runs the service or acts as a thin HTTP client against a
running instance.  ``covmap-sim`` replays a synthetic drive-test
scenario into a file or a live service.
"""

from __future__ import annotations

import argparse
import json
import sys

import requests

from .config import load_config
from .simulator import FileSink, HttpSink, SinkFailure, load_scenario, run_scenario


def _add_serve_parser(sub: argparse._SubParsersAction) -> None:
    p = sub.add_parser("serve", help="run the measurement service")
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--listen", help="host:port to bind (default 127.0.0.1:8000)")
    p.add_argument("--data-file", help="append-only measurement log path")
    p.add_argument("--model-dir", help="directory for persisted per-operator models")
    p.add_argument("--recluster-interval-s", type=float, help="seconds between retrains")
    p.add_argument("--dedup-window-s", type=float, help="per-device duplicate window seconds")
    p.add_argument("--k", type=int, help="clusters per operator")
    p.add_argument("--radius-m", type=float, help="nearest-stronger search radius meters")
    p.add_argument("--limit", type=int, help="max candidates per query")
    p.add_argument("--seed", type=int, help="base RNG seed for clustering")


def _add_client_parsers(sub: argparse._SubParsersAction) -> None:
    post = sub.add_parser("post", help="POST one measurement from a JSON file or stdin")
    post.add_argument("--url", default="http://127.0.0.1:8000", help="service base URL")
    post.add_argument("--file", help="measurement JSON path (default: read stdin)")

    heat = sub.add_parser("heatmap", help="fetch an operator heatmap as GeoJSON")
    heat.add_argument("--url", default="http://127.0.0.1:8000", help="service base URL")
    heat.add_argument("--operator", required=True)

    near = sub.add_parser("nearest", help="query nearest stronger-signal locations")
    near.add_argument("--url", default="http://127.0.0.1:8000", help="service base URL")
    near.add_argument("--operator", required=True)
    near.add_argument("--lat", type=float, required=True)
    near.add_argument("--lon", type=float, required=True)
    near.add_argument("--rssi-dbm", type=float, required=True)

    ops = sub.add_parser("operators", help="list operators with trained models")
    ops.add_argument("--url", default="http://127.0.0.1:8000", help="service base URL")


def _serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    overrides = {
        "listen": args.listen,
        "data_file": args.data_file,
        "model_dir": args.model_dir,
        "recluster_interval_s": args.recluster_interval_s,
        "dedup_window_s": args.dedup_window_s,
        "k": args.k,
        "search_radius_m": args.radius_m,
        "candidate_limit": args.limit,
        "rng_seed": args.seed,
    }
    config = load_config(args.config, overrides)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def _print_response(resp: requests.Response) -> int:
    try:
        print(json.dumps(resp.json(), indent=2))
    except ValueError:
        print(resp.text)
    return 0 if resp.ok else 1


def _client(args: argparse.Namespace) -> int:
    base = args.url.rstrip("/")
    if args.command == "post":
        if args.file:
            with open(args.file, encoding="utf-8") as fh:
                payload = json.load(fh)
        else:
            payload = json.load(sys.stdin)
        return _print_response(requests.post(f"{base}/v1/measurements", json=payload, timeout=30))
    if args.command == "heatmap":
        return _print_response(
            requests.get(f"{base}/v1/heatmap", params={"operator": args.operator}, timeout=30)
        )
    if args.command == "nearest":
        params = {
            "operator": args.operator,
            "lat": args.lat,
            "lon": args.lon,
            "rssi_dbm": args.rssi_dbm,
        }
        return _print_response(requests.get(f"{base}/v1/nearest-strong", params=params, timeout=30))
    if args.command == "operators":
        return _print_response(requests.get(f"{base}/v1/operators", timeout=30))
    raise AssertionError(f"unhandled command {args.command}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="covmap", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_serve_parser(sub)
    _add_client_parsers(sub)
    args = parser.parse_args(argv)
    if args.command == "serve":
        return _serve(args)
    return _client(args)


def _print_summary(summary) -> None:
    for op in sorted(summary.per_operator):
        print(f"  {op}: {summary.per_operator[op]} measurements")
    print(f"  total: {summary.total}")


def sim_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="covmap-sim", description="replay a synthetic drive-test scenario"
    )
    parser.add_argument("--scenario", required=True, help="scenario JSON path")
    target = parser.add_mutually_exclusive_group(required=True)
    target.add_argument("--post", metavar="URL", help="POST measurements to a running service")
    target.add_argument("--out", metavar="FILE", help="write measurements to a JSON-lines file")
    parser.add_argument("--seed", type=int, help="override the scenario RNG seed")
    args = parser.parse_args(argv)

    scenario = load_scenario(args.scenario)
    try:
        if args.post:
            with HttpSink(args.post) as sink:
                summary = run_scenario(scenario, sink, seed=args.seed)
        else:
            with FileSink(args.out) as sink:
                summary = run_scenario(scenario, sink, seed=args.seed)
    except SinkFailure as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        if exc.partial_summary is not None:
            print("partial trace before failure:", file=sys.stderr)
            _print_summary(exc.partial_summary)
        return 1
    _print_summary(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
