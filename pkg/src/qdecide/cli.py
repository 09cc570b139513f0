"""Command-line client for the decision-stack service.

The CLI is a thin HTTP client: every subcommand builds a request, sends it
to the service — in-process by default, or to a remote ``--server`` URL —
prints the response's text rendering, and writes CSV payloads verbatim to
``--out``.  Exit codes: 0 success, 2 usage or config error, 3 capacity,
model, or server error.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys

import httpx

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MODEL = 3


class CliError(Exception):
    def __init__(self, message: str, exit_code: int) -> None:
        super().__init__(message)
        self.exit_code = exit_code


def _request_in_process(method: str, path: str, payload: dict | None):
    from .service import create_app

    transport = httpx.ASGITransport(app=create_app())

    async def call():
        async with httpx.AsyncClient(
            transport=transport, base_url="http://qdecide.local", timeout=None
        ) as client:
            return await client.request(method, path, json=payload)

    return asyncio.run(call())


def _request_remote(server: str, method: str, path: str, payload: dict | None):
    try:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.request(method, path, json=payload)
    except httpx.HTTPError as exc:
        raise CliError(f"cannot reach server {server}: {exc}", EXIT_MODEL) from exc


def call_service(args, method: str, path: str, payload: dict | None = None) -> dict:
    """Send one request and decode it, mapping error statuses to exit codes."""
    if args.server:
        response = _request_remote(args.server, method, path, payload)
    else:
        response = _request_in_process(method, path, payload)
    if response.status_code in (400, 422):
        raise CliError(_error_message(response), EXIT_USAGE)
    if response.status_code != 200:
        raise CliError(_error_message(response), EXIT_MODEL)
    return response.json()


def _error_message(response) -> str:
    try:
        detail = response.json()["detail"]
    except Exception:
        return f"server error (status {response.status_code})"
    if isinstance(detail, dict) and "message" in detail:
        kind = detail.get("kind", "error")
        return f"{kind} error: {detail['message']}"
    return f"request rejected (status {response.status_code}): {detail}"


def _read_file(path: str, what: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise CliError(f"cannot read {what} {path}: {exc}", EXIT_USAGE) from exc


def _read_json(path: str, what: str) -> dict:
    try:
        document = json.loads(_read_file(path, what))
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: not valid JSON: {exc}", EXIT_USAGE) from exc
    if not isinstance(document, dict):
        raise CliError(f"{path}: {what} must be a JSON object", EXIT_USAGE)
    return document


def _write_out(path: str, content: str) -> None:
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(content)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_USAGE) from exc


def _load_train_payload(args) -> dict:
    """Read the config (and any map it names) locally; ship both inline."""
    config = _read_json(args.config, "config")
    payload: dict = {"config": config}
    map_path = config.get("map_path")
    if isinstance(map_path, str) and map_path:
        base = os.path.dirname(os.path.abspath(args.config))
        resolved = os.path.normpath(os.path.join(base, map_path))
        payload["map_text"] = _read_file(resolved, "map")
    return payload


def _comma_list(text: str, parse, what: str) -> list:
    items = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not items:
        raise CliError(f"{what} list is empty", EXIT_USAGE)
    try:
        return [parse(piece) for piece in items]
    except ValueError as exc:
        raise CliError(f"bad {what} list {text!r}: {exc}", EXIT_USAGE) from exc


def run_grover(args) -> int:
    result = call_service(
        args,
        "POST",
        "/grover",
        {
            "qubits": args.qubits,
            "target": args.target,
            "trials": args.trials,
            "seed": args.seed,
        },
    )
    print(result["text"])
    if args.out:
        _write_out(args.out, result["csv"])
    return EXIT_OK


def run_table1(args) -> int:
    result = call_service(args, "GET", "/table1")
    print(result["text"])
    return EXIT_OK


def run_plan(args) -> int:
    mdp = _read_json(args.mdp, "MDP document")
    result = call_service(
        args, "POST", "/plan", {"mdp": mdp, "tolerance": args.tol, "seed": args.seed}
    )
    print(result["text"])
    return EXIT_OK


def run_map_check(args) -> int:
    map_text = _read_file(args.map, "map") if args.map else None
    result = call_service(args, "POST", "/map-check", {"map_text": map_text})
    print(result["text"])
    return EXIT_OK if result["ok"] else EXIT_MODEL


def run_train(args) -> int:
    payload = _load_train_payload(args)
    result = call_service(args, "POST", "/train", payload)
    print(result["text"])
    if args.out:
        _write_out(args.out, result["csv"])
    return EXIT_OK


def run_sweep(args) -> int:
    payload = _load_train_payload(args)
    payload["alphas"] = _comma_list(args.alphas, float, "alpha")
    payload["seeds"] = _comma_list(args.seeds, int, "seed")
    result = call_service(args, "POST", "/sweep", payload)
    print(result["text"])
    if args.out:
        _write_out(args.out, result["csv"])
    return EXIT_OK


def run_serve(args) -> int:
    import uvicorn

    uvicorn.run("qdecide.service:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdecide",
        description=(
            "Amplitude-amplified action search and amplitude-policy "
            "reinforcement learning."
        ),
    )
    parser.add_argument(
        "--server",
        default=None,
        metavar="URL",
        help="send requests to a running service instead of in-process",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    grover_cmd = commands.add_parser(
        "grover", help="run repeated searches for one marked index"
    )
    grover_cmd.add_argument("--qubits", type=int, required=True)
    grover_cmd.add_argument("--target", type=int, required=True)
    grover_cmd.add_argument("--trials", type=int, default=1000)
    grover_cmd.add_argument("--seed", type=int, default=0)
    grover_cmd.add_argument("--out", default=None, help="write per-trial CSV here")
    grover_cmd.set_defaults(handler=run_grover)

    table1_cmd = commands.add_parser(
        "table1", help="print the classical-vs-amplified query-count table"
    )
    table1_cmd.set_defaults(handler=run_table1)

    plan_cmd = commands.add_parser(
        "plan", help="solve an MDP file and select actions by amplified search"
    )
    plan_cmd.add_argument("--mdp", required=True, help="MDP JSON file")
    plan_cmd.add_argument("--tol", type=float, default=1e-9)
    plan_cmd.add_argument("--seed", type=int, default=0)
    plan_cmd.set_defaults(handler=run_plan)

    map_cmd = commands.add_parser(
        "map-check", help="validate a map file and its shortest path"
    )
    map_cmd.add_argument(
        "--map", default=None, help="13x13 map file (default: the shipped map)"
    )
    map_cmd.set_defaults(handler=run_map_check)

    train_cmd = commands.add_parser(
        "train", help="run one training run from a config file"
    )
    train_cmd.add_argument("--config", required=True, help="config JSON file")
    train_cmd.add_argument("--out", default=None, help="write the run-log CSV here")
    train_cmd.set_defaults(handler=run_train)

    sweep_cmd = commands.add_parser(
        "sweep", help="train across alphas x seeds and concatenate the logs"
    )
    sweep_cmd.add_argument("--config", required=True, help="base config JSON file")
    sweep_cmd.add_argument(
        "--alphas", required=True, help="comma-separated stepsizes, e.g. 0.02,0.05"
    )
    sweep_cmd.add_argument(
        "--seeds", required=True, help="comma-separated seeds, e.g. 1,2,3"
    )
    sweep_cmd.add_argument("--out", default=None, help="write the sweep CSV here")
    sweep_cmd.set_defaults(handler=run_sweep)

    serve_cmd = commands.add_parser("serve", help="run the HTTP service")
    serve_cmd.add_argument("--host", default="127.0.0.1")
    serve_cmd.add_argument("--port", type=int, default=8000)
    serve_cmd.set_defaults(handler=run_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except CliError as error:
        print(f"error: {error}", file=sys.stderr)
        return error.exit_code


if __name__ == "__main__":
    sys.exit(main())
