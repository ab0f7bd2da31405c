"""Command-line client for the qvoterlab service.

The CLI builds one request per subcommand, sends it to the service (an
in-process application instance by default, or a remote base URL given via
--server), writes the returned artifacts under --out and records the fully
resolved configuration in manifest.json. Flags mirror the model symbols
(--q, --p, --xi, --rho, --r, --f).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import httpx

from . import __version__

_PRESET_NAMES = ("fortress-chaos", "fortress-elite", "fortress-clan",
                 "open-chaos", "open-elite", "open-clan")
_STRATEGIES = ("random", "degree", "pagerank", "voterank", "kshell", "cim")


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient
    from .service import app

    # TestClient is an httpx.Client driving the ASGI app in-process
    return TestClient(app)


def _post(args, path: str, payload: dict) -> int:
    with _client(args.server) as client:
        response = client.post(path, json=payload)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        print(f"error: {detail}", file=sys.stderr)
        return 1
    body = response.json()
    out_dir = args.out
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for artifact in body["artifacts"]:
        dest = os.path.join(out_dir, artifact["name"])
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(artifact["content"])
        written.append(artifact["name"])
    manifest = {
        "tool": "qvoterlab",
        "version": __version__,
        "endpoint": path,
        "resolved": body["resolved"],
        "artifacts": written,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name in written:
        print(os.path.join(out_dir, name))
    return 0


def _scenario_payload(args) -> dict:
    if args.preset:
        return {"preset": args.preset}
    return {
        "preset": None, "n": args.n, "layer_count": args.L, "xi": args.xi,
        "rho": args.rho, "r": args.r, "gamma": args.gamma, "delta": args.delta,
        "Delta": args.Delta, "beta": args.beta, "s_min": args.s_min,
        "s_max": args.s_max,
    }


def _add_scenario_args(sub, with_preset_default: str | None = None) -> None:
    sub.add_argument("--preset", choices=_PRESET_NAMES, default=with_preset_default,
                     help="named scenario (overrides the explicit generator flags)")
    sub.add_argument("--n", type=int, default=1000)
    sub.add_argument("--L", type=int, default=2, help="layer count")
    sub.add_argument("--xi", type=float, default=0.05, help="mixing fraction")
    sub.add_argument("--rho", type=float, default=0.9, help="inter-layer degree correlation")
    sub.add_argument("--r", type=float, default=1.0, help="partition correlation")
    sub.add_argument("--gamma", type=float, default=2.5, help="degree exponent")
    sub.add_argument("--delta", type=int, default=2, help="minimum degree")
    sub.add_argument("--Delta", type=int, default=25, help="maximum degree")
    sub.add_argument("--beta", type=float, default=1.5, help="community size exponent")
    sub.add_argument("--s-min", dest="s_min", type=int, default=16)
    sub.add_argument("--s-max", dest="s_max", type=int, default=25)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x != ""]


def _names(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="qvoterlab",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("generate", help="generate a scenario network")
    _add_scenario_args(s, "fortress-clan")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)

    s = sub.add_parser("seeds", help="select a seed set on a generated network")
    _add_scenario_args(s, "fortress-clan")
    s.add_argument("--gen-seed", dest="gen_seed", type=int, default=0)
    s.add_argument("--edges", default=None, help="edge file instead of generating")
    s.add_argument("--strategy", choices=_STRATEGIES, default="voterank")
    s.add_argument("--f", type=float, default=0.05, help="budget fraction")
    s.add_argument("--seed", type=int, default=0, help="stream for the random strategy")
    s.add_argument("--out", required=True)

    s = sub.add_parser("simulate", help="run one dynamics trajectory")
    _add_scenario_args(s, "fortress-clan")
    s.add_argument("--gen-seed", dest="gen_seed", type=int, default=0)
    s.add_argument("--edges", default=None)
    s.add_argument("--initial", choices=("all-a", "all-b", "all-u", "seeded"),
                   default="all-a")
    s.add_argument("--strategy", choices=_STRATEGIES, default="voterank")
    s.add_argument("--f", type=float, default=0.05)
    s.add_argument("--q", type=int, default=4)
    s.add_argument("--p", type=float, default=0.0)
    s.add_argument("--mcs", type=int, default=1000)
    s.add_argument("--seed", dest="master_seed", type=int, default=0)
    s.add_argument("--out", required=True)

    s = sub.add_parser("mfa-scan", help="stationary scan of the mean-field ODEs")
    s.add_argument("--q", type=int, default=4)
    s.add_argument("--L", type=int, default=2)
    s.add_argument("--p-min", dest="p_min", type=float, default=0.0)
    s.add_argument("--p-max", dest="p_max", type=float, default=0.3)
    s.add_argument("--step", dest="p_step", type=float, default=0.005)
    s.add_argument("--initial-ca", dest="initial_c_a", type=float, default=1.0)
    s.add_argument("--initial-cb", dest="initial_c_b", type=float, default=0.0)
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("--t-max", dest="t_max", type=float, default=500.0)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--hysteresis", action="store_true")
    s.add_argument("--out", required=True)

    s = sub.add_parser("mfa-portrait", help="phase portrait over the simplex")
    s.add_argument("--q", type=int, default=4)
    s.add_argument("--L", type=int, default=2)
    s.add_argument("--p", type=float, default=0.15)
    s.add_argument("--grid", dest="grid_resolution", type=int, default=10)
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("--t-max", dest="t_max", type=float, default=500.0)
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--out", required=True)

    s = sub.add_parser("phase1", help="baseline stability grid")
    s.add_argument("--presets", default=",".join(_PRESET_NAMES),
                   help="comma-separated scenario names")
    s.add_argument("--p-grid", dest="p_grid",
                   default="0,0.02,0.04,0.06,0.08,0.1,0.12")
    s.add_argument("--realizations", type=int, default=20)
    s.add_argument("--mcs", type=int, default=1000)
    s.add_argument("--q", type=int, default=4)
    s.add_argument("--seed", dest="master_seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    s.add_argument("--resample-network", action="store_true")
    s.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    s.add_argument("--out", required=True)

    s = sub.add_parser("phase2", help="seeding effectiveness grid")
    s.add_argument("--presets", default=",".join(_PRESET_NAMES))
    s.add_argument("--strategies", default=",".join(_STRATEGIES))
    s.add_argument("--f", dest="budgets", default="0.03,0.05,0.10",
                   help="comma-separated budget fractions")
    s.add_argument("--p", dest="p_values", default="0,0.03,0.06",
                   help="comma-separated noise levels")
    s.add_argument("--realizations", type=int, default=50)
    s.add_argument("--mcs", type=int, default=1000)
    s.add_argument("--q", type=int, default=4)
    s.add_argument("--seed", dest="master_seed", type=int, default=0)
    s.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    s.add_argument("--resample-network", action="store_true")
    s.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    s.add_argument("--out", required=True)

    s = sub.add_parser("summarize", help="recompute the summary from a rows CSV")
    s.add_argument("csv", help="path to a rows.csv produced by phase1/phase2")
    s.add_argument("--out", required=True)

    s = sub.add_parser("serve", help="run the HTTP service")
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--port", type=int, default=8080)

    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    try:
        if args.command == "generate":
            return _post(args, "/generate",
                         {"scenario": _scenario_payload(args), "seed": args.seed})
        if args.command == "seeds":
            payload = {"scenario": _scenario_payload(args), "gen_seed": args.gen_seed,
                       "strategy": args.strategy, "f": args.f, "seed": args.seed,
                       "edges_content": _read_optional(args.edges)}
            return _post(args, "/seeds", payload)
        if args.command == "simulate":
            payload = {"scenario": _scenario_payload(args), "gen_seed": args.gen_seed,
                       "edges_content": _read_optional(args.edges),
                       "initial": args.initial, "strategy": args.strategy,
                       "f": args.f, "q": args.q, "p": args.p, "mcs": args.mcs,
                       "master_seed": args.master_seed}
            return _post(args, "/simulate", payload)
        if args.command == "mfa-scan":
            payload = {"q": args.q, "L": args.L, "p_min": args.p_min,
                       "p_max": args.p_max, "p_step": args.p_step,
                       "initial_c_a": args.initial_c_a, "initial_c_b": args.initial_c_b,
                       "dt": args.dt, "t_max": args.t_max, "tol": args.tol,
                       "hysteresis": args.hysteresis}
            return _post(args, "/mfa/scan", payload)
        if args.command == "mfa-portrait":
            payload = {"q": args.q, "L": args.L, "p": args.p,
                       "grid_resolution": args.grid_resolution, "dt": args.dt,
                       "t_max": args.t_max, "tol": args.tol}
            return _post(args, "/mfa/portrait", payload)
        if args.command == "phase1":
            payload = {"scenarios": _names(args.presets), "p_values": _floats(args.p_grid),
                       "realizations": args.realizations, "mcs": args.mcs, "q": args.q,
                       "master_seed": args.master_seed, "workers": args.workers,
                       "resample_network": args.resample_network, "format": args.format}
            return _post(args, "/phase1", payload)
        if args.command == "phase2":
            payload = {"scenarios": _names(args.presets),
                       "strategies": _names(args.strategies),
                       "budgets": _floats(args.budgets), "p_values": _floats(args.p_values),
                       "realizations": args.realizations, "mcs": args.mcs, "q": args.q,
                       "master_seed": args.master_seed, "workers": args.workers,
                       "resample_network": args.resample_network, "format": args.format}
            return _post(args, "/phase2", payload)
        if args.command == "summarize":
            with open(args.csv, "r", encoding="utf-8") as fh:
                return _post(args, "/summarize", {"csv": fh.read()})
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


def _read_optional(path: str | None) -> str | None:
    if path is None:
        return None
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


if __name__ == "__main__":
    sys.exit(main())
