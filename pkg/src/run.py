#!/usr/bin/env python3
"""
CLI entrypoint for the ARMA control-system entropy toolkit.

Usage:
    python -m src.run validate data/models/example1.json --emit-normalized
    python -m src.run covariance data/models/example1.json --tau-max 6 --cross-check
    python -m src.run entropy data/models/example1.json --alpha 0.75:0.25:3
    python -m src.run simulate data/models/example3.json --seed 7 --samples 100000
    python -m src.run reproduce all --properties

Exit codes: 0 success, 2 validation failure, 3 numeric/domain error, 4 I/O or usage error.
"""
import sys
import argparse
import json
from src.utils.loader import load_config, parse_alpha_grid
from src.utils.errors import ArmaEntropyError
from src.core.simulate import SimConfig
from src.orchestrator import Orchestrator

MODEL_COMMANDS = ("validate", "stability", "impulse", "covariance", "entropy", "charfn", "simulate")

def parse_args(argv):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="Config YAML (default config/config.yaml)")
    common.add_argument("--out-dir", type=str, default=None, help="Output directory for artifacts (default: out_dir in config)")
    common.add_argument("--format", choices=["csv", "json"], default=None, help="Table format for outputs")

    p = argparse.ArgumentParser(prog="arma-entropy")
    sub = p.add_subparsers(dest="command", required=True)

    for name in MODEL_COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("model_path", type=str, help="Model JSON file (schema_version 1)")
        if name in ("impulse", "covariance", "entropy", "charfn"):
            sp.add_argument("--tol", type=float, default=None, help="Truncation tolerance")
        if name == "validate":
            sp.add_argument("--emit-normalized", action="store_true", help="Write the normalized model JSON")
        if name == "covariance":
            sp.add_argument("--tau-max", type=int, default=0, help="Largest lag to report")
            sp.add_argument("--cross-check", action="store_true", help="Compare Lyapunov and series Phi(0)")
        if name == "entropy":
            sp.add_argument("--alpha", type=str, default=None, help="Comma list or start:step:stop")
        if name == "charfn":
            sp.add_argument("--points", type=str, default=None, help="CSV of frequency vectors")
        if name == "simulate":
            sp.add_argument("--seed", type=int, default=None)
            sp.add_argument("--samples", type=int, default=None)
            sp.add_argument("--burn-in", type=int, default=None)
            sp.add_argument("--replicates", type=int, default=None)
            sp.add_argument("--dump-path", type=str, default=None, help="Write the first replicate path as CSV")

    rp = sub.add_parser("reproduce", parents=[common])
    rp.add_argument("example", choices=["1", "2", "3", "all"])
    rp.add_argument("--properties", action="store_true", help="Also run the property suites")
    return p.parse_args(argv)

def build_params(args, cfg):
    if args.command == "reproduce":
        return {"which": args.example, "properties": args.properties}
    params = {"model_path": args.model_path}
    tol = getattr(args, "tol", None)
    if args.command == "validate":
        params["emit_normalized"] = args.emit_normalized
    elif args.command == "impulse":
        params["tol"] = tol or float(cfg.get("impulse_tol", 1e-10))
    elif args.command == "covariance":
        params.update(tau_max=args.tau_max, tol=tol or float(cfg.get("series_tol", 1e-10)),
                      cross_check=args.cross_check)
    elif args.command == "entropy":
        grid = args.alpha if args.alpha is not None else cfg.get("alpha_grid", "1")
        if isinstance(grid, (list, tuple)):
            grid = ",".join(str(a) for a in grid)
        params.update(alphas=parse_alpha_grid(grid), tol=tol or float(cfg.get("impulse_tol", 1e-10)))
    elif args.command == "charfn":
        params.update(points_path=args.points, tol=tol or float(cfg.get("charfn_tol", 1e-10)))
    elif args.command == "simulate":
        params["sim_cfg"] = SimConfig.from_cfg(cfg, seed=args.seed, n_samples=args.samples, burn_in=args.burn_in,
                                               replicate_count=args.replicates,
                                               keep_path=True if args.dump_path else None)
        params["dump_path"] = args.dump_path
    return params

def _fail(err: dict, code: int) -> int:
    print(json.dumps(err), file=sys.stderr)
    return code

def main(argv=None):
    argv = argv if argv is not None else sys.argv[1:]
    try:
        args = parse_args(argv)
    except SystemExit as e:
        # usage errors: argparse exits 2, reported as 4
        return 4 if e.code == 2 else int(e.code or 0)
    try:
        cfg = load_config(args.config)
        if args.format:
            cfg["output_format"] = args.format

        out_dir = args.out_dir or cfg.get("out_dir", "reports")
        orchestrator = Orchestrator(cfg)
        result = orchestrator.run(args.command, build_params(args, cfg), out_dir=out_dir)
    except ArmaEntropyError as e:
        return _fail(e.to_dict(), e.exit_code)
    except OSError as e:
        return _fail({"error": type(e).__name__, "message": str(e), "exit_code": 4}, 4)

    payload = result.get("payload", {})
    if args.command == "reproduce":
        print(payload.get("table", ""))
        print("Counts:", json.dumps(payload.get("counts", {})))
    else:
        print(json.dumps(payload, indent=2, default=str))
    print("Done. Artifacts written to", out_dir)
    return int(result.get("exit_code", 0))

if __name__ == "__main__":
    raise SystemExit(main())
