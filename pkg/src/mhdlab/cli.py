"""Command-line entry point: kernel scans, linear-flow experiments, the
nonlinear solver, and the verification suites, all emitting plot-ready CSV
or JSON plus a run manifest."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import kernel as _kernel
from . import linear as _linear
from . import solver as _solver
from . import verify as _verify

_FLOAT_FMT = "{:.17g}"


def _fmt(x) -> str:
    if isinstance(x, float):
        return _FLOAT_FMT.format(x)
    return str(x)


def _write_manifest(out_path: Path, args_ns, outputs, t_start: float,
                    config_digest: str = "") -> None:
    manifest = {
        "command_line": " ".join(sys.argv),
        "config_digest": config_digest,
        "seed": getattr(args_ns, "seed", None),
        "version": __version__,
        "start_time": t_start,
        "end_time": time.time(),
        "outputs": [str(p) for p in outputs],
    }
    out_path.write_text(json.dumps(manifest, indent=2) + "\n")


def _digest_args(ns: argparse.Namespace) -> str:
    payload = {k: v for k, v in sorted(vars(ns).items()) if k != "func"}
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()


def _emit_csv(rows, out: str, sidecar_args, t_start) -> None:
    text = "\n".join(",".join(_fmt(x) for x in row) for row in rows) + "\n"
    if out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    _write_manifest(path.with_suffix(path.suffix + ".manifest.json"),
                    sidecar_args, [path], t_start, _digest_args(sidecar_args))


def _parse_float_list(text: str):
    return [float(x) for x in text.split(",") if x.strip() != ""]


# ---------------------------------------------------------------------------


def cmd_kernel_scan(ns) -> int:
    t_start = time.time()
    ts = _parse_float_list(ns.t)
    ks = np.linspace(-ns.kmax, ns.kmax, ns.n)
    rows = [["t", "xi", "eta", "A", "K", "K1", "dtK", "ddtK", "comp",
             "comp_x", "dt_comp"] + [f"envelope_{i}" for i in range(1, 9)]]
    XI, ETA = np.meshgrid(ks, ks, indexing="ij")
    for t in ts:
        kv = _kernel.kernel_values(t, XI, ETA)
        env = [_kernel.bound_envelope(i, t, XI, ETA, ns.c_decay) for i in range(1, 9)]
        A = np.hypot(XI, ETA)
        for i in range(ns.n):
            for j in range(ns.n):
                rows.append([t, XI[i, j], ETA[i, j], A[i, j], kv.K[i, j],
                             kv.K1[i, j], kv.dtK[i, j], kv.ddtK[i, j],
                             kv.comp[i, j], kv.comp_x[i, j], kv.dt_comp[i, j]]
                            + [float(e[i, j]) for e in env])
    _emit_csv(rows, ns.out, ns, t_start)
    return 0


def cmd_linear_oracle(ns) -> int:
    t_start = time.time()
    res = _linear.oracle_scan(samples=ns.samples, seed=ns.seed)
    payload = json.dumps(res, indent=2, default=float) + "\n"
    if ns.json == "-":
        sys.stdout.write(payload)
    else:
        path = Path(ns.json)
        path.write_text(payload)
        _write_manifest(path.with_suffix(".manifest.json"), ns, [path],
                        t_start, _digest_args(ns))
    return 0 if res["max_rel_err"] <= 1e-8 else 1


def cmd_linear_charpoly(ns) -> int:
    res = _verify.check_charpoly(kmax=ns.kmax, n=ns.n)
    print(f"max residual ratio (vs 1e-10*(1+A^8)): {_fmt(res.max_ratio)} "
          f"at {res.worst}")
    return 0 if res.verdict == "PASS" else 1


def cmd_linear_decay(ns) -> int:
    t_start = time.time()
    times = np.geomspace(ns.t0, ns.t1, ns.points)
    report = _linear.propagator_decay_experiment(ns.prop, init=ns.init, times=times,
                                                 seed=ns.seed)
    print(f"{ns.prop}: fitted slope {report.fitted_slope:+.4f} "
          f"(target {report.target_slope:+.2f}), r^2 = {report.r_squared:.5f}")
    outputs = []
    if ns.csv:
        rows = [["t", "value"]] + [[float(t), float(v)]
                                   for t, v in zip(report.times, report.values)]
        _emit_csv(rows, ns.csv, ns, t_start)
        if ns.csv != "-":
            outputs.append(Path(ns.csv))
    if ns.json:
        Path(ns.json).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        outputs.append(Path(ns.json))
    return 0


def cmd_linear_symbol_norm(ns) -> int:
    region = _linear.parse_region(ns.region)
    val = _linear.symbol_norm(ns.symbol, region, ns.q_xi, ns.q_eta, ns.t)
    print(_fmt(val))
    return 0


def cmd_simulate(ns) -> int:
    t_start = time.time()
    try:
        cfg = _solver.SolverConfig.from_json(ns.config) if ns.config else _solver.SolverConfig()
        if not ns.config:
            cfg.validate()
    except _solver.ConfigError as err:
        print("config errors:", file=sys.stderr)
        for p in err.problems:
            print(f"  - {p}", file=sys.stderr)
        return 2
    out = Path(ns.out)
    out.mkdir(parents=True, exist_ok=True)
    record = _solver.simulate(cfg, out_dir=out)
    outputs = [out / "trajectory.csv"]
    _write_manifest(out / "manifest.json", ns, outputs, t_start, cfg.digest())
    if record.aborted:
        print(f"run aborted: {record.aborted}", file=sys.stderr)
        return 1
    print(f"completed: {len(record.times)} outputs in {out}")
    return 0


def cmd_verify(ns) -> int:
    t_start = time.time()
    if ns.mode == "one":
        if ns.claim not in _verify.CLAIMS:
            print(f"unknown claim {ns.claim!r}; known claims:", file=sys.stderr)
            for cid in sorted(_verify.CLAIMS):
                print(f"  {cid}", file=sys.stderr)
            return 2
        res = _verify.run_claim(ns.claim)
        print(json.dumps(res.to_dict(), indent=2, default=float))
        return 0 if res.verdict in ("PASS", "INFO") else 1
    results = _verify.run_all(report_path=ns.report, seed=ns.seed, threads=ns.threads)
    failed = [cid for cid, r in results.items() if r.verdict == "FAIL"]
    for cid in sorted(results):
        r = results[cid]
        print(f"{r.verdict:4s} {cid}: C = {_fmt(float(r.fitted_C))}")
    if ns.report:
        _write_manifest(Path(ns.report).with_suffix(".manifest.json"), ns,
                        [Path(ns.report)], t_start, _digest_args(ns))
    if failed:
        print(f"FAILED claims: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhdlab",
        description="Numerical laboratory for the linear kernels and small-data "
                    "dynamics of 2D compressible MHD without magnetic diffusion.")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker cap for parallel scans")
    sub = parser.add_subparsers(dest="command", required=True)

    p_kernel = sub.add_parser("kernel", help="kernel symbol tools")
    kernel_sub = p_kernel.add_subparsers(dest="subcommand", required=True)
    p_scan = kernel_sub.add_parser("scan", help="tabulate kernel symbols and envelopes")
    p_scan.add_argument("--t", required=True, help="comma-separated times")
    p_scan.add_argument("--kmax", type=float, default=8.0)
    p_scan.add_argument("--n", type=int, default=64)
    p_scan.add_argument("--c-decay", type=float, default=_kernel.DEFAULT_C_DECAY)
    p_scan.add_argument("--out", default="-")
    p_scan.set_defaults(func=cmd_kernel_scan)

    p_linear = sub.add_parser("linear", help="linear-flow experiments")
    linear_sub = p_linear.add_subparsers(dest="subcommand", required=True)

    p_oracle = linear_sub.add_parser("oracle-test",
                                     help="kernel semigroup vs matrix exponential")
    p_oracle.add_argument("--samples", type=int, default=1000)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--json", default="-")
    p_oracle.set_defaults(func=cmd_linear_oracle)

    p_char = linear_sub.add_parser("charpoly", help="diagonalization residual scan")
    p_char.add_argument("--kmax", type=float, default=8.0)
    p_char.add_argument("--n", type=int, default=64)
    p_char.set_defaults(func=cmd_linear_charpoly)

    p_decay = linear_sub.add_parser("decay", help="propagator decay experiment")
    p_decay.add_argument("--prop", required=True,
                         choices=sorted(_linear.PROPAGATORS))
    p_decay.add_argument("--init", default="gaussian",
                         choices=["gaussian", "band-limited random"])
    p_decay.add_argument("--t0", type=float, default=10.0)
    p_decay.add_argument("--t1", type=float, default=1000.0)
    p_decay.add_argument("--points", type=int, default=12)
    p_decay.add_argument("--seed", type=int, default=0)
    p_decay.add_argument("--csv", default="")
    p_decay.add_argument("--json", default="")
    p_decay.set_defaults(func=cmd_linear_decay)

    p_sym = linear_sub.add_parser("symbol-norm", help="one symbol norm value")
    p_sym.add_argument("--symbol", required=True, choices=sorted(_linear.SYMBOLS))
    p_sym.add_argument("--region", default="le1", help="le1, all, or sim<N>")
    p_sym.add_argument("--q-xi", type=float, default=1.0)
    p_sym.add_argument("--q-eta", type=float, default=1.0)
    p_sym.add_argument("--t", type=float, required=True)
    p_sym.set_defaults(func=cmd_linear_symbol_norm)

    p_sim = sub.add_parser("simulate", help="run the nonlinear solver")
    p_sim.add_argument("--config", default="", help="config JSON path")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.add_argument("--seed", type=int, default=None,
                       help="unused when a config file is given")
    p_sim.set_defaults(func=cmd_simulate)

    p_verify = sub.add_parser("verify", help="inequality verification suites")
    verify_sub = p_verify.add_subparsers(dest="mode", required=True)
    p_all = verify_sub.add_parser("all", help="run every claim")
    p_all.add_argument("--report", default="report.json")
    p_all.add_argument("--seed", type=int, default=0)
    p_all.set_defaults(func=cmd_verify, mode="all")
    p_one = verify_sub.add_parser("one", help="run a single claim")
    p_one.add_argument("--claim", required=True)
    p_one.add_argument("--seed", type=int, default=0)
    p_one.set_defaults(func=cmd_verify, mode="one")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    ns.threads = getattr(ns, "threads", 1)
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
