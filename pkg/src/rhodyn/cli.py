"""Batch experiment runner.

Subcommands map one-to-one onto reproduction pipelines:

``simulate``    Monte Carlo of the random-Hamiltonian model -> per-time CSV/JSON
``wishart``     Wishart-surrogate sampling -> raw eigenvalue CSV
``theory``      closed-form curves on a time grid -> CSV
``haar-verify`` Weingarten self-checks -> pass/fail table
``phase-scan``  Gaussian vs Tracy-Widom verdict per time -> CSV
``converge``    randomization times -> CSV

Configuration can come from a flat ``key=value`` file (``--config``);
explicit flags override file values. Every output file starts with
``# key=value`` header lines echoing the fully resolved configuration,
so a run can be reproduced from its own artifacts. Outputs are
deterministic for a fixed seed regardless of ``--workers``.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .bipartite import (BipartiteDims, SchmidtState, custom_schmidt_state,
                        linear_schmidt_state, product_state, two_schmidt_state)
from .rng import RngStream
from . import analysis, theory, weingarten, wishart
from .simulate import monte_carlo

__all__ = ["main", "build_parser"]


def _parse_state(text: str, dims: BipartiteDims) -> SchmidtState:
    if text == "product":
        return product_state()
    if text == "linear":
        return linear_schmidt_state(dims)
    if text.startswith("two-schmidt:"):
        return two_schmidt_state(float(text.split(":", 1)[1]))
    if text.startswith("custom:"):
        weights = np.loadtxt(text.split(":", 1)[1], ndmin=1)
        return custom_schmidt_state(weights)
    raise ValueError(f"unknown state spec {text!r} "
                     "(use product | two-schmidt:p | linear | custom:file)")


def _read_config(path: str) -> dict:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad config line {raw!r} (expected key=value)")
        key, val = line.split("=", 1)
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _merge_config_argv(argv: list) -> list:
    """Expand ``--config FILE`` into flags placed before the user's own.

    Later flags win in argparse, so anything given explicitly on the
    command line overrides the file. Unknown keys fail argument parsing,
    which is the wanted behavior for an invalid config.
    """
    if not argv or not any(a == "--config" or a.startswith("--config=") for a in argv):
        return argv
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv[1:])
    if not known.config:
        return argv
    injected = []
    for key, val in _read_config(known.config).items():
        flag = "--" + key.replace("_", "-")
        if val.lower() in ("true", "false"):
            if val.lower() == "true":
                injected.append(flag)
        else:
            injected.extend([flag, val])
    return [argv[0]] + injected + argv[1:]


def _header(items: dict) -> list:
    return [f"# {k}={items[k]}" for k in sorted(items)]


def _write_csv(path: Path, header_items: dict, columns: list, rows) -> None:
    with open(path, "w") as fh:
        for line in _header(header_items):
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _time_grid(args) -> np.ndarray:
    if args.tsteps < 1:
        raise ValueError("tsteps must be >= 1")
    return np.linspace(args.tmin, args.tmax, args.tsteps)


def _cmd_simulate(args) -> int:
    dims = BipartiteDims(args.n, args.m)
    state = _parse_state(args.state, dims)
    times = _time_grid(args)
    rec = monte_carlo(dims, state, times, args.realizations, seed=args.seed,
                      method=args.method, workers=args.workers, track=args.track)
    # workers is an execution detail with no effect on the numbers, so
    # it stays out of the reproducibility header
    rec.meta.update(tmin=args.tmin, tmax=args.tmax, tsteps=args.tsteps,
                    track=args.track)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rec.to_csv(out / "run.csv")
    rec.to_json(out / "run.json")
    if args.hist_bins:
        rows = []
        for i, t in enumerate(times):
            edges, dens = rec.pooled_histogram(i, bins=args.hist_bins,
                                               bulk_only=args.hist_bulk_only)
            rows.extend((t, edges[j], edges[j + 1], dens[j])
                        for j in range(dens.size))
        _write_csv(out / "hist.csv",
                   {**rec.header_items(), "hist_bins": args.hist_bins,
                    "hist_bulk_only": args.hist_bulk_only},
                   ["t", "bin_left", "bin_right", "density"], rows)
    print(f"simulate: wrote {out / 'run.csv'} and run.json "
          f"({args.realizations} realizations, method={rec.method})")
    return 0


def _cmd_wishart(args) -> int:
    dims = BipartiteDims(args.n, args.m)
    state = _parse_state(args.state, dims)
    a0 = state.matrix(dims)
    g = theory.gue_form_factor(args.time)
    h2 = g * g
    if args.ensemble == "matched":
        params = wishart.matched_params(a0, g, h2, dims, fixed_trace=args.fixed_trace)
    elif args.ensemble == "uncorrelated":
        params = wishart.uncorrelated_params(a0, g, h2, dims, fixed_trace=args.fixed_trace)
    elif args.ensemble == "centered":
        params = wishart.centered_params(a0 @ a0.conj().T, h2, dims,
                                         fixed_trace=args.fixed_trace)
    else:
        raise ValueError(f"unknown ensemble {args.ensemble!r}")
    lam = wishart.sample_eigenvalues(params, args.samples, RngStream(args.seed, 0))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = dict(n=args.n, m=args.m, state=state.label, ensemble=args.ensemble,
                  time=args.time, samples=args.samples, seed=args.seed,
                  fixed_trace=args.fixed_trace)
    rows = [(k, i + 1, lam[k, i]) for k in range(lam.shape[0]) for i in range(lam.shape[1])]
    _write_csv(out / "eigenvalues.csv", header, ["sample", "rank", "value"], rows)
    print(f"wishart: wrote {out / 'eigenvalues.csv'} "
          f"(mean top eigenvalue {lam[:, 0].mean():.6g})")
    return 0


def _cmd_theory(args) -> int:
    dims = BipartiteDims(args.n, args.m)
    times = _time_grid(args)
    rows = []
    for t in times:
        g = theory.gue_form_factor(t)
        g2 = theory.gue_form_factor(2.0 * t)
        pur = theory.purity_asymptotic(g, g2, dims)
        spike = theory.top_eigenvalue_mean(g * g, dims)
        var = theory.top_eigenvalue_variance(g, g2, dims)
        rows.append((t, g, g2, pur,
                     spike.mean if spike.separated else "",
                     var))
    header = dict(n=args.n, m=args.m, tmin=args.tmin, tmax=args.tmax, tsteps=args.tsteps,
                  i_random=theory.random_state_purity(dims),
                  i_long_time=theory.purity_long_time(dims),
                  spike_threshold=1.0 / (dims.n * np.sqrt(dims.kappa)))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "theory.csv", header,
               ["t", "g", "g2", "purity", "lambda1_mean", "lambda1_var"], rows)
    print(f"theory: wrote {out / 'theory.csv'}")
    if args.resolvent_r is not None:
        r = args.resolvent_r
        if not 0.0 <= r < 1.0:
            raise ValueError("--resolvent-r must lie in [0, 1)")
        xi = np.concatenate(([1 + (dims.n - 1) * r], np.full(dims.n - 1, 1 - r)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = theory.resolvent_density(xi, dims)
        rrows = [(lam, dens, "yes" if ok else "NO")
                 for lam, dens, ok in zip(res.grid, res.density, res.converged)]
        _write_csv(out / "resolvent.csv",
                   {**header, "resolvent_r": r, "eps": res.eps},
                   ["lambda", "density", "converged"], rrows)
        bad = int((~res.converged).sum())
        print(f"theory: wrote {out / 'resolvent.csv'} "
              f"({bad} non-converged points)" if bad else
              f"theory: wrote {out / 'resolvent.csv'} (all points converged)")
    return 0


def _cmd_haar_verify(args) -> int:
    dims = [int(v) for v in args.dims.split(",")]
    rows = []
    failed = False
    for dim in dims:
        for p in range(1, args.pmax + 1):
            if dim < p:
                continue
            table = weingarten.weingarten_table(p, dim)
            defect = table.orthogonality_defect()
            ok = defect < 1e-12
            failed |= not ok
            rows.append((p, dim, defect, "pass" if ok else "FAIL"))
            print(f"p={p} dim={dim}: orthogonality defect {defect:.3e} "
                  f"[{'pass' if ok else 'FAIL'}]")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "haar_verify.csv", dict(dims=args.dims, pmax=args.pmax),
                   ["p", "dim", "orthogonality_defect", "status"], rows)
    return 1 if failed else 0


def _cmd_phase_scan(args) -> int:
    dims = BipartiteDims(args.n, args.m)
    a0 = product_state().matrix(dims)
    times = (np.asarray([float(v) for v in args.times.split(",")])
             if args.times else _time_grid(args))
    rows = []
    for idx, t in enumerate(times):
        g = theory.gue_form_factor(t)
        params = wishart.uncorrelated_params(a0, g, g * g, dims)
        lam = wishart.sample_eigenvalues(params, args.samples, RngStream(args.seed, idx))
        verdict = analysis.phase_classify(lam[:, 0])
        rows.append((t, verdict.ks_gauss, verdict.ks_tw, verdict.classification))
        print(f"t={t:g}: ks_gauss={verdict.ks_gauss:.4f} ks_tw={verdict.ks_tw:.4f} "
              f"-> {verdict.classification}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = dict(n=args.n, m=args.m, samples=args.samples, seed=args.seed,
                  times=",".join(f"{t:g}" for t in times))
    _write_csv(out / "phase_scan.csv", header,
               ["t", "ks_gauss", "ks_tw", "classification"], rows)
    return 0


def _cmd_converge(args) -> int:
    dims = BipartiteDims(args.n, args.m if args.m else args.n)
    ct = theory.convergence_times(dims, accuracy=args.accuracy)
    print(f"first_passage={ct.first_passage:.6f} envelope_time={ct.envelope_time:.6f}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        header = dict(n=dims.n, m=dims.m,
                      accuracy=args.accuracy if args.accuracy else 1.0 / dims.n)
        _write_csv(out / "converge.csv", header,
                   ["first_passage", "envelope_time"],
                   [(ct.first_passage, ct.envelope_time)])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rhodyn",
        description="Subsystem spectral statistics under random-Hamiltonian evolution.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, time_grid=True):
        p.add_argument("--config", help="flat key=value config file; flags override")
        p.add_argument("--n", type=int, default=64, help="subsystem dimension")
        p.add_argument("--m", type=int, default=0,
                       help="environment dimension (default: equal to --n)")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--out", default="out", help="output directory")
        if time_grid:
            p.add_argument("--tmin", type=float, default=0.0)
            p.add_argument("--tmax", type=float, default=6.0)
            p.add_argument("--tsteps", type=int, default=60, help="number of grid points")

    p = sub.add_parser("simulate", help="Monte Carlo of the random-Hamiltonian model",
                       description="CSV columns: t, purity_mean, purity_se, "
                                   "eig{1..k}_mean, lambda1_var, gap12.")
    common(p)
    p.add_argument("--state", default="product",
                   help="product | two-schmidt:p | linear | custom:file")
    p.add_argument("--realizations", type=int, default=200)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--method", default="auto", choices=["auto", "dense", "spectral"])
    p.add_argument("--track", type=int, default=4, help="leading eigenvalues to record")
    p.add_argument("--hist-bins", type=int, default=0,
                   help="also write hist.csv with pooled eigenvalue histograms")
    p.add_argument("--hist-bulk-only", action="store_true",
                   help="exclude the top eigenvalue from the pooled histograms")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("wishart", help="sample a Wishart surrogate ensemble",
                       description="CSV columns: sample, rank, value (sorted descending).")
    common(p, time_grid=False)
    p.add_argument("--state", default="product")
    p.add_argument("--ensemble", default="uncorrelated",
                   choices=["matched", "uncorrelated", "centered"])
    p.add_argument("--time", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--fixed-trace", action="store_true")
    p.set_defaults(func=_cmd_wishart)

    p = sub.add_parser("theory", help="closed-form curves on a time grid",
                       description="CSV columns: t, g, g2, purity, lambda1_mean "
                                   "(blank when merged with the bulk), lambda1_var. "
                                   "With --resolvent-r also writes resolvent.csv "
                                   "(lambda, density, converged) for the "
                                   "product-state correlation spectrum.")
    common(p)
    p.add_argument("--resolvent-r", type=float, default=None,
                   help="also solve the self-consistent resolvent at this "
                        "correlation strength")
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("haar-verify", help="Weingarten-table self-checks")
    p.add_argument("--dims", default="4,8", help="comma-separated dimensions")
    p.add_argument("--pmax", type=int, default=4)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_haar_verify)

    p = sub.add_parser("phase-scan", help="Gaussian vs Tracy-Widom verdict per time",
                       description="CSV columns: t, ks_gauss, ks_tw, classification.")
    common(p)
    p.add_argument("--times", default=None,
                   help="comma-separated times (overrides tmin/tmax/tsteps)")
    p.add_argument("--samples", type=int, default=500)
    p.set_defaults(func=_cmd_phase_scan)

    p = sub.add_parser("converge", help="randomization times")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--accuracy", type=float, default=None,
                   help="purity accuracy target (default 1/n)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_converge)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _merge_config_argv(argv)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    args = parser.parse_args(argv)
    if getattr(args, "m", None) == 0:
        args.m = args.n
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
