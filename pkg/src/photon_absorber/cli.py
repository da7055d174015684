"""Command-line front end.

Subcommands:

* ``design``            -- emit lambda / gamma / gamma_T schedule tables
* ``simulate``          -- integrate one (or all) formulations, write CSV
* ``sweep``             -- final excitation probability across truncation times
* ``reproduce-figure``  -- the three-truncation excitation-probability figure
* ``verify``            -- run the self-verification suite

Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 verification
failure.  Report commands render a matplotlib PNG next to each CSV.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import os
import sys

import numpy as np

from . import coupling as cpl
from . import dynamics as dyn
from . import oracle as orc
from . import plotting, slh, verify
from .coupling import DIVERGENT
from .trajectory import Trajectory, write_csv_atomic
from .wavepacket import (Wavepacket, load_tabulated_csv, make_exponential,
                         make_gaussian)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_VERIFY = 3


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_wavepacket(spec: str) -> Wavepacket:
    """Parse `exp:c=...`, `gauss:t0=...,width=...`, or `file:path.csv`."""
    if ":" not in spec:
        raise UsageError(f"wavepacket spec '{spec}' must look like kind:params")
    kind, rest = spec.split(":", 1)
    if kind == "file":
        if not os.path.exists(rest):
            raise UsageError(f"wavepacket file not found: {rest}")
        return load_tabulated_csv(rest)
    params = {}
    for item in rest.split(","):
        if "=" not in item:
            raise UsageError(f"bad wavepacket parameter '{item}' in '{spec}'")
        k, v = item.split("=", 1)
        try:
            params[k.strip()] = float(v)
        except ValueError as exc:
            raise UsageError(f"bad numeric value '{v}' in '{spec}'") from exc
    try:
        if kind == "exp":
            return make_exponential(params["c"])
        if kind == "gauss":
            return make_gaussian(params["t0"], params["width"])
    except KeyError as exc:
        raise UsageError(f"missing parameter {exc} in wavepacket spec '{spec}'") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError(f"unknown wavepacket kind '{kind}' (expected exp, gauss, file)")


def parse_truncation(spec: str, t_end: float) -> float:
    """Absolute time, or `frac:x` meaning x * t_end."""
    if spec.startswith("frac:"):
        frac = float(spec[5:])
        return frac * t_end
    return float(spec)


def default_t_end(w: Wavepacket) -> float:
    from .wavepacket import WavepacketKind
    if w.kind is WavepacketKind.EXPONENTIAL_DECAY:
        return 10.0 / w.params["c"]
    return w.t_max


def add_common_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--wavepacket", default=f"exp:c={verify.PAPER_C:g}",
                   help="kind:params or file:path (default exp:c=7.2e7)")
    p.add_argument("--phi0", type=float, default=0.0, help="absorber phase (rad)")
    p.add_argument("--T", default=None,
                   help="truncation time, absolute or frac:x of t_end")
    p.add_argument("--t-end", type=float, default=None, dest="t_end")
    p.add_argument("--grid", type=int, default=dyn.DEFAULT_GRID_POINTS)
    p.add_argument("--rel-tol", type=float, default=dyn.DEFAULT_REL_TOL, dest="rel_tol")
    p.add_argument("--abs-tol", type=float, default=dyn.DEFAULT_ABS_TOL, dest="abs_tol")
    p.add_argument("--out", default=".", help="output file or directory")
    p.add_argument("--no-plot", action="store_true", help="skip PNG rendering")


def _validate_common(args) -> tuple[Wavepacket, float]:
    w = parse_wavepacket(args.wavepacket)
    t_end = args.t_end if args.t_end is not None else default_t_end(w)
    if not t_end > 0.0:
        raise UsageError(f"t_end must be positive, got {t_end}")
    if not (0.0 < args.rel_tol < 1.0) or not (0.0 < args.abs_tol < 1.0):
        raise UsageError("tolerances must lie in (0, 1)")
    if args.grid < 2:
        raise UsageError("grid must have at least 2 points")
    return w, t_end


def _out_dir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _schedule_rows(times, sched):
    for t in times:
        v = sched(t)
        if v is DIVERGENT:
            yield [f"{t:.17g}", "divergent", "divergent", "divergent"]
        else:
            yield [f"{t:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}", f"{abs(v):.17g}"]


def cmd_design(args) -> int:
    w, t_end = _validate_common(args)
    out = _out_dir(args)
    times = np.linspace(0.0, t_end, args.grid)

    lam = cpl.generator_coupling(w)
    gam = cpl.absorber_coupling(w, phi0=args.phi0)
    write_csv_atomic(os.path.join(out, "lambda.csv"), ["t", "re", "im", "abs"],
                     _schedule_rows(times, lam))
    write_csv_atomic(os.path.join(out, "gamma_exact.csv"), ["t", "re", "im", "abs"],
                     _schedule_rows(times, gam))

    # closed-form identity residuals at interior sample times
    worst = 0.0
    for t in times[1:-1:max(args.grid // 16, 1)]:
        xi2 = abs(w.amplitude(t)) ** 2
        tail, head = w.tail_energy(t), w.head_energy(t)
        if tail > 1e-6 and xi2 > 0.0:
            worst = max(worst, abs(abs(lam(t)) ** 2 * tail - xi2) / xi2)
        gv = gam(t)
        if head > 1e-6 and xi2 > 0.0 and gv is not DIVERGENT:
            worst = max(worst, abs(abs(gv) ** 2 * head - xi2) / xi2)
    print(f"identity residual (|lambda|^2 tail, |gamma|^2 head vs |xi|^2): {worst:.3e}")

    plots = {"lambda": [lam(t) for t in times]}
    if args.T is not None:
        t_trunc = parse_truncation(args.T, t_end)
        gam_t = cpl.truncated_coupling(w, phi0=args.phi0, T=t_trunc)
        write_csv_atomic(os.path.join(out, "gamma_truncated.csv"),
                         ["t", "re", "im", "abs"], _schedule_rows(times, gam_t))
        vals = np.array([gam_t(t) for t in times])
        print(f"T = {t_trunc:.6g}, head(T) = {w.head_energy(t_trunc):.6g}, "
              f"max|gamma_T| = {np.max(np.abs(vals)):.6g}")
        plots["gamma_T"] = vals
    if not args.no_plot:
        plotting.plot_schedules(times, plots, os.path.join(out, "schedules.png"))
    return EXIT_OK


def _seeded_rho0(w: Wavepacket, phi0: float):
    eps = w.time_at_head(dyn.SEED_HEAD)
    psi = np.array([0.0,
                    math.sqrt(w.tail_energy(eps)),
                    np.exp(-1j * phi0) * math.sqrt(w.head_energy(eps)),
                    0.0], dtype=complex)
    return eps, orc.pure_state_density(psi)


def run_formulation(formulation: str, w: Wavepacket, phi0: float,
                    t_trunc: float | None, t_end: float,
                    rel_tol: float, abs_tol: float, grid_points: int):
    """Run one formulation and return (times, n2, trajectory-or-None)."""
    lam = cpl.generator_coupling(w)
    if t_trunc is not None:
        gam = cpl.truncated_coupling(w, phi0=phi0, T=t_trunc)
    else:
        gam = cpl.absorber_coupling(w, phi0=phi0)
    if formulation == "amplitudes":
        traj = dyn.integrate_amplitudes(lam, gam, t_end=t_end, rel_tol=rel_tol,
                                        abs_tol=abs_tol, grid_points=grid_points)
        return traj.times, traj.column("n2"), traj
    if formulation == "moments":
        traj = dyn.integrate_moments(lam, gam, t_end=t_end, rel_tol=rel_tol,
                                     abs_tol=abs_tol, grid_points=grid_points)
        return traj.times, traj.column("n2"), traj
    if formulation == "oracle":
        if t_trunc is None:
            t0, rho0 = _seeded_rho0(w, phi0)
        else:
            t0 = 0.0
            rho0 = orc.pure_state_density(np.array([0, 1, 0, 0], dtype=complex))
        g = slh.generator_absorber_cascade(lam, gam)
        dm = orc.master_equation_evolve(g, rho0, t0, t_end, rel_tol=rel_tol,
                                        abs_tol=abs_tol, grid_points=grid_points)
        n2 = dm.expectations(slh.N2).real
        traj = Trajectory(times=dm.times,
                          columns={"n2": n2,
                                   "n1": dm.expectations(slh.N1).real,
                                   "trace": np.einsum("tii->t", dm.rhos).real},
                          metadata=dm.metadata)
        return dm.times, n2, traj
    raise UsageError(f"unknown formulation '{formulation}'")


def cmd_simulate(args) -> int:
    w, t_end = _validate_common(args)
    t_trunc = parse_truncation(args.T, t_end) if args.T is not None else None
    if t_trunc is not None and not 0.0 < t_trunc < t_end:
        raise UsageError(f"T must lie in (0, t_end), got {t_trunc}")
    out = args.out if args.out != "." else "trajectory.csv"

    if args.formulation == "all":
        results = {}
        times = None
        for form in ("amplitudes", "moments", "oracle"):
            times, n2, _ = run_formulation(form, w, args.phi0, t_trunc, t_end,
                                           args.rel_tol, args.abs_tol, args.grid)
            results[form] = n2
        merged = Trajectory(times=times,
                            columns={f"n2_{k}": v for k, v in results.items()})
        merged.to_csv(out)
        stack = np.vstack(list(results.values()))
        dev = float(np.max(np.abs(stack - stack[0])))
        print(f"n2(t_end)={results['amplitudes'][-1]:.6g}")
        print(f"max cross-formulation deviation: {dev:.3e}")
        n2_plot = {k: v for k, v in results.items()}
    else:
        times, n2, traj = run_formulation(args.formulation, w, args.phi0, t_trunc,
                                          t_end, args.rel_tol, args.abs_tol, args.grid)
        traj.to_csv(out)
        print(f"n2(t_end)={n2[-1]:.6g}")
        if "conservation_residual" in traj.metadata:
            print(f"conservation residual: {traj.metadata['conservation_residual']:.3e}")
        n2_plot = {args.formulation: n2}
    if not args.no_plot:
        plotting.plot_excitation(times, n2_plot, os.path.splitext(out)[0] + ".png")
    return EXIT_OK


def _sweep_worker(payload):
    (spec, phi0, t_trunc, t_end, rel_tol, abs_tol, grid_points) = payload
    w = parse_wavepacket(spec)
    lam = cpl.generator_coupling(w)
    gam = cpl.truncated_coupling(w, phi0=phi0, T=t_trunc)
    mom = dyn.integrate_moments(lam, gam, t_end=t_end, rel_tol=rel_tol,
                                abs_tol=abs_tol, grid_points=grid_points)
    times = np.linspace(0.0, t_end, grid_points)
    max_abs = float(np.max(np.abs([gam(t) for t in times])))
    return float(mom.column("n2")[-1]), max_abs


def cmd_sweep(args) -> int:
    w, t_end = _validate_common(args)
    t_values = sorted(parse_truncation(s, t_end) for s in args.T_values)
    for t_trunc in t_values:
        if not 0.0 < t_trunc < t_end:
            raise UsageError(f"sweep T values must lie in (0, t_end), got {t_trunc}")
    out = args.out if args.out != "." else "sweep.csv"

    payloads = [(args.wavepacket, args.phi0, t_trunc, t_end,
                 args.rel_tol, args.abs_tol, args.grid) for t_trunc in t_values]
    results = []
    if args.jobs > 1 and len(payloads) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_sweep_worker, p) for p in payloads]
            for t_trunc, fut in zip(t_values, futures):
                try:
                    results.append((t_trunc, *fut.result()))
                except Exception as exc:  # single-row failure must not abort the sweep
                    print(f"sweep row T={t_trunc:g} failed: {exc}", file=sys.stderr)
                    results.append((t_trunc, math.nan, math.nan))
    else:
        for t_trunc, payload in zip(t_values, payloads):
            try:
                results.append((t_trunc, *_sweep_worker(payload)))
            except Exception as exc:
                print(f"sweep row T={t_trunc:g} failed: {exc}", file=sys.stderr)
                results.append((t_trunc, math.nan, math.nan))

    write_csv_atomic(out, ["T", "n2_final", "max_abs_gamma"],
                     ([f"{t:.17g}", f"{n2:.17g}", f"{mg:.17g}"]
                      for t, n2, mg in results))
    for t_trunc, n2, _ in results:
        print(f"T={t_trunc:.6g}  n2_final={n2:.6g}")
    if not args.no_plot and results:
        ok = [(t, n2) for t, n2, _ in results if not math.isnan(n2)]
        if ok:
            plotting.plot_sweep([t for t, _ in ok], [n2 for _, n2 in ok],
                                os.path.splitext(out)[0] + ".png")
    return EXIT_OK


def cmd_reproduce_figure(args) -> int:
    out = _out_dir(args)
    w = make_exponential(verify.PAPER_C)
    lam = cpl.generator_coupling(w)
    t1 = verify.PAPER_T1
    columns = {}
    labels = {0.001: "n2_T0p001", 0.01: "n2_T0p01", 0.1: "n2_T0p1"}
    times = None
    for frac, name in labels.items():
        gam = cpl.truncated_coupling(w, T=frac * t1)
        mom = dyn.integrate_moments(lam, gam, t_end=t1, rel_tol=args.rel_tol,
                                    abs_tol=args.abs_tol, grid_points=args.grid)
        times = mom.times
        columns[name] = mom.column("n2")
    traj = Trajectory(times=times, columns=columns)
    csv_path = os.path.join(out, "figure1.csv")
    traj.to_csv(csv_path)
    finals = {name: columns[name][-1] for name in labels.values()}
    print("terminal n2:", ", ".join(f"{k}={v:.4f}" for k, v in finals.items()))
    if not args.no_plot:
        plotting.plot_excitation(
            times, {f"T = {f:g} t1": columns[n] for f, n in labels.items()},
            os.path.join(out, "figure1.png"),
            title="Excitation probability under truncated coupling")
    print(f"wrote {csv_path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_checks(quick=args.quick,
                                rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    for r in results:
        print(r)
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(results)} checks failed")
        return EXIT_VERIFY
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="photon-absorber",
                     description="Design and verify coupling schedules for "
                                 "single-photon absorption.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="emit coupling-schedule tables")
    add_common_options(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="integrate one or all formulations")
    add_common_options(p)
    p.add_argument("--formulation", default="amplitudes",
                   choices=["amplitudes", "moments", "oracle", "all"])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="sweep truncation times")
    add_common_options(p)
    p.add_argument("--T-values", nargs="*", default=[], dest="T_values",
                   help="truncation times (absolute or frac:x)")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce-figure",
                       help="three-truncation excitation-probability figure")
    p.add_argument("--grid", type=int, default=dyn.DEFAULT_GRID_POINTS)
    p.add_argument("--rel-tol", type=float, default=dyn.DEFAULT_REL_TOL, dest="rel_tol")
    p.add_argument("--abs-tol", type=float, default=dyn.DEFAULT_ABS_TOL, dest="abs_tol")
    p.add_argument("--out", default=".")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_reproduce_figure)

    p = sub.add_parser("verify", help="run the self-verification suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--rel-tol", type=float, default=dyn.DEFAULT_REL_TOL, dest="rel_tol")
    p.add_argument("--abs-tol", type=float, default=dyn.DEFAULT_ABS_TOL, dest="abs_tol")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except dyn.IntegrationError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
