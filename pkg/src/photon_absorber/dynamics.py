"""The three dynamical formulations of the absorption problem.

* single-excitation amplitudes psi2 (generator excited), psi3 (absorber
  excited) and the accumulated output probability p_out;
* Heisenberg moments <n2>, <sigma_{1,+} sigma_{2,-}>, <n1 sigma_{2,z}>,
  <n1 n2>;
* the zero-dynamics closed forms alpha = sqrt(tail), beta = e^{-i phi0}
  sqrt(head) with the absorber coupling recovered from the no-output
  constraint.

The absorber phase phi0 is an exact gauge: rotating psi3 by e^{i phi0}
maps the equations onto the phi0 = 0 system.  The integrators exploit
this and integrate the phase-stripped system, reattaching the phase in
the reported columns, so observables are bit-identical across phi0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .coupling import (DIVERGENT, CouplingKind, CouplingSchedule,
                       DivergentCouplingError)
from .trajectory import Trajectory
from .wavepacket import Wavepacket

DEFAULT_REL_TOL = 1e-9
DEFAULT_ABS_TOL = 1e-12
DEFAULT_GRID_POINTS = 2001
# head energy at which exact-gamma runs are seeded with the closed forms
SEED_HEAD = 1e-12


class IntegrationError(RuntimeError):
    """Integrator failure (step underflow or divergent coupling in range)."""


def _stripped_gamma(gam: CouplingSchedule):
    """gamma with the constant phase e^{i phi0} removed (exact gauge).

    Rebuilds the schedule with phi0 = 0 rather than multiplying by the
    conjugate phase, so phi0 = 0 and phi0 != 0 runs evaluate bit-identical
    right-hand sides.
    """
    base = replace(gam, phi0=0.0) if gam.phi0 != 0.0 else gam

    def g0(t: float):
        v = base(t)
        if v is DIVERGENT:
            raise DivergentCouplingError(f"coupling is divergent at t = {t}")
        return v

    return g0


def _start_time(gam: CouplingSchedule, t_start: float | None) -> tuple[float, bool]:
    """Resolve the start time; exact absorbers are seeded at head = SEED_HEAD."""
    if gam.kind is CouplingKind.EXACT_ABSORBER:
        eps = gam.wavepacket.time_at_head(SEED_HEAD)
        if t_start is None or t_start < eps:
            return eps, True
        return t_start, True
    return (0.0 if t_start is None else t_start), False


def _solve(rhs, t0, t1, y0, rtol, atol, grid_points):
    grid = np.linspace(t0, t1, grid_points)
    sol = solve_ivp(rhs, (t0, t1), y0, method="RK45", t_eval=grid,
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise IntegrationError(f"integrator failed: {sol.message}")
    return grid, sol.y


def integrate_amplitudes(lam: CouplingSchedule, gam: CouplingSchedule,
                         t_start: float | None = None, t_end: float = None,
                         rel_tol: float = DEFAULT_REL_TOL,
                         abs_tol: float = DEFAULT_ABS_TOL,
                         grid_points: int = DEFAULT_GRID_POINTS) -> Trajectory:
    """Integrate the single-excitation amplitude ODEs.

    d psi2/dt = -1/2 |lambda|^2 psi2
    d psi3/dt = -1/2 |gamma|^2 psi3 - gamma^* lambda psi2
    d p_out/dt = |lambda psi2 + gamma psi3|^2

    Exact-gamma runs are seeded at the time eps where head(eps) = 1e-12
    with psi2 = sqrt(tail(eps)), psi3 = e^{-i phi0} sqrt(head(eps)).
    """
    if t_end is None:
        raise ValueError("t_end is required")
    w = gam.wavepacket
    t0, seeded = _start_time(gam, t_start)
    if t0 >= t_end:
        raise ValueError(f"empty integration interval [{t0}, {t_end}]")
    g0 = _stripped_gamma(gam)

    if seeded and (t_start is None or t_start <= t0):
        y0 = [math.sqrt(w.tail_energy(t0)), 0.0, math.sqrt(w.head_energy(t0)), 0.0, 0.0]
    else:
        y0 = [1.0, 0.0, 0.0, 0.0, 0.0]

    def rhs(t, y):
        p2 = y[0] + 1j * y[1]
        p3 = y[2] + 1j * y[3]
        lv = lam(t)
        gv = g0(t)
        d2 = -0.5 * abs(lv) ** 2 * p2
        d3 = -0.5 * abs(gv) ** 2 * p3 - np.conj(gv) * lv * p2
        dp = abs(lv * p2 + gv * p3) ** 2
        return [d2.real, d2.imag, d3.real, d3.imag, dp]

    try:
        grid, y = _solve(rhs, t0, t_end, y0, rel_tol, abs_tol, grid_points)
    except DivergentCouplingError as exc:
        raise IntegrationError(str(exc)) from exc

    psi2 = y[0] + 1j * y[1]
    chi = y[2] + 1j * y[3]
    p_out = y[4]
    phase = cmath.exp(-1j * gam.phi0)
    psi3 = phase * chi
    # observables evaluated on the phase-stripped state so they are
    # bit-identical across phi0
    n2 = np.abs(chi) ** 2
    gvals = np.array([g0(t) for t in grid])
    lvals = np.array([lam(t) for t in grid])
    out_amp = lvals * psi2 + gvals * chi

    cons = np.max(np.abs(np.abs(psi2) ** 2 + n2 + p_out - 1.0))
    meta = {"formulation": "amplitudes", "phi0": gam.phi0,
            "rel_tol": rel_tol, "abs_tol": abs_tol,
            "t_start": t0, "t_end": t_end, "seeded": seeded,
            "wavepacket": w.describe(),
            "exact_gamma": gam.kind is CouplingKind.EXACT_ABSORBER,
            "conservation_residual": float(cons)}
    if gam.T is not None:
        meta["T"] = gam.T
    return Trajectory(times=grid,
                      columns={"psi2": psi2, "psi3": psi3, "p_out": p_out,
                               "n2": n2, "out_amp": out_amp},
                      metadata=meta)


def integrate_moments(lam: CouplingSchedule, gam: CouplingSchedule,
                      t_end: float,
                      rel_tol: float = DEFAULT_REL_TOL,
                      abs_tol: float = DEFAULT_ABS_TOL,
                      grid_points: int = DEFAULT_GRID_POINTS,
                      full_system: bool = False) -> Trajectory:
    """Integrate the Heisenberg moment ODEs.

    d<n2>/dt    = -|g|^2 <n2> - g^* l <c>^* - g l^* <c>
    d<c>/dt     = -1/2 (|l|^2 + |g|^2) <c> + g^* l <n1 sz>
    d<n1 sz>/dt = -|l|^2 <n1 sz> + 2 |g|^2 <n1 n2>
    d<n1 n2>/dt = -(|l|^2 + |g|^2) <n1 n2>

    where c = sigma_{1,+} sigma_{2,-}.  With the standard initial
    conditions <n1 n2> stays 0 and <n1 sz>(t) = -tail(t) in closed form;
    the default fast path steps only <n2> and <c>.  ``full_system=True``
    integrates all four equations numerically instead.
    """
    w = gam.wavepacket
    t0, seeded = _start_time(gam, None)
    if t0 >= t_end:
        raise ValueError(f"empty integration interval [{t0}, {t_end}]")
    g0 = _stripped_gamma(gam)

    if seeded:
        h0 = w.head_energy(t0)
        w0 = w.tail_energy(t0)
        n2_0, cross0, n1sz_0 = h0, math.sqrt(h0 * w0), -w0
    else:
        n2_0, cross0, n1sz_0 = 0.0, 0.0, -1.0

    if full_system:
        y0 = [n2_0, cross0.real if seeded else 0.0, 0.0, n1sz_0, 0.0]

        def rhs(t, y):
            n2, rc, ic, n1sz, n1n2 = y
            lv = lam(t)
            gv = g0(t)
            cross = rc + 1j * ic
            l2, g2 = abs(lv) ** 2, abs(gv) ** 2
            dn2 = -g2 * n2 - 2.0 * np.real(np.conj(gv) * lv * np.conj(cross))
            dcross = -0.5 * (l2 + g2) * cross + np.conj(gv) * lv * n1sz
            dn1sz = -l2 * n1sz + 2.0 * g2 * n1n2
            dn1n2 = -(l2 + g2) * n1n2
            return [dn2, dcross.real, dcross.imag, dn1sz, dn1n2]
    else:
        y0 = [n2_0, cross0.real if seeded else 0.0, 0.0]

        def rhs(t, y):
            n2, rc, ic = y
            lv = lam(t)
            gv = g0(t)
            cross = rc + 1j * ic
            dn2 = -abs(gv) ** 2 * n2 - 2.0 * np.real(np.conj(gv) * lv * np.conj(cross))
            dcross = (-0.5 * (abs(lv) ** 2 + abs(gv) ** 2) * cross
                      + np.conj(gv) * lv * (-w.tail_energy(t)))
            return [dn2, dcross.real, dcross.imag]

    try:
        grid, y = _solve(rhs, t0, t_end, y0, rel_tol, abs_tol, grid_points)
    except DivergentCouplingError as exc:
        raise IntegrationError(str(exc)) from exc

    phase = cmath.exp(-1j * gam.phi0)
    n2 = y[0]
    cross = phase * (y[1] + 1j * y[2])
    if full_system:
        n1sz = y[3]
        n1n2 = y[4]
    else:
        n1sz = np.array([-w.tail_energy(t) for t in grid])
        n1n2 = np.zeros_like(grid)

    meta = {"formulation": "moments", "phi0": gam.phi0,
            "rel_tol": rel_tol, "abs_tol": abs_tol,
            "t_start": t0, "t_end": t_end, "seeded": seeded,
            "full_system": full_system, "wavepacket": w.describe()}
    if gam.T is not None:
        meta["T"] = gam.T
    return Trajectory(times=grid,
                      columns={"n2": n2, "cross": cross,
                               "n1sz": n1sz, "n1n2": n1n2},
                      metadata=meta)


def zero_dynamics_solve(w: Wavepacket, phi0: float, t_grid) -> Trajectory:
    """Closed-form zero-dynamics solution on the given time grid.

    alpha(t) = sqrt(tail(t)), beta(t) = e^{-i phi0} sqrt(head(t)); the
    absorber coupling recovered from the constraint
    lambda alpha + beta gamma = 0 is reported as ``gamma_recovered``
    (NaN where head = 0 and the constraint is degenerate).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    alpha = np.array([math.sqrt(w.tail_energy(t)) for t in t_grid])
    head = np.array([w.head_energy(t) for t in t_grid])
    beta = cmath.exp(-1j * phi0) * np.sqrt(head).astype(complex)
    gamma_rec = np.full(len(t_grid), np.nan + 1j * np.nan)
    for i, t in enumerate(t_grid):
        if head[i] > 0.0 and w.tail_energy(t) > 0.0:
            lam_v = w.amplitude(t) / math.sqrt(w.tail_energy(t))
            gamma_rec[i] = -lam_v * alpha[i] / beta[i]
    return Trajectory(times=t_grid,
                      columns={"alpha": alpha.astype(complex), "beta": beta,
                               "gamma_recovered": gamma_rec},
                      metadata={"formulation": "zero_dynamics", "phi0": phi0,
                                "wavepacket": w.describe()})


@dataclass(frozen=True)
class ResidualReport:
    conservation_residual: float
    zero_output_residual: float | None

    def __str__(self):
        s = f"conservation residual = {self.conservation_residual:.3e}"
        if self.zero_output_residual is not None:
            s += f", zero-output residual = {self.zero_output_residual:.3e}"
        return s


def residual_check(traj: Trajectory) -> ResidualReport:
    """Conservation and (for exact-gamma runs) zero-output residuals."""
    psi2 = traj.column("psi2")
    psi3 = traj.column("psi3")
    p_out = traj.column("p_out")
    cons = float(np.max(np.abs(np.abs(psi2) ** 2 + np.abs(psi3) ** 2 + p_out - 1.0)))
    zero_out = None
    if traj.metadata.get("exact_gamma"):
        zero_out = float(np.max(np.abs(traj.column("out_amp"))))
    return ResidualReport(conservation_residual=cons,
                          zero_output_residual=zero_out)
