"""Self-verification suite behind the `verify` CLI command.

Each check pins a tolerance, computes an observed residual with an
independent route (quadrature, closed form, duality, or a second
formulation), and reports pass/fail.  The suite is also exercised by the
test suite, which additionally runs a negative test with a deliberately
loosened integrator tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import coupling as cpl
from . import dynamics as dyn
from . import oracle as orc
from . import slh
from .wavepacket import make_exponential, make_gaussian

PAPER_C = 7.2e7
PAPER_T1 = 10.0 / PAPER_C
PAPER_T_FRACTIONS = (0.001, 0.01, 0.1)
PAPER_N2_FINAL = (0.9957, 0.9575, 0.6037)
PAPER_VALUE_TOL = 0.002


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    residual: float

    @property
    def passed(self) -> bool:
        return self.residual < self.tolerance

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: residual {self.residual:.3e} "
                f"(tolerance {self.tolerance:.1e})")


def _random_triple(rng) -> slh.SlhTriple:
    l = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = 0.5 * (h + h.conj().T)
    return slh.constant_triple(4, l, h)


def check_head_tail_identity(quick: bool = False) -> CheckResult:
    rng = np.random.default_rng(11)
    n_params = 10 if quick else 100
    worst = 0.0
    for _ in range(n_params):
        c = 10.0 ** rng.uniform(-2, 8)
        w = make_exponential(c)
        wg = make_gaussian(t_center=rng.uniform(2, 8), width=rng.uniform(0.2, 1.0))
        for pkt in (w, wg):
            ts = np.linspace(0.0, pkt.t_max, 100 if quick else 1000)
            for t in ts:
                worst = max(worst, abs(pkt.head_energy(t) + pkt.tail_energy(t) - 1.0))
    return CheckResult("head + tail = 1 on random wavepackets", 1e-9, worst)


def check_head_quadrature() -> CheckResult:
    worst = 0.0
    for pkt in (make_exponential(1.0), make_gaussian(5.0, 0.8)):
        for t in np.linspace(0.05, min(pkt.t_max, 12.0), 7):
            num, _ = quad(lambda s: abs(pkt.amplitude(s)) ** 2, 0.0, t, limit=200)
            worst = max(worst, abs(num - pkt.head_energy(t)))
    return CheckResult("closed-form head vs composite quadrature", 1e-8, worst)


def check_coupling_identities(quick: bool = False) -> CheckResult:
    rng = np.random.default_rng(5)
    n = 100 if quick else 1000
    worst = 0.0
    for _ in range(n):
        if rng.random() < 0.5:
            pkt = make_exponential(10.0 ** rng.uniform(-2, 8))
        else:
            pkt = make_gaussian(rng.uniform(2, 8), rng.uniform(0.2, 1.0))
        lam = cpl.generator_coupling(pkt)
        gam = cpl.absorber_coupling(pkt, phi0=rng.uniform(0, 2 * math.pi))
        t = rng.uniform(0.0, pkt.t_max)
        head, tail = pkt.head_energy(t), pkt.tail_energy(t)
        if head < 1e-6 or tail < 1e-6:
            continue
        xi2 = abs(pkt.amplitude(t)) ** 2
        if xi2 == 0.0:
            continue
        worst = max(worst, abs(abs(lam(t)) ** 2 * tail - xi2) / xi2)
        worst = max(worst, abs(abs(gam(t)) ** 2 * head - xi2) / xi2)
    return CheckResult("|lambda|^2 tail = |xi|^2 and |gamma|^2 head = |xi|^2", 1e-10, worst)


def check_energy_integral() -> CheckResult:
    worst = 0.0
    for pkt in (make_exponential(1.0), make_gaussian(5.0, 0.8)):
        gam = cpl.absorber_coupling(pkt)
        for (s, t) in ((0.3, 1.1), (0.9, 4.5), (2.0, 2.0)):
            closed = cpl.coupling_energy_integral(gam, s, t)
            num, _ = quad(gam.magnitude_squared, s, t, limit=200)
            worst = max(worst, abs(closed - num))
    return CheckResult("int |gamma|^2 closed log form vs quadrature", 1e-8, worst)


def check_series_product(quick: bool = False) -> CheckResult:
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(3 if quick else 10):
        g1, g2, g3 = (_random_triple(rng) for _ in range(3))
        left = slh.series_product(slh.series_product(g3, g2), g1)
        right = slh.series_product(g3, slh.series_product(g2, g1))
        for t in rng.uniform(0, 1, size=10):
            worst = max(worst, np.max(np.abs(left.l_op(t) - right.l_op(t))))
            worst = max(worst, np.max(np.abs(left.h_op(t) - right.h_op(t))))
        ident = slh.constant_triple(4, np.zeros((4, 4)), np.zeros((4, 4)))
        comp = slh.series_product(ident, g1)
        worst = max(worst, np.max(np.abs(comp.l_op(0.0) - g1.l_op(0.0))))
        worst = max(worst, np.max(np.abs(comp.h_op(0.0) - g1.h_op(0.0))))
    return CheckResult("series product associativity and identity", 1e-12, worst)


_X1_BASIS = (slh.I2, slh.NUMBER, slh.SIGMA_MINUS, slh.SIGMA_PLUS)
_X2_BASIS = (slh.I2, slh.NUMBER, slh.SIGMA_MINUS, slh.SIGMA_PLUS, slh.SIGMA_Z)


def check_appendix_generator(quick: bool = False) -> CheckResult:
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(10 if quick else 50):
        lv = complex(rng.normal(), rng.normal())
        gv = complex(rng.normal(), rng.normal())
        l_mat = lv * slh.SIGMA1_MINUS + gv * slh.SIGMA2_MINUS
        m = np.conj(gv) * lv * (slh.SIGMA2_PLUS @ slh.SIGMA1_MINUS)
        h_mat = (m - m.conj().T) / 2.0j
        g = slh.constant_triple(4, l_mat, h_mat)
        for x1 in _X1_BASIS:
            for x2 in _X2_BASIS:
                direct = slh.heisenberg_generator(g, np.kron(x1, x2), 0.0)
                closed = slh.cascade_generator_closed_form(x1, x2, lv, gv)
                worst = max(worst, np.max(np.abs(direct - closed)))
    return CheckResult("Heisenberg generator vs four-term closed form", 1e-12, worst)


def check_adjoint_consistency(quick: bool = False) -> CheckResult:
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(20 if quick else 100):
        g = _random_triple(rng)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        x = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        worst = max(worst, orc.adjoint_consistency_check(g, rho, x, 0.0))
    return CheckResult("adjoint consistency Tr[rho L(X)] = Tr[D(rho) X]", 1e-12, worst)


def check_closed_form_amplitudes(rel_tol: float = dyn.DEFAULT_REL_TOL,
                                 abs_tol: float = dyn.DEFAULT_ABS_TOL) -> CheckResult:
    worst = 0.0
    for pkt, t_end in ((make_exponential(1.0), 10.0), (make_gaussian(5.0, 0.8), 10.0)):
        lam = cpl.generator_coupling(pkt)
        gam = cpl.absorber_coupling(pkt, phi0=0.7)
        traj = dyn.integrate_amplitudes(lam, gam, t_end=t_end,
                                        rel_tol=rel_tol, abs_tol=abs_tol)
        psi2 = traj.column("psi2")
        psi3 = traj.column("psi3")
        expect2 = np.array([math.sqrt(pkt.tail_energy(t)) for t in traj.times])
        expect3 = np.exp(-1j * 0.7) * np.array(
            [math.sqrt(pkt.head_energy(t)) for t in traj.times])
        worst = max(worst, float(np.max(np.abs(psi2 - expect2))))
        worst = max(worst, float(np.max(np.abs(psi3 - expect3))))
    return CheckResult("exact-gamma amplitudes vs sqrt(tail), sqrt(head)", 1e-7, worst)


def check_zero_output(rel_tol: float = dyn.DEFAULT_REL_TOL,
                      abs_tol: float = dyn.DEFAULT_ABS_TOL) -> CheckResult:
    pkt = make_exponential(1.0)
    lam = cpl.generator_coupling(pkt)
    gam = cpl.absorber_coupling(pkt)
    traj = dyn.integrate_amplitudes(lam, gam, t_end=10.0,
                                    rel_tol=rel_tol, abs_tol=abs_tol)
    rep = dyn.residual_check(traj)
    return CheckResult("exact-gamma zero-output residual max|lambda psi2 + gamma psi3|",
                       1e-7, rep.zero_output_residual)


def check_zero_dynamics() -> CheckResult:
    worst = 0.0
    for pkt in (make_exponential(1.0), make_gaussian(5.0, 0.8)):
        gam = cpl.absorber_coupling(pkt, phi0=1.3)
        grid = np.linspace(pkt.time_at_head(1e-6), pkt.t_max * 0.9, 200)
        traj = dyn.zero_dynamics_solve(pkt, 1.3, grid)
        rec = traj.column("gamma_recovered")
        for i, t in enumerate(grid):
            g = gam(t)
            if g is cpl.DIVERGENT or abs(g) == 0.0:
                continue
            worst = max(worst, abs(rec[i] - g) / abs(g))
    return CheckResult("constraint-recovered gamma vs absorber schedule", 1e-12, worst)


def check_formulation_equivalence(rel_tol: float = dyn.DEFAULT_REL_TOL,
                                  abs_tol: float = dyn.DEFAULT_ABS_TOL) -> CheckResult:
    pkt = make_exponential(PAPER_C)
    lam = cpl.generator_coupling(pkt)
    worst = 0.0
    for frac in PAPER_T_FRACTIONS:
        gam = cpl.truncated_coupling(pkt, T=frac * PAPER_T1)
        amp = dyn.integrate_amplitudes(lam, gam, t_end=PAPER_T1,
                                       rel_tol=rel_tol, abs_tol=abs_tol)
        mom = dyn.integrate_moments(lam, gam, t_end=PAPER_T1,
                                    rel_tol=rel_tol, abs_tol=abs_tol)
        worst = max(worst, float(np.max(np.abs(mom.column("n2") - amp.column("n2")))))
        cross_pure = np.conj(amp.column("psi2")) * amp.column("psi3")
        worst = max(worst, float(np.max(np.abs(mom.column("cross") - cross_pure))))
    return CheckResult("moment ODEs vs amplitude ODEs (n2 and cross)", 1e-7, worst)


def check_oracle_equivalence(quick: bool = False,
                             rel_tol: float = dyn.DEFAULT_REL_TOL,
                             abs_tol: float = dyn.DEFAULT_ABS_TOL) -> CheckResult:
    pkt = make_exponential(PAPER_C)
    lam = cpl.generator_coupling(pkt)
    rho0 = orc.pure_state_density(np.array([0, 1, 0, 0], dtype=complex))
    fracs = PAPER_T_FRACTIONS[:1] if quick else PAPER_T_FRACTIONS
    worst = 0.0
    for frac in fracs:
        gam = cpl.truncated_coupling(pkt, T=frac * PAPER_T1)
        g = slh.generator_absorber_cascade(lam, gam)
        dm = orc.master_equation_evolve(g, rho0, 0.0, PAPER_T1,
                                        rel_tol=rel_tol, abs_tol=abs_tol)
        n2_oracle = dm.expectations(slh.N2).real
        amp = dyn.integrate_amplitudes(lam, gam, t_end=PAPER_T1,
                                       rel_tol=rel_tol, abs_tol=abs_tol)
        mom = dyn.integrate_moments(lam, gam, t_end=PAPER_T1,
                                    rel_tol=rel_tol, abs_tol=abs_tol)
        worst = max(worst, float(np.max(np.abs(n2_oracle - amp.column("n2")))))
        worst = max(worst, float(np.max(np.abs(n2_oracle - mom.column("n2")))))
    return CheckResult("master-equation oracle vs amplitudes and moments", 1e-6, worst)


def check_paper_values(rel_tol: float = dyn.DEFAULT_REL_TOL,
                       abs_tol: float = dyn.DEFAULT_ABS_TOL) -> CheckResult:
    pkt = make_exponential(PAPER_C)
    lam = cpl.generator_coupling(pkt)
    worst = 0.0
    for frac, expected in zip(PAPER_T_FRACTIONS, PAPER_N2_FINAL):
        gam = cpl.truncated_coupling(pkt, T=frac * PAPER_T1)
        mom = dyn.integrate_moments(lam, gam, t_end=PAPER_T1,
                                    rel_tol=rel_tol, abs_tol=abs_tol)
        worst = max(worst, abs(float(mom.column("n2")[-1]) - expected))
    return CheckResult("terminal n2 vs reported values for three truncations",
                       PAPER_VALUE_TOL, worst)


def check_phase_invariance(rel_tol: float = dyn.DEFAULT_REL_TOL,
                           abs_tol: float = dyn.DEFAULT_ABS_TOL) -> CheckResult:
    pkt = make_exponential(1.0)
    lam = cpl.generator_coupling(pkt)
    base = None
    worst = 0.0
    for phi0 in (0.0, 1.0, math.pi):
        gam = cpl.truncated_coupling(pkt, phi0=phi0, T=0.05)
        traj = dyn.integrate_amplitudes(lam, gam, t_end=10.0,
                                        rel_tol=rel_tol, abs_tol=abs_tol)
        obs = np.concatenate([traj.column("n2"), traj.column("p_out")])
        if base is None:
            base = obs
        else:
            worst = max(worst, float(np.max(np.abs(obs - base))))
    return CheckResult("observables independent of phi0", 1e-12, worst)


def run_checks(quick: bool = False,
               rel_tol: float = dyn.DEFAULT_REL_TOL,
               abs_tol: float = dyn.DEFAULT_ABS_TOL) -> list[CheckResult]:
    """Run the full (or quick) verification suite and return the results."""
    results = [
        check_head_tail_identity(quick),
        check_head_quadrature(),
        check_coupling_identities(quick),
        check_energy_integral(),
        check_series_product(quick),
        check_appendix_generator(quick),
        check_adjoint_consistency(quick),
        check_closed_form_amplitudes(rel_tol, abs_tol),
        check_zero_output(rel_tol, abs_tol),
        check_zero_dynamics(),
        check_formulation_equivalence(rel_tol, abs_tol),
        check_phase_invariance(rel_tol, abs_tol),
        check_paper_values(rel_tol, abs_tol),
    ]
    results.append(check_oracle_equivalence(quick, rel_tol, abs_tol))
    return results
