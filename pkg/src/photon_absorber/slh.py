"""(S, L, H) open-system triples, the series product, and Heisenberg generators.

Everything here is dense complex matrices on spaces of dimension <= 4.
Tensor ordering convention: generator qubit first, absorber qubit second,
so the 4-dim basis is |1>_1|1>_2, |1>_1|0>_2, |0>_1|1>_2, |0>_1|0>_2 and
the initial state (generator excited, absorber ground) is (0,1,0,0)^T.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .coupling import CouplingSchedule

# single-qubit operators in the basis |1> = (1,0)^T, |0> = (0,1)^T
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.conj().T
NUMBER = SIGMA_PLUS @ SIGMA_MINUS
SIGMA_Z = SIGMA_PLUS @ SIGMA_MINUS - SIGMA_MINUS @ SIGMA_PLUS
I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)

# ampliations to the 4-dim cascade space (generator slot 1, absorber slot 2)
SIGMA1_MINUS = np.kron(SIGMA_MINUS, I2)
SIGMA1_PLUS = np.kron(SIGMA_PLUS, I2)
SIGMA2_MINUS = np.kron(I2, SIGMA_MINUS)
SIGMA2_PLUS = np.kron(I2, SIGMA_PLUS)
N1 = np.kron(NUMBER, I2)
N2 = np.kron(I2, NUMBER)
SIGMA2_Z = np.kron(I2, SIGMA_Z)


@dataclass(frozen=True)
class QubitOps:
    """Precomputed single-qubit matrices and their cascade ampliations."""

    sigma_minus: np.ndarray = SIGMA_MINUS
    sigma_plus: np.ndarray = SIGMA_PLUS
    number: np.ndarray = NUMBER
    sigma_z: np.ndarray = SIGMA_Z
    identity: np.ndarray = I2
    sigma1_minus: np.ndarray = SIGMA1_MINUS
    sigma1_plus: np.ndarray = SIGMA1_PLUS
    sigma2_minus: np.ndarray = SIGMA2_MINUS
    sigma2_plus: np.ndarray = SIGMA2_PLUS
    n1: np.ndarray = N1
    n2: np.ndarray = N2
    sigma2_z: np.ndarray = SIGMA2_Z


def _imag_part(a: np.ndarray) -> np.ndarray:
    """Operator imaginary part (A - A^dag) / 2i."""
    return (a - a.conj().T) / 2.0j


def _comm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


@dataclass(frozen=True)
class SlhTriple:
    """Time-dependent (S, L, H) description on a dim-dimensional space."""

    dim: int
    s_op: Callable[[float], np.ndarray]
    l_op: Callable[[float], np.ndarray]
    h_op: Callable[[float], np.ndarray]

    def __post_init__(self):
        s = self.s_op(0.0)
        if s.shape != (self.dim, self.dim):
            raise ValueError(f"S has shape {s.shape}, expected ({self.dim}, {self.dim})")
        if np.max(np.abs(s @ s.conj().T - np.eye(self.dim))) > 1e-12:
            raise ValueError("S(0) is not unitary")

    @staticmethod
    def identity_s(dim: int):
        eye = np.eye(dim, dtype=complex)
        return lambda t: eye


def constant_triple(dim: int, l_mat: np.ndarray, h_mat: np.ndarray) -> SlhTriple:
    """Triple with S = I and time-independent L, H."""
    l_mat = np.asarray(l_mat, dtype=complex)
    h_mat = np.asarray(h_mat, dtype=complex)
    return SlhTriple(dim=dim, s_op=SlhTriple.identity_s(dim),
                     l_op=lambda t: l_mat, h_op=lambda t: h_mat)


def series_product(g2: SlhTriple, g1: SlhTriple) -> SlhTriple:
    """Cascade g1's output into g2: (S2 S1, L2 + S2 L1, H1 + H2 + Im{L2^dag S2 L1}).

    Operators must already live on the joint space (same dim).
    """
    if g1.dim != g2.dim:
        raise ValueError(f"dimension mismatch: {g2.dim} vs {g1.dim}")

    def s_op(t):
        return g2.s_op(t) @ g1.s_op(t)

    def l_op(t):
        return g2.l_op(t) + g2.s_op(t) @ g1.l_op(t)

    def h_op(t):
        return (g1.h_op(t) + g2.h_op(t)
                + _imag_part(g2.l_op(t).conj().T @ g2.s_op(t) @ g1.l_op(t)))

    return SlhTriple(dim=g1.dim, s_op=s_op, l_op=l_op, h_op=h_op)


def generator_triple(lam: CouplingSchedule, ampliate: bool = False) -> SlhTriple:
    """(I, lambda(t) sigma_{1,-}, 0), optionally lifted to the 4-dim cascade space."""
    sm = SIGMA1_MINUS if ampliate else SIGMA_MINUS
    dim = 4 if ampliate else 2
    zero = np.zeros((dim, dim), dtype=complex)
    return SlhTriple(dim=dim, s_op=SlhTriple.identity_s(dim),
                     l_op=lambda t: lam.value_or_raise(t) * sm,
                     h_op=lambda t: zero)


def absorber_triple(gam: CouplingSchedule, ampliate: bool = False) -> SlhTriple:
    """(I, gamma(t) sigma_{2,-}, 0), optionally lifted to the 4-dim cascade space."""
    sm = SIGMA2_MINUS if ampliate else SIGMA_MINUS
    dim = 4 if ampliate else 2
    zero = np.zeros((dim, dim), dtype=complex)
    return SlhTriple(dim=dim, s_op=SlhTriple.identity_s(dim),
                     l_op=lambda t: gam.value_or_raise(t) * sm,
                     h_op=lambda t: zero)


def generator_absorber_cascade(lam: CouplingSchedule, gam: CouplingSchedule) -> SlhTriple:
    """The cascaded generator-absorber triple on the 4-dim joint space:

    L(t) = lambda(t) sigma_{1,-} + gamma(t) sigma_{2,-},
    H(t) = Im{gamma(t)^* lambda(t) sigma_{2,+} sigma_{1,-}}.

    Evaluating at a time where gamma is divergent raises
    DivergentCouplingError (propagated from the schedule).
    """

    def l_op(t):
        return lam.value_or_raise(t) * SIGMA1_MINUS + gam.value_or_raise(t) * SIGMA2_MINUS

    def h_op(t):
        m = np.conj(gam.value_or_raise(t)) * lam.value_or_raise(t) * (SIGMA2_PLUS @ SIGMA1_MINUS)
        return _imag_part(m)

    return SlhTriple(dim=4, s_op=SlhTriple.identity_s(4), l_op=l_op, h_op=h_op)


def heisenberg_generator(g: SlhTriple, x: np.ndarray, t: float) -> np.ndarray:
    """L_t(X) = 1/2 L^dag [X, L] + 1/2 [L^dag, X] L - i [X, H]."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (g.dim, g.dim):
        raise ValueError(f"observable has shape {x.shape}, expected ({g.dim}, {g.dim})")
    l = g.l_op(t)
    h = g.h_op(t)
    return 0.5 * l.conj().T @ _comm(x, l) + 0.5 * _comm(l.conj().T, x) @ l - 1j * _comm(x, h)


def cascade_generator_closed_form(x1: np.ndarray, x2: np.ndarray,
                                  lam_value: complex, gam_value: complex) -> np.ndarray:
    """Four-term closed form of L_t(X1 X2) for the generator-absorber cascade.

    Independent of :func:`heisenberg_generator`: expands the generator into
    the cross term, two local dissipators, and the conjugate cross term,
    for single-node observables x1 (generator) and x2 (absorber).
    """
    x1a = np.kron(np.asarray(x1, dtype=complex), I2)
    x2a = np.kron(I2, np.asarray(x2, dtype=complex))
    lv, gv = complex(lam_value), complex(gam_value)
    term1 = np.conj(gv) * lv * x1a @ SIGMA1_MINUS @ _comm(SIGMA2_PLUS, x2a)
    term2 = 0.5 * abs(lv) ** 2 * (SIGMA1_PLUS @ _comm(x1a, SIGMA1_MINUS)
                                  + _comm(SIGMA1_PLUS, x1a) @ SIGMA1_MINUS) @ x2a
    term3 = np.conj(lv) * gv * SIGMA1_PLUS @ x1a @ _comm(x2a, SIGMA2_MINUS)
    term4 = 0.5 * abs(gv) ** 2 * (SIGMA2_PLUS @ _comm(x2a, SIGMA2_MINUS)
                                  + _comm(SIGMA2_PLUS, x2a) @ SIGMA2_MINUS) @ x1a
    return term1 + term2 + term3 + term4
