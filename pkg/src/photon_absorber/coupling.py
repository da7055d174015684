"""Time-dependent coupling schedules for photon generation and absorption.

Three schedules are provided:

* generator  lambda(t) = xi(t) / sqrt(tail(t)) -- emits the wavepacket,
* exact absorber  gamma(t) = -e^{i phi0} xi(t) / sqrt(head(t)) -- perfectly
  absorbs it but diverges at t = 0,
* truncated absorber  gamma_T(t) -- held constant at gamma(T) for t <= T,
  equal to the exact schedule afterwards, continuous everywhere.

Divergent evaluation points return the typed sentinel ``DIVERGENT`` rather
than NaN or an exception, so ODE right-hand sides must branch on it
deliberately.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from scipy.integrate import quad

from .wavepacket import Wavepacket

# Remaining tail energy below which the generator is considered empty and
# lambda(t) is defined as 0 (avoids 0/0 at the end of emission).
EPS_TAIL = 1e-14


class _Divergent:
    """Sentinel returned where a schedule has no finite value."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DIVERGENT"


DIVERGENT = _Divergent()


class DivergentCouplingError(ValueError):
    """Raised when a finite coupling value is required at a singular time."""


class CouplingKind(Enum):
    GENERATOR = "generator"
    EXACT_ABSORBER = "exact_absorber"
    TRUNCATED_ABSORBER = "truncated_absorber"


@dataclass(frozen=True)
class CouplingSchedule:
    """Complex coupling amplitude as a function of time (units 1/sqrt(time)).

    Immutable and pure; ``schedule(t)`` returns a complex value or
    ``DIVERGENT``.
    """

    kind: CouplingKind
    wavepacket: Wavepacket
    phi0: float = 0.0
    T: float | None = None
    singular_at: float | None = None
    # for exact absorbers of wavepackets that start late, gamma is
    # divergent on all of [0, divergent_until]
    divergent_until: float = 0.0

    def __call__(self, t: float):
        w = self.wavepacket
        if self.kind is CouplingKind.GENERATOR:
            tail = w.tail_energy(t)
            if tail <= EPS_TAIL:
                return 0.0 + 0.0j
            return w.amplitude(t) / math.sqrt(tail)
        if self.kind is CouplingKind.EXACT_ABSORBER:
            return self._exact_value(t)
        # truncated: constant branch for t <= T, exact beyond
        return self._exact_value(self.T) if t <= self.T else self._exact_value(t)

    def _exact_value(self, t: float):
        w = self.wavepacket
        head = w.head_energy(t)
        if head <= 0.0:
            return DIVERGENT
        return -cmath.exp(1j * self.phi0) * w.amplitude(t) / math.sqrt(head)

    def value_or_raise(self, t: float) -> complex:
        v = self(t)
        if v is DIVERGENT:
            raise DivergentCouplingError(f"coupling is divergent at t = {t}")
        return v

    def magnitude_squared(self, t: float) -> float:
        v = self(t)
        if v is DIVERGENT:
            return math.inf
        return abs(v) ** 2


def generator_coupling(w: Wavepacket) -> CouplingSchedule:
    """lambda(t) = xi(t)/sqrt(tail(t)); 0 once the photon is fully emitted."""
    return CouplingSchedule(kind=CouplingKind.GENERATOR, wavepacket=w)


def absorber_coupling(w: Wavepacket, phi0: float = 0.0) -> CouplingSchedule:
    """Exact absorber gamma(t) = -e^{i phi0} xi(t)/sqrt(head(t)), singular at 0."""
    a = w.head_start()
    return CouplingSchedule(kind=CouplingKind.EXACT_ABSORBER, wavepacket=w,
                            phi0=phi0, singular_at=0.0, divergent_until=a)


def truncated_coupling(w: Wavepacket, phi0: float = 0.0, T: float = 0.0) -> CouplingSchedule:
    """Hard truncation of the exact absorber: constant gamma(T) on [0, T]."""
    if not T > 0.0:
        raise ValueError(f"truncation time must be positive, got {T}")
    if w.head_energy(T) <= 0.0:
        raise ValueError(f"wavepacket carries no energy on [0, {T}]; "
                         "choose T past the start of the wavepacket")
    return CouplingSchedule(kind=CouplingKind.TRUNCATED_ABSORBER, wavepacket=w,
                            phi0=phi0, T=T)


def coupling_energy_integral(g: CouplingSchedule, s: float, t: float):
    """int_s^t |g(tau)|^2 dtau.

    Exact absorbers use the closed form ln(head(t)/head(s)); the raw
    integral from s = 0 is divergent and returns ``DIVERGENT`` (use
    :func:`exp_half_energy_weight` for the well-defined exponential weight).
    Other kinds fall back to adaptive quadrature.
    """
    if s < 0.0 or s > t:
        raise ValueError(f"require 0 <= s <= t, got s={s}, t={t}")
    if s == t:
        return 0.0
    w = g.wavepacket
    if g.kind is CouplingKind.EXACT_ABSORBER:
        hs = w.head_energy(s)
        if hs <= 0.0:
            return DIVERGENT
        return math.log(w.head_energy(t) / hs)
    val, _ = quad(g.magnitude_squared, s, t, limit=200)
    return val


def exp_half_energy_weight(g: CouplingSchedule, s: float, t: float) -> float:
    """exp(-1/2 int_s^t |g|^2), well-defined even through the singularity.

    For the exact absorber this follows the three-case convention:
    sqrt(head(s)/head(t)) for s > 0, 0 for s = 0 < t, 1 for s = t = 0.
    """
    if s < 0.0 or s > t:
        raise ValueError(f"require 0 <= s <= t, got s={s}, t={t}")
    w = g.wavepacket
    if g.kind is CouplingKind.EXACT_ABSORBER:
        if s == t:
            return 1.0
        hs = w.head_energy(s)
        if hs <= 0.0:
            return 0.0
        return math.sqrt(hs / w.head_energy(t))
    if g.kind is CouplingKind.GENERATOR:
        ws, wt = w.tail_energy(s), w.tail_energy(t)
        if ws > EPS_TAIL and wt > EPS_TAIL:
            return math.sqrt(wt / ws)
    return math.exp(-0.5 * coupling_energy_integral(g, s, t))
