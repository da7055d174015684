"""Single-photon temporal wavepackets and their head/tail energy integrals.

A wavepacket is a normalized complex amplitude xi(t) on t >= 0 with
int_0^inf |xi|^2 dt = 1.  The head energy int_0^t |xi|^2 and the tail
energy int_t^inf |xi|^2 are the quantities every coupling-design formula
is built from, so they are exposed with closed forms where available and
precomputed cumulative quadrature for tabulated data.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq


class WavepacketKind(Enum):
    EXPONENTIAL_DECAY = "exponential_decay"
    GAUSSIAN = "gaussian"
    TABULATED = "tabulated"


# Tabulated intensity is resampled at >= this factor of the input
# resolution before the cumulative Simpson pass.
REFINE_FACTOR = 8


def _norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class Wavepacket:
    """Normalized single-photon temporal profile.

    Immutable after construction; use the factory functions
    :func:`make_exponential`, :func:`make_gaussian`, :func:`make_tabulated`.
    """

    kind: WavepacketKind
    t_max: float
    params: dict = field(default_factory=dict)
    # tabulated internals (None for analytic kinds)
    _grid: np.ndarray | None = None
    _values: np.ndarray | None = None
    _intensity: PchipInterpolator | None = None
    _cum_grid: np.ndarray | None = None
    _cum_head: np.ndarray | None = None
    norm_scale: float = 1.0

    def amplitude(self, t: float) -> complex:
        """Evaluate xi(t); exactly 0 beyond t_max (and for t < 0)."""
        if t < 0.0 or t > self.t_max:
            return 0.0 + 0.0j
        if self.kind is WavepacketKind.EXPONENTIAL_DECAY:
            c = self.params["c"]
            return complex(math.sqrt(c) * math.exp(-0.5 * c * t))
        if self.kind is WavepacketKind.GAUSSIAN:
            t0 = self.params["t_center"]
            sig = self.params["width"]
            z = self.params["_norm"]
            return complex(math.sqrt(math.exp(-0.5 * ((t - t0) / sig) ** 2) / z))
        # tabulated: monotone intensity interpolant, phase by nearest sample
        inten = max(float(self._intensity(t)), 0.0)
        k = int(np.searchsorted(self._grid, t))
        if k > 0 and (k == len(self._grid) or t - self._grid[k - 1] < self._grid[k] - t):
            k -= 1
        v = self._values[k]
        phase = v / abs(v) if abs(v) > 0.0 else 1.0 + 0.0j
        return math.sqrt(inten) * phase

    def head_energy(self, t: float) -> float:
        """int_0^t |xi|^2, in [0, 1]."""
        if t < 0.0:
            raise ValueError(f"head_energy requires t >= 0, got {t}")
        if self.kind is WavepacketKind.EXPONENTIAL_DECAY:
            return -math.expm1(-self.params["c"] * t)
        if self.kind is WavepacketKind.GAUSSIAN:
            t0 = self.params["t_center"]
            sig = self.params["width"]
            lo = self.params["_cdf0"]
            return min((_norm_cdf((t - t0) / sig) - lo) / (1.0 - lo), 1.0)
        if t >= self._cum_grid[-1]:
            return 1.0
        return float(np.interp(t, self._cum_grid, self._cum_head))

    def tail_energy(self, t: float) -> float:
        """int_t^inf |xi|^2 = 1 - head, clipped to 0 beyond t_max."""
        if t < 0.0:
            raise ValueError(f"tail_energy requires t >= 0, got {t}")
        if t >= self.t_max:
            return 0.0
        if self.kind is WavepacketKind.EXPONENTIAL_DECAY:
            return math.exp(-self.params["c"] * t)
        return 1.0 - self.head_energy(t)

    def time_at_head(self, p: float) -> float:
        """Smallest t with head_energy(t) = p (0 < p < 1)."""
        if not 0.0 < p < 1.0:
            raise ValueError(f"time_at_head requires 0 < p < 1, got {p}")
        if self.kind is WavepacketKind.EXPONENTIAL_DECAY:
            return -math.log1p(-p) / self.params["c"]
        if self.kind is WavepacketKind.GAUSSIAN:
            return brentq(lambda t: self.head_energy(t) - p, 0.0, self.t_max,
                          xtol=1e-18 * max(self.t_max, 1.0))
        k = int(np.searchsorted(self._cum_head, p))
        k = min(max(k, 1), len(self._cum_grid) - 1)
        lo, hi = self._cum_grid[k - 1], self._cum_grid[k]
        clo, chi = self._cum_head[k - 1], self._cum_head[k]
        if chi <= clo:
            return float(hi)
        return float(lo + (p - clo) / (chi - clo) * (hi - lo))

    def head_start(self) -> float:
        """Largest t with head_energy(t) == 0 (0 for all built-in analytic kinds)."""
        if self.kind is not WavepacketKind.TABULATED:
            return 0.0
        nz = np.nonzero(self._cum_head > 0.0)[0]
        if len(nz) == 0:
            return float(self._cum_grid[-1])
        return float(self._cum_grid[max(nz[0] - 1, 0)])

    def describe(self) -> str:
        if self.kind is WavepacketKind.EXPONENTIAL_DECAY:
            return f"exp:c={self.params['c']:g}"
        if self.kind is WavepacketKind.GAUSSIAN:
            return f"gauss:t0={self.params['t_center']:g},width={self.params['width']:g}"
        return f"tabulated:n={len(self._grid)}"


def make_exponential(c: float) -> Wavepacket:
    """xi(t) = sqrt(c) exp(-c t / 2); head(t) = 1 - exp(-c t) in closed form."""
    if not (c > 0.0) or not math.isfinite(c):
        raise ValueError(f"decay rate must be positive and finite, got {c}")
    # tail(33/c) = e^{-33} < 5e-15: below double-precision quadrature noise
    return Wavepacket(kind=WavepacketKind.EXPONENTIAL_DECAY, t_max=33.0 / c,
                      params={"c": c})


def make_gaussian(t_center: float, width: float) -> Wavepacket:
    """Gaussian intensity profile centered at t_center with std width.

    |xi(t)|^2 is a normal density restricted to t >= 0 and renormalized;
    the amplitude is taken real and positive.
    """
    if not (width > 0.0) or not math.isfinite(width):
        raise ValueError(f"width must be positive and finite, got {width}")
    if not (t_center >= 0.0) or not math.isfinite(t_center):
        raise ValueError(f"t_center must be >= 0 and finite, got {t_center}")
    cdf0 = _norm_cdf(-t_center / width)
    if cdf0 >= 1.0 - 1e-12:
        raise ValueError("Gaussian support lies almost entirely at t < 0")
    # normalization of exp(-((t-t0)/sig)^2 / 2) over [0, inf)
    z = width * math.sqrt(2.0 * math.pi) * (1.0 - cdf0)
    # tail beyond 8.3 sigma < 1e-16 of unit norm
    return Wavepacket(kind=WavepacketKind.GAUSSIAN, t_max=t_center + 8.3 * width,
                      params={"t_center": t_center, "width": width,
                              "_cdf0": cdf0, "_norm": z})


def make_tabulated(grid, values) -> Wavepacket:
    """Build a wavepacket from sampled complex amplitudes.

    The intensity |xi|^2 is interpolated with a monotone piecewise cubic
    (PCHIP), integrated once with composite Simpson on a refined grid, and
    renormalized to unit energy.  xi is 0 beyond the last grid point.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=complex)
    if grid.ndim != 1 or len(grid) < 4:
        raise ValueError("tabulated grid needs at least 4 points")
    if grid.shape != values.shape:
        raise ValueError("grid and values must have the same length")
    if not np.all(np.isfinite(grid)) or not np.all(np.isfinite(values)):
        raise ValueError("tabulated data contains NaN/Inf entries")
    if grid[0] != 0.0:
        raise ValueError("tabulated grid must start at t = 0")
    if not np.all(np.diff(grid) > 0.0):
        raise ValueError("tabulated grid must be strictly increasing")
    if np.all(values == 0.0):
        raise ValueError("tabulated values are identically zero")

    intensity = PchipInterpolator(grid, np.abs(values) ** 2, extrapolate=False)
    # refined uniform subdivision of every input interval
    fine = np.concatenate(
        [np.linspace(grid[i], grid[i + 1], REFINE_FACTOR, endpoint=False)
         for i in range(len(grid) - 1)] + [grid[-1:]])
    inten_fine = np.clip(intensity(fine), 0.0, None)
    cum = cumulative_simpson(inten_fine, x=fine, initial=0.0)
    total = float(cum[-1])
    if total <= 0.0:
        raise ValueError("tabulated wavepacket has zero total energy")
    if abs(total - 1.0) > 1e-3:
        warnings.warn(f"tabulated wavepacket renormalized by factor {1.0 / total:.6g} "
                      "(input energy deviates from 1 by more than 1e-3)",
                      stacklevel=2)
    scale = 1.0 / math.sqrt(total)
    intensity = PchipInterpolator(grid, (np.abs(values) * scale) ** 2,
                                  extrapolate=False)
    cum = np.minimum(cum / total, 1.0)
    cum = np.maximum.accumulate(cum)  # guard monotonicity against roundoff
    return Wavepacket(kind=WavepacketKind.TABULATED, t_max=float(grid[-1]),
                      params={}, _grid=grid, _values=values * scale,
                      _intensity=intensity, _cum_grid=fine, _cum_head=cum,
                      norm_scale=scale)


def load_tabulated_csv(path) -> Wavepacket:
    """Read a `t,re_xi,im_xi` CSV (header required) into a tabulated wavepacket."""
    ts, vals = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["t", "re_xi", "im_xi"]:
            raise ValueError(f"{path}: expected header 't,re_xi,im_xi'")
        for row in reader:
            if not row:
                continue
            ts.append(float(row[0]))
            vals.append(complex(float(row[1]), float(row[2])))
    return make_tabulated(np.array(ts), np.array(vals))


# convenience aliases matching the operation names used elsewhere

def head_energy(w: Wavepacket, t: float) -> float:
    return w.head_energy(t)


def tail_energy(w: Wavepacket, t: float) -> float:
    return w.tail_energy(t)
