"""Coupling-schedule design and verification for tunable single-photon absorbers."""

from .coupling import (DIVERGENT, CouplingKind, CouplingSchedule,
                       DivergentCouplingError, absorber_coupling,
                       coupling_energy_integral, exp_half_energy_weight,
                       generator_coupling, truncated_coupling)
from .dynamics import (IntegrationError, integrate_amplitudes,
                       integrate_moments, residual_check, zero_dynamics_solve)
from .oracle import (adjoint_consistency_check, expectation,
                     master_equation_evolve, pure_state_density)
from .slh import (QubitOps, SlhTriple, cascade_generator_closed_form,
                  generator_absorber_cascade, heisenberg_generator,
                  series_product)
from .trajectory import Trajectory
from .wavepacket import (Wavepacket, WavepacketKind, head_energy,
                         load_tabulated_csv, make_exponential, make_gaussian,
                         make_tabulated, tail_energy)

__all__ = [
    "DIVERGENT", "CouplingKind", "CouplingSchedule", "DivergentCouplingError",
    "IntegrationError", "QubitOps", "SlhTriple", "Trajectory", "Wavepacket",
    "WavepacketKind", "absorber_coupling", "adjoint_consistency_check",
    "cascade_generator_closed_form", "coupling_energy_integral", "expectation",
    "exp_half_energy_weight", "generator_absorber_cascade", "generator_coupling",
    "head_energy", "heisenberg_generator", "integrate_amplitudes",
    "integrate_moments", "load_tabulated_csv", "make_exponential",
    "make_gaussian", "make_tabulated", "master_equation_evolve",
    "pure_state_density", "residual_check", "series_product", "tail_energy",
    "truncated_coupling", "zero_dynamics_solve",
]

__version__ = "0.1.0"
