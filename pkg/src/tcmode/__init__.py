"""Exact time evolution of stimulated emission and absorption for N
two-level molecules sharing a single radiation mode (Tavis-Cummings
dynamics), for a family of initial photon-number distributions."""

from ._evaluate import HAVE_COMPILED
from .blocks import (EigenSystem, TCBlock, absorption_block, diagonalize,
                     emission_block, multiplicity, multiplicity_table)
from .distributions import (KINDS, DistSpec, PhotonDistribution, TailPolicy,
                            closed_form_moments, displaced_fock_pn,
                            empirical_moments, make_distribution)
from .errors import NumericalError, ParameterError, TruncationError
from .fock import gaussian_fock_oracle, oracle_dim
from .oracle import JointSystem, build_joint, evolve_photon_number
from .spectra import (CapacityScan, ModeSpectrum, TimeSeries,
                      absorption_spectrum, capacity_scan, emission_spectrum,
                      evaluate, intensity, s1_single_tlm_closed, s1_windowed)

__version__ = "0.1.0"

__all__ = [
    "HAVE_COMPILED",
    "TCBlock", "EigenSystem", "emission_block", "absorption_block",
    "diagonalize", "multiplicity", "multiplicity_table",
    "KINDS", "DistSpec", "TailPolicy", "PhotonDistribution",
    "make_distribution", "closed_form_moments", "empirical_moments",
    "displaced_fock_pn", "gaussian_fock_oracle", "oracle_dim",
    "ModeSpectrum", "TimeSeries", "CapacityScan", "emission_spectrum",
    "absorption_spectrum", "evaluate", "intensity", "s1_single_tlm_closed",
    "s1_windowed", "capacity_scan",
    "JointSystem", "build_joint", "evolve_photon_number",
    "ParameterError", "NumericalError", "TruncationError",
    "__version__",
]
