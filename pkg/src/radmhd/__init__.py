"""Linear stability toolkit for compressible radiative Euler-MHD about a constant state."""

from __future__ import annotations

from .compensator import Compensator, find_compensator, verify_compensator
from .config import RunConfig, default_config, load_config, parse_config
from .entropy import (coercivity_constants, entropy_production, relative_entropy_eta,
                      relative_helmholtz_matter, relative_helmholtz_radiation)
from .errors import (CompatibilityViolation, ConfigError, DampingPresent, EigenFailure, GridTooSmall,
                     InvalidParameter, NoCompensatorFound, NonCoercive, NonPositiveState, RadMHDError)
from .expm import expm
from .model import (EOS, Equilibrium, LinCoeffs, PhysParams, derive_coefficients, make_cold_pressure_eos,
                    make_ideal_gas_eos)
from .propagator import Field, energy_functional_N, propagate_mode, simulate
from .stability import decay_map, kalman_rank, kernel_eigenpairs_nu0, sk_check, sk_sweep, spectral_abscissa
from .symbols import SystemMatrices, build_system, consistency_audit, fourier_symbol

__version__ = "0.1.0"
