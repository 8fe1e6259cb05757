"""Polymer flood simulator on the unit square.

A quarter five-spot, two-phase (water/oil) flow model with dissolved
polymer: pressure from a P1 finite-element solve, saturation and
concentration advanced by a modified method of characteristics, plus a
one-dimensional reduced system and a grid-refinement harness used to
verify the scheme's first-order convergence numerically.
"""

from .config import ConfigError, RunConfig, parse_config
from .harness import (RefinementStudy, run_spatial_study, run_temporal_study,
                      write_records_csv)
from .petro import PetroModel
from .simulate import run_simulation

__all__ = [
    "PetroModel",
    "RunConfig", "ConfigError", "parse_config",
    "run_simulation",
    "RefinementStudy", "run_spatial_study", "run_temporal_study",
    "write_records_csv",
]

__version__ = "0.1.0"
