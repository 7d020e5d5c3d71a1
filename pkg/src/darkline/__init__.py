"""Mechanically mediated conversion between two cavity fields.

Baseline optomechanical dark-mode converter plus two schemes that null the
bright mode on resonance: an auxiliary weak drive on a third cavity and
parametric modulation of the mechanical spring constant.
"""

from .model import (
    Coupling,
    DerivedParams,
    DriveTone,
    MechanicalOscillator,
    OpticalMode,
    Scheme,
    SchemeConfig,
    derive,
    simple_config,
)
from .closedform import (
    apply_nulling,
    bright_dark_closed_form,
    efficiency_closed_form,
    solve_parametric_condition,
    solve_weak_drive_condition,
    special_case_delta0,
    susceptibilities,
)
from .linsys import (
    bright_dark_decompose,
    build_system,
    input_output,
    solve,
    stability,
    steady_state,
    transfer,
    transform_to_bright_dark_basis,
)

__version__ = "0.1.0"
