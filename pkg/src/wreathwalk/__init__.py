"""Random walks on permutational wreath products over tree automorphism groups.

Exact birth-and-death chain analysis, degree-sequence design for prescribed
speed/entropy growth, switch-walk-switch simulation with pluggable lamp
groups, and closed-form bound evaluators.
"""

from .sequences import DegreeSequence, ScaleTable, constant_sequence, level_of, volume
from .designer import (
    TargetFunction,
    choose_m_star,
    design_sequence,
    named_target,
    power_target,
    validate_log_lipschitz,
    verify_tracking,
)
from .graychain import (
    BinaryState,
    TruncatedChain,
    gray_bits,
    gray_position,
    orbit_size_exact,
    return_tail,
    step_kernel,
)

__all__ = [
    "DegreeSequence",
    "ScaleTable",
    "constant_sequence",
    "level_of",
    "volume",
    "TargetFunction",
    "choose_m_star",
    "design_sequence",
    "named_target",
    "power_target",
    "validate_log_lipschitz",
    "verify_tracking",
    "BinaryState",
    "TruncatedChain",
    "gray_bits",
    "gray_position",
    "orbit_size_exact",
    "return_tail",
    "step_kernel",
]

__version__ = "0.1.0"
