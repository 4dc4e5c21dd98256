"""Rigid-body-spring network elasticity.

Mode strings are ``"ps"`` (plane stress), ``"pe"`` (plane strain) and ``"3d"``.
Tessellation kinds are ``"voronoi"``, ``"rand-voronoi"``, ``"random"`` and
``"centered"``. Lengths are in units of the minimum node spacing, angles in
radians and moduli in units of the contact stiffness ``e0``.
"""

from ._rbsn import (
    ConfigError,
    GenerationError,
    IoError,
    SolverError,
    Tessellation,
    alpha_curves_svg,
    alpha_sweep,
    check_expectations,
    chi_statistics,
    closed_expectations,
    cone_moments,
    gamma_curves_svg,
    generate,
    homogenize,
    i2_curves_svg,
    nu_interval,
    nu_interval_cone,
    predict_cone,
    predict_general,
    predict_limit,
    stationary_gammas,
    structure_tensor_check,
)

__all__ = [
    "ConfigError",
    "GenerationError",
    "IoError",
    "SolverError",
    "Tessellation",
    "alpha_curves_svg",
    "alpha_sweep",
    "check_expectations",
    "chi_statistics",
    "closed_expectations",
    "cone_moments",
    "gamma_curves_svg",
    "generate",
    "homogenize",
    "i2_curves_svg",
    "nu_interval",
    "nu_interval_cone",
    "predict_cone",
    "predict_general",
    "predict_limit",
    "stationary_gammas",
    "structure_tensor_check",
]
__version__ = "0.1.0"
