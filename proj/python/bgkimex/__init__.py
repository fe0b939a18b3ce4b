"""Positivity-preserving, asymptotic-preserving IMEX solvers for the stiff
BGK equation and the Broadwell relaxation model."""

try:
    from ._bgkimex import *  # noqa: F401,F403
    from ._bgkimex import __doc__ as _core_doc  # noqa: F401
except ImportError:  # extension built out of tree (development layout)
    from _bgkimex import *  # noqa: F401,F403

__all__ = [
    "TableauPair",
    "builtin_scheme_names",
    "get_scheme",
    "tableau_from_json",
    "tableau_to_json",
    "check_order_conditions",
    "positivity_analysis",
    "amplification_factor",
    "stability_boundary",
    "VelocityGrid",
    "moments",
    "maxwellian",
    "discrete_maxwellian",
    "bgk_relax",
    "collision_bgk",
    "positivity_limit_interfaces",
    "advect_row",
    "run_bgk",
    "accuracy_case",
    "broadwell_collision",
    "broadwell_relax",
    "broadwell_moments",
]
