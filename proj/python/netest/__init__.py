"""Minimum-cost networked estimator design.

Thin Python layer over the C++ core. Patterns use 0-based indices; an edge
``(s, t)`` means state ``s`` drives state ``t``.
"""

import json

from ._netest import (
    NetestError,
    Pattern,
    brute_force_assignment,
    brute_force_mst,
    euler_discretize,
    generic_rank_oracle,
    hungarian,
    is_self_damped,
    minimum_spanning_forest,
    minimum_spanning_tree,
    missing_self_loops,
    observability_rank,
    parent_scc_coverage,
    run_cli,
    scc,
    structurally_observable,
    tustin_discretize,
)
from . import _netest

__all__ = [
    "NetestError",
    "Pattern",
    "brute_force_assignment",
    "brute_force_mst",
    "design",
    "design_file",
    "euler_discretize",
    "generic_rank_oracle",
    "hungarian",
    "is_self_damped",
    "minimum_spanning_forest",
    "minimum_spanning_tree",
    "missing_self_loops",
    "observability_rank",
    "parent_scc_coverage",
    "run_cli",
    "scc",
    "structurally_observable",
    "tustin_discretize",
    "verify",
]


def design(pattern, delta, eta, allow_extra_agents=False):
    """Solve for measurements and links; returns the solution document."""
    return json.loads(_netest._solve_json(pattern, delta, eta, allow_extra_agents))


def design_file(path):
    """Solve a problem spec JSON file; returns the solution document."""
    return json.loads(_netest._solve_file_json(str(path)))


def verify(pattern, measurement, network, oracle_trials=0, seed=0):
    """Networked observability report, plus an oracle tally when requested."""
    return json.loads(
        _netest._verify_json(pattern, measurement, network, oracle_trials, seed)
    )
