"""Shared numeric tolerance knobs."""

import os

# Self-consistency of linear-algebra decompositions (reconstruction,
# unitarity defects).
LINALG_TOL = 1e-12

# Physics assertions (condition residuals, projector invariants, ...).
PHYSICS_TOL_DEFAULT = 1e-10


def physics_tol() -> float:
    """Default physics tolerance, overridable through SU2M_TOL."""
    return float(os.environ.get("SU2M_TOL", PHYSICS_TOL_DEFAULT))
