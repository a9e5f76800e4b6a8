"""Central numerical tolerances and dense-size caps.

Every comparison in the package defaults to one of these constants so that a
single knob controls reproducibility. ``QCODELAB_TOL`` in the environment
overrides the end-to-end tolerance used by the command line.
"""

from __future__ import annotations

import os

STRUCT_TOL = 1e-10
"""Structural checks: hermiticity, unitarity, orthonormality."""

E2E_TOL = 1e-9
"""End-to-end equalities: logical action, fidelities, Gram identities."""

EIG_TOL = 1e-10
"""Eigenvalues above this count toward a numerical rank."""

MAX_STATE_QUBITS = 22
MAX_DENSITY_QUBITS = 12

ENV_VAR = "QCODELAB_TOL"


def e2e_tol_from_env(default: float = E2E_TOL) -> float:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return default
    value = float(raw)
    if not value > 0:
        raise ValueError(f"{ENV_VAR} must be positive, got {raw!r}")
    return value
