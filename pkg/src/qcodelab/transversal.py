"""Product operators across code subsystems and their logical action.

With ``r`` code blocks of length ``n`` the register is laid out block-major:
qubit ``b*n + i`` is subsystem ``i`` of block ``b``. Subsystem ``i`` is the set
``{i, n+i, ..., (r-1)n+i}`` and a :class:`ProductOperator` applies one
``r``-qubit factor to each subsystem, taking the block qubits in block order.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import qla
from .codes import CodeSpace
from .tolerances import E2E_TOL, STRUCT_TOL

PROBE_SEED = 20240917


class TransversalError(ValueError):
    pass


@dataclass
class ProductOperator:
    code: CodeSpace
    factors: list[np.ndarray]
    num_blocks: int = 1

    def __post_init__(self):
        self.factors = [np.asarray(f, dtype=complex) for f in self.factors]
        if len(self.factors) != self.code.n:
            raise TransversalError(
                f"need one factor per subsystem ({self.code.n}), got {len(self.factors)}"
            )
        for i, f in enumerate(self.factors):
            if f.shape != (1 << self.num_blocks,) * 2:
                raise TransversalError(
                    f"factor {i} has shape {f.shape}; expected {self.num_blocks}-qubit unitary"
                )
            if not qla.is_unitary(f, STRUCT_TOL):
                raise TransversalError(f"factor {i} is not unitary")

    @classmethod
    def uniform(cls, code: CodeSpace, u: np.ndarray, num_blocks: int | None = None) -> "ProductOperator":
        u = np.asarray(u, dtype=complex)
        r = qla.num_qubits(u) if num_blocks is None else num_blocks
        return cls(code, [u] * code.n, r)

    @property
    def num_qubits(self) -> int:
        return self.num_blocks * self.code.n

    def subsystem(self, i: int) -> list[int]:
        n = self.code.n
        return [b * n + i for b in range(self.num_blocks)]

    @property
    def strongly_transversal(self) -> bool:
        f0 = self.factors[0]
        return all(np.max(np.abs(f - f0)) <= STRUCT_TOL for f in self.factors[1:])

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Apply factor-wise to a block-major state (no dense ``2^{rn}`` matrix)."""
        if qla.num_qubits(psi) != self.num_qubits:
            raise TransversalError("state does not match the operator's register")
        for i, f in enumerate(self.factors):
            psi = qla.apply(f, psi, self.subsystem(i))
        return psi

    def to_dense(self) -> np.ndarray:
        """Permutation conjugate of the subsystem-major tensor product."""
        n, r = self.code.n, self.num_blocks
        qla.check_density_cap(n * r)
        subsystem_major = qla.tensor(*self.factors)
        perm = [0] * (n * r)
        for b in range(r):
            for i in range(n):
                perm[b * n + i] = i * r + b
        return qla.permute_qubits(subsystem_major, perm)


def encode_blocks(code: CodeSpace, psi: np.ndarray) -> np.ndarray:
    """``r``-qubit logical state encoded into ``r`` block-major code blocks."""
    r = qla.num_qubits(psi)
    qla.check_state_cap(r * code.n)
    t = np.asarray(psi, dtype=complex).reshape((2,) * r)
    for _ in range(r):
        t = np.tensordot(t, code.encoder, axes=([0], [1]))
    return t.reshape(-1)


def probe_states(r: int, seed: int = PROBE_SEED) -> list[np.ndarray]:
    """All ``2^r`` basis states, then ``r + 1`` seeded random superpositions."""
    rng = np.random.default_rng(seed)
    probes = list(np.eye(1 << r, dtype=complex))
    probes += [qla.random_state(r, rng) for _ in range(r + 1)]
    return probes


@dataclass
class LogicalReport:
    logical: bool
    phase: complex | None
    max_error: float


def _apply_physical(physical, psi: np.ndarray) -> np.ndarray:
    if isinstance(physical, ProductOperator):
        return physical.apply(psi)
    return np.asarray(physical) @ psi


def check_logical(
    code: CodeSpace, physical, target: np.ndarray, atol: float = E2E_TOL, seed: int = PROBE_SEED
) -> LogicalReport:
    """Compare ``physical |psi_L>`` with ``e^{i theta} (target |psi>)_L`` on the probes.

    ``physical`` is a dense matrix or a :class:`ProductOperator`. One global
    phase, fixed by the first probe, must serve every probe. The scan stops at
    the first failing probe, so ``max_error`` is then a lower bound.
    """
    target = np.asarray(target, dtype=complex)
    r = qla.num_qubits(target)
    dim = 1 << (r * code.n)
    if isinstance(physical, ProductOperator):
        if physical.num_blocks != r or physical.code.n != code.n:
            raise TransversalError("operator arity or code length does not match target")
    elif np.shape(physical) != (dim, dim):
        raise TransversalError(f"physical operator must be {dim}x{dim}, got {np.shape(physical)}")
    phase = None
    worst = 0.0
    for psi in probe_states(r, seed):
        actual = _apply_physical(physical, encode_blocks(code, psi))
        expected = encode_blocks(code, target @ psi)
        if phase is None:
            ov = np.vdot(expected, actual)
            if abs(ov) < 1e-6:
                return LogicalReport(False, None, float(np.linalg.norm(actual - expected)))
            phase = ov / abs(ov)
        worst = max(worst, float(np.linalg.norm(actual - phase * expected)))
        if worst > atol:
            break
    return LogicalReport(worst <= atol, complex(phase), worst)


def is_logical(code: CodeSpace, physical, target: np.ndarray, atol: float = E2E_TOL) -> bool:
    return check_logical(code, physical, target, atol).logical


def logical_matrix(code: CodeSpace, physical, r: int, atol: float = E2E_TOL) -> np.ndarray | None:
    """Action on the encoded ``r``-block logical basis; ``None`` if it leaks out."""
    basis = [encode_blocks(code, e) for e in np.eye(1 << r, dtype=complex)]
    v = np.column_stack(basis)
    out = np.column_stack([_apply_physical(physical, b) for b in basis])
    m = v.conj().T @ out
    if np.linalg.norm(out - v @ m) > atol:
        return None
    return m


def preserves_codespace(code: CodeSpace, physical, r: int, atol: float = E2E_TOL) -> bool:
    return logical_matrix(code, physical, r, atol) is not None


def _equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float) -> bool:
    ov = np.vdot(b.reshape(-1), a.reshape(-1))
    if abs(ov) < 1e-9:
        return False
    return bool(np.linalg.norm(a - (ov / abs(ov)) * b) <= atol)


def identify(code: CodeSpace, op: ProductOperator, library: Mapping[str, np.ndarray], atol: float = E2E_TOL) -> str | None:
    """Name of the first library gate the operator implements logically, if any."""
    m = logical_matrix(code, op, op.num_blocks, atol)
    if m is None:
        return None
    for name, g in library.items():
        if np.shape(g) == m.shape and _equal_up_to_phase(m, np.asarray(g), atol):
            return name
    return None


LOGICAL_NAMES_1 = {"I": qla.I2, "X": qla.X, "Y": qla.Y, "Z": qla.Z, "H": qla.H, "S": qla.S, "T": qla.T}
LOGICAL_NAMES_2 = {"I": np.eye(4), "CX": qla.CX, "CZ": qla.CZ, "SWAP": qla.SWAP}
LOGICAL_NAMES_3 = {"I": np.eye(8), "TOFF": qla.TOFF, "CCZ": qla.CCZ}
_LOGICAL_NAMES = {1: LOGICAL_NAMES_1, 2: LOGICAL_NAMES_2, 3: LOGICAL_NAMES_3}


@dataclass
class TransversalReport:
    logical: bool
    phase: complex | None
    strongly_transversal: bool
    max_error: float
    implements: str | None = None


def verify_transversal(op: ProductOperator, target: np.ndarray, atol: float = E2E_TOL) -> TransversalReport:
    """Logical check plus strong-transversality flag.

    ``implements`` names the standard gate of matching arity that the operator
    realizes on the codespace, whether or not it is the target.
    """
    qla.check_state_cap(op.num_qubits)
    rep = check_logical(op.code, op, target, atol)
    implements = identify(op.code, op, _LOGICAL_NAMES.get(op.num_blocks, {}), atol)
    return TransversalReport(
        logical=rep.logical,
        phase=rep.phase if rep.logical else None,
        strongly_transversal=rep.logical and op.strongly_transversal,
        max_error=rep.max_error,
        implements=implements,
    )


def strongly_transversal_search(
    code: CodeSpace,
    target: np.ndarray,
    library: Mapping[str, np.ndarray] | Sequence[np.ndarray],
    workers: int | None = None,
    atol: float = E2E_TOL,
) -> list:
    """Library entries ``u`` whose ``u^{(x)n}`` implements ``target`` logically.

    Returns names for a mapping and indices for a sequence, in library order
    regardless of ``workers``.
    """
    r = qla.num_qubits(np.asarray(target))
    qla.check_state_cap(r * code.n)
    items = list(library.items()) if isinstance(library, Mapping) else list(enumerate(library))
    items = [(k, np.asarray(u, dtype=complex)) for k, u in items if np.shape(u) == (1 << r,) * 2]

    def test(item):
        key, u = item
        op = ProductOperator.uniform(code, u, r)
        if not check_logical(code, op, target, atol).logical:
            return key, False
        return key, verify_transversal(op, target, atol).logical

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(test, items))
    else:
        results = [test(it) for it in items]
    return [key for key, ok in results if ok]
