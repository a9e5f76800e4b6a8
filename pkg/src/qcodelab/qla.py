"""Dense complex linear algebra over qubit registers.

Operators and states are plain ``numpy`` arrays: a state is a 1-D vector of
length ``2**n`` and an operator a ``2**n x 2**n`` matrix. Qubit 0 is the most
significant tensor factor everywhere in the package, so ``tensor(a, b)`` puts
``a`` on the low-index (high-order) qubits.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from functools import reduce

import numpy as np

from .tolerances import EIG_TOL, MAX_DENSITY_QUBITS, MAX_STATE_QUBITS, STRUCT_TOL


class CapExceeded(ValueError):
    """Raised when a dense object would exceed the configured qubit caps."""


def num_qubits(op: np.ndarray) -> int:
    """Number of qubits carried by a state vector or square operator."""
    op = np.asarray(op)
    if op.ndim == 1:
        dim = op.shape[0]
    elif op.ndim == 2 and op.shape[0] == op.shape[1]:
        dim = op.shape[0]
    else:
        raise ValueError(f"expected a vector or square matrix, got shape {op.shape}")
    n = dim.bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def check_state_cap(n: int) -> None:
    if n > MAX_STATE_QUBITS:
        raise CapExceeded(f"{n}-qubit state vector exceeds cap of {MAX_STATE_QUBITS}")


def check_density_cap(n: int) -> None:
    if n > MAX_DENSITY_QUBITS:
        raise CapExceeded(f"{n}-qubit density operator exceeds cap of {MAX_DENSITY_QUBITS}")


# -- named gates ----------------------------------------------------------------

_S2 = 1 / math.sqrt(2)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
S = np.diag([1, 1j]).astype(complex)
T = np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex)
CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
TOFF = np.eye(8, dtype=complex)
TOFF[6:8, 6:8] = X
CCZ = np.diag([1, 1, 1, 1, 1, 1, 1, -1]).astype(complex)

GATES: dict[str, np.ndarray] = {
    "I": I2,
    "X": X,
    "Y": Y,
    "Z": Z,
    "H": H,
    "S": S,
    "T": T,
    "CX": CX,
    "CZ": CZ,
    "SWAP": SWAP,
    "Toff": TOFF,
    "CCZ": CCZ,
}

for _g in GATES.values():
    _g.setflags(write=False)


def gate(name: str) -> np.ndarray:
    """Look up a named gate (case-insensitive; ``CNOT`` and ``Toffoli`` accepted)."""
    aliases = {"CNOT": "CX", "TOFFOLI": "Toff", "TOFF": "Toff", "CCX": "Toff"}
    key = aliases.get(name.upper(), name.upper())
    for k, v in GATES.items():
        if k.upper() == key.upper():
            return v.copy()
    raise KeyError(f"unknown gate {name!r}; known: {', '.join(GATES)}")


# -- construction ---------------------------------------------------------------


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product, first argument on the high-order qubits."""
    if not ops:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def basis_state(bits: str | Sequence[int]) -> np.ndarray:
    """Computational basis vector, e.g. ``basis_state("01")``."""
    bits = [int(b) for b in bits]
    idx = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0/1, got {b}")
        idx = (idx << 1) | b
    v = np.zeros(1 << len(bits), dtype=complex)
    v[idx] = 1.0
    return v


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def maximally_mixed(n: int) -> np.ndarray:
    d = 1 << n
    return np.eye(d, dtype=complex) / d


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density operator from a Ginibre matrix of the given rank."""
    d = 1 << n
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    d = 1 << n
    g = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(g)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


# -- qubit bookkeeping ------------------------------------------------------------


def _check_perm(perm: Sequence[int], n: int) -> list[int]:
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of range({n})")
    return perm


def permute_qubits(op: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Relabel qubits: output qubit ``k`` is input qubit ``perm[k]``.

    Works on state vectors and on operators (conjugation by the permutation
    unitary).
    """
    op = np.asarray(op)
    n = num_qubits(op)
    perm = _check_perm(perm, n)
    if op.ndim == 1:
        return op.reshape((2,) * n).transpose(perm).reshape(-1)
    axes = perm + [p + n for p in perm]
    return op.reshape((2,) * (2 * n)).transpose(axes).reshape(1 << n, 1 << n)


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for k, p in enumerate(perm):
        inv[p] = k
    return inv


def embed(op: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Dense ``n``-qubit operator acting as ``op`` on ``targets`` (in that order)."""
    k = num_qubits(op)
    targets = [int(t) for t in targets]
    if len(targets) != k or len(set(targets)) != k:
        raise ValueError(f"need {k} distinct targets, got {targets}")
    if any(t < 0 or t >= n for t in targets):
        raise ValueError(f"targets {targets} out of range for {n} qubits")
    rest = [q for q in range(n) if q not in targets]
    order = targets + rest
    full = np.kron(np.asarray(op, dtype=complex), np.eye(1 << len(rest), dtype=complex))
    return permute_qubits(full, inverse_permutation(order))


def apply(op: np.ndarray, psi: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Apply a ``k``-qubit operator to selected qubits of a state vector."""
    n = num_qubits(psi)
    k = num_qubits(op)
    targets = [int(t) for t in targets]
    if len(targets) != k:
        raise ValueError(f"operator acts on {k} qubits, got targets {targets}")
    t = np.asarray(psi).reshape((2,) * n)
    g = np.asarray(op).reshape((2,) * (2 * k))
    out = np.tensordot(g, t, axes=(list(range(k, 2 * k)), targets))
    return np.moveaxis(out, list(range(k)), targets).reshape(-1)


# -- partial trace ----------------------------------------------------------------


def partial_trace(op: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced operator on ``keep``, with qubits ordered as listed in ``keep``.

    Accepts a state vector (treated as the pure state it defines) or a square
    operator.
    """
    op = np.asarray(op)
    n = num_qubits(op)
    keep = [int(q) for q in keep]
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate qubits in {keep}")
    if any(q < 0 or q >= n for q in keep):
        raise IndexError(f"keep={keep} out of range for {n} qubits")
    rest = [q for q in range(n) if q not in keep]
    dk, dr = 1 << len(keep), 1 << len(rest)
    if op.ndim == 1:
        m = op.reshape((2,) * n).transpose(keep + rest).reshape(dk, dr)
        return m @ m.conj().T
    t = op.reshape((2,) * (2 * n)).transpose(keep + rest + [n + q for q in keep + rest])
    return np.trace(t.reshape(dk, dr, dk, dr), axis1=1, axis2=3)


# -- norms, spectra, checks ---------------------------------------------------------


def is_hermitian(a: np.ndarray, atol: float = STRUCT_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= atol)


def is_unitary(u: np.ndarray, atol: float = STRUCT_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.linalg.norm(u @ u.conj().T - np.eye(u.shape[0])) <= atol)


def is_density(rho: np.ndarray, atol: float = STRUCT_TOL) -> bool:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or not is_hermitian(rho, atol):
        return False
    if abs(np.trace(rho) - 1) > atol:
        return False
    return bool(np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] >= -atol)


def trace_norm(a: np.ndarray) -> float:
    """Schatten 1-norm; eigenvalues for Hermitian input, singular values otherwise."""
    a = np.asarray(a, dtype=complex)
    if is_hermitian(a):
        return float(np.sum(np.abs(np.linalg.eigvalsh((a + a.conj().T) / 2))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Raw 1-norm ``||a - b||_1`` (no factor 1/2)."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return trace_norm(a - b)


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.vdot(rho.conj().T, rho)))


def numerical_rank(rho: np.ndarray, tol: float = EIG_TOL) -> int:
    return int(np.sum(np.linalg.eigvalsh(rho) > tol))


def fidelity_pure(psi: np.ndarray, rho: np.ndarray) -> float:
    """``<psi|rho|psi>`` for a normalized vector ``psi``."""
    psi = np.asarray(psi)
    return float(np.real(psi.conj() @ rho @ psi))


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    if p in (0.0, 1.0):
        return 0.0
    return float(-p * math.log2(p) - (1 - p) * math.log2(1 - p))


def inv_sqrt_psd(a: np.ndarray, tol: float = EIG_TOL) -> np.ndarray:
    """Pseudo-inverse square root of a PSD matrix (zero on its kernel)."""
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    if w[0] < -1e3 * tol:
        raise np.linalg.LinAlgError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
    inv = np.where(w > tol, 1 / np.sqrt(np.clip(w, tol, None)), 0.0)
    return (v * inv) @ v.conj().T
