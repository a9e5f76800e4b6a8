"""Pauli group and stabilizer-code machinery over GF(2).

A :class:`PauliString` stores the symplectic bit vectors ``x`` and ``z`` and a
phase exponent ``e`` so that the operator is ``i**e`` times the tensor product
of the Hermitian single-qubit Paulis (``Y = iXZ``). Products track the phase
exactly in ``{1, i, -1, -i}``.

Besides group arithmetic this module implements the symplectic logical
operator extraction, exhaustive distance search, operator cleaning as a
restricted GF(2) solve, and the Clifford-hierarchy level test.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from . import qla
from .tolerances import E2E_TOL, STRUCT_TOL

MAX_EXHAUSTIVE_QUBITS = 12

_LETTERS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_FROM_BITS = {v: k for k, v in _LETTERS.items()}
_PHASE_TOKENS = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_PHASE_TEXT = {0: "", 1: "+i", 2: "-", 3: "-i"}
_PAULI_RE = re.compile(r"^\s*([+-]?i?)\s*([IXYZ]+)\s*$")


class PauliError(ValueError):
    pass


class CleaningError(ValueError):
    """No representative of the logical operator avoids the requested subset."""


class VerificationError(AssertionError):
    """A numerical verification step did not hold."""


# -- GF(2) linear algebra ---------------------------------------------------------


def gf2_rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and the pivot columns."""
    a = (np.array(m, dtype=np.uint8) & 1).copy()
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        h = r + hits[0]
        if h != r:
            a[[r, h]] = a[[h, r]]
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def gf2_rank(m: np.ndarray) -> int:
    if np.size(m) == 0:
        return 0
    return len(gf2_rref(m)[1])


def gf2_nullspace(m: np.ndarray) -> np.ndarray:
    """Basis (rows, in RREF) of ``{v : m @ v = 0 mod 2}``."""
    m = np.atleast_2d(np.array(m, dtype=np.uint8))
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=np.uint8)
    r, pivots = gf2_rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for row, pc in zip(r, pivots):
            if row[f]:
                v[pc] = 1
        basis.append(v)
    if not basis:
        return np.zeros((0, cols), dtype=np.uint8)
    return gf2_rref(np.array(basis))[0]


def gf2_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Lexicographically smallest ``x`` with ``a @ x = b (mod 2)``, or ``None``.

    Index 0 of ``x`` is the most significant position in the ordering.
    """
    a = np.atleast_2d(np.array(a, dtype=np.uint8))
    b = np.array(b, dtype=np.uint8).reshape(-1)
    rows, cols = a.shape
    aug = np.concatenate([a, b[:, None]], axis=1)
    r, pivots = gf2_rref(aug)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.uint8)
    for row, pc in zip(r, pivots):
        x[pc] = row[cols]
    # the particular solution has zeros on free columns; sweep the kernel to
    # reach the lexicographic minimum of the affine solution space
    for row in gf2_nullspace(a):
        lead = int(np.argmax(row))
        if x[lead]:
            x ^= row
    return x


# -- Pauli strings -----------------------------------------------------------------


def _g_exponent(x1, z1, x2, z2) -> np.ndarray:
    """Exponent of ``i`` picked up by ``sigma(x1,z1) @ sigma(x2,z2)`` per qubit."""
    x1, z1, x2, z2 = (np.asarray(v, dtype=np.int64) for v in (x1, z1, x2, z2))
    out = np.zeros_like(x1)
    ymask = (x1 == 1) & (z1 == 1)
    xmask = (x1 == 1) & (z1 == 0)
    zmask = (x1 == 0) & (z1 == 1)
    out[ymask] = (z2 - x2)[ymask]
    out[xmask] = (z2 * (2 * x2 - 1))[xmask]
    out[zmask] = (x2 * (1 - 2 * z2))[zmask]
    return out


class PauliString:
    """Element ``i**phase * sigma(x_0, z_0) (x) ... (x) sigma(x_n-1, z_n-1)``."""

    __slots__ = ("x", "z", "phase")

    def __init__(self, x: Iterable[int], z: Iterable[int], phase: int = 0):
        x = np.array(list(x), dtype=np.uint8) & 1
        z = np.array(list(z), dtype=np.uint8) & 1
        if x.shape != z.shape:
            raise PauliError(f"x and z lengths differ: {x.size} vs {z.size}")
        x.setflags(write=False)
        z.setflags(write=False)
        self.x = x
        self.z = z
        self.phase = int(phase) % 4

    # construction -----------------------------------------------------------------
    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        """Parse e.g. ``"XIZZY"`` or ``"-iXIZZY"``."""
        m = _PAULI_RE.match(text)
        if m is None:
            raise PauliError(f"not a Pauli string: {text!r}")
        phase = _PHASE_TOKENS[m.group(1)]
        bits = [_LETTERS[c] for c in m.group(2)]
        return cls([b[0] for b in bits], [b[1] for b in bits], phase)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(np.zeros(n), np.zeros(n))

    @classmethod
    def single(cls, n: int, letter: str, qubit: int) -> "PauliString":
        return cls.on(n, {qubit: letter})

    @classmethod
    def on(cls, n: int, letters: dict[int, str]) -> "PauliString":
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        for q, c in letters.items():
            x[q], z[q] = _LETTERS[c]
        return cls(x, z)

    @classmethod
    def from_vector(cls, v: np.ndarray, phase: int = 0) -> "PauliString":
        """From a symplectic vector laid out as ``[x | z]``."""
        v = np.asarray(v)
        n = v.size // 2
        return cls(v[:n], v[n:], phase)

    # properties ---------------------------------------------------------------------
    @property
    def num_qubits(self) -> int:
        return int(self.x.size)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(self.x | self.z)[0])

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def coefficient(self) -> complex:
        return 1j**self.phase

    def letters(self) -> str:
        return "".join(_FROM_BITS[(int(a), int(b))] for a, b in zip(self.x, self.z))

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase] + self.letters()

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self) -> int:
        return hash((self.phase, self.x.tobytes(), self.z.tobytes()))

    # algebra -----------------------------------------------------------------------
    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)

    def inverse(self) -> "PauliString":
        # sigma's are self-inverse, so only the scalar is inverted
        return PauliString(self.x, self.z, -self.phase)

    def with_phase(self, phase: int) -> "PauliString":
        return PauliString(self.x, self.z, phase)

    def restricted_to(self, qubits: Iterable[int]) -> "PauliString":
        mask = np.zeros(self.num_qubits, dtype=np.uint8)
        mask[list(qubits)] = 1
        return PauliString(self.x & mask, self.z & mask, self.phase)

    # dense representations ------------------------------------------------------------
    def _ints(self) -> tuple[int, int]:
        n = self.num_qubits
        xi = sum(int(b) << (n - 1 - j) for j, b in enumerate(self.x))
        zi = sum(int(b) << (n - 1 - j) for j, b in enumerate(self.z))
        return xi, zi

    def _column_factors(self) -> tuple[int, np.ndarray]:
        n = self.num_qubits
        xi, zi = self._ints()
        idx = np.arange(1 << n, dtype=np.int64)
        signs = 1 - 2 * (np.bitwise_count(idx & zi) & 1).astype(np.int64)
        # Y = iXZ: each Y contributes one factor of i on top of X^x Z^z
        scale = 1j ** ((self.phase + int(np.count_nonzero(self.x & self.z))) % 4)
        return xi, scale * signs

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """``P @ psi`` without building the matrix."""
        psi = np.asarray(psi)
        if psi.shape[0] != 1 << self.num_qubits:
            raise PauliError("state dimension does not match Pauli length")
        xi, factors = self._column_factors()
        out = np.empty_like(psi, dtype=complex)
        idx = np.arange(psi.shape[0])
        out[idx ^ xi] = (factors * psi.T).T if psi.ndim > 1 else factors * psi
        return out

    def to_dense(self) -> np.ndarray:
        n = self.num_qubits
        if n > MAX_EXHAUSTIVE_QUBITS:
            raise qla.CapExceeded(f"dense Pauli on {n} qubits exceeds cap")
        xi, factors = self._column_factors()
        idx = np.arange(1 << n)
        m = np.zeros((1 << n, 1 << n), dtype=complex)
        m[idx ^ xi, idx] = factors
        return m


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    if a.num_qubits != b.num_qubits:
        raise PauliError(f"length mismatch: {a.num_qubits} vs {b.num_qubits}")
    g = int(np.sum(_g_exponent(a.x, a.z, b.x, b.z)))
    return PauliString(a.x ^ b.x, a.z ^ b.z, a.phase + b.phase + g)


def symplectic_product(a: np.ndarray, b: np.ndarray) -> int:
    """``<a_x, b_z> + <a_z, b_x>`` over GF(2) for ``[x | z]`` vectors."""
    n = a.size // 2
    return int((a[:n] @ b[n:] + a[n:] @ b[:n]) % 2)


def commutes(a: PauliString, b: PauliString) -> bool:
    if a.num_qubits != b.num_qubits:
        raise PauliError(f"length mismatch: {a.num_qubits} vs {b.num_qubits}")
    return symplectic_product(a.vector, b.vector) == 0


def weight(a: PauliString) -> int:
    return a.weight


def all_paulis(n: int, max_weight: int | None = None) -> Iterable[PauliString]:
    """Hermitian Paulis ordered by weight, then support, then letters (X<Y<Z)."""
    max_weight = n if max_weight is None else min(max_weight, n)
    for w in range(max_weight + 1):
        for support in itertools.combinations(range(n), w):
            for letters in itertools.product("XYZ", repeat=w):
                yield PauliString.on(n, dict(zip(support, letters)))


def decompose_pauli(u: np.ndarray, atol: float = STRUCT_TOL) -> tuple[PauliString, complex] | None:
    """If ``u = c * P`` for a Hermitian Pauli ``P``, return ``(P, c)``."""
    u = np.asarray(u)
    n = qla.num_qubits(u)
    dim = 1 << n
    col0 = u[:, 0]
    nz = np.flatnonzero(np.abs(col0) > atol)
    if nz.size != 1:
        return None
    xi = int(nz[0])
    idx = np.arange(dim)
    diag = u[idx ^ xi, idx]
    c = diag[0]
    if abs(c) < atol:
        return None
    # every column must have its single entry on the X^x pattern
    off = u.copy()
    off[idx ^ xi, idx] = 0
    if np.max(np.abs(off)) > atol:
        return None
    ratios = diag / c
    if np.max(np.abs(np.abs(ratios) - 1)) > atol:
        return None
    zi = 0
    for j in range(n):
        bit = 1 << (n - 1 - j)
        r = ratios[bit]
        if abs(r + 1) <= atol:
            zi |= bit
        elif abs(r - 1) > atol:
            return None
    signs = 1 - 2 * (np.bitwise_count(idx & zi) & 1).astype(np.int64)
    if np.max(np.abs(ratios - signs)) > atol:
        return None
    xbits = [(xi >> (n - 1 - j)) & 1 for j in range(n)]
    zbits = [(zi >> (n - 1 - j)) & 1 for j in range(n)]
    p = PauliString(xbits, zbits)
    # undo the i^{#Y} that to_dense folds in
    c_herm = c / (1j ** (int(np.count_nonzero(p.x & p.z)) % 4))
    return p, complex(c_herm)


# -- stabilizer groups -----------------------------------------------------------------


@dataclass
class StabilizerGroup:
    """Abelian Pauli subgroup given by independent generators, ``k = 1``."""

    generators: list[PauliString]
    logical_x: PauliString | None = None
    logical_z: PauliString | None = None

    def __post_init__(self):
        self.generators = [
            PauliString.from_str(g) if isinstance(g, str) else g for g in self.generators
        ]
        if isinstance(self.logical_x, str):
            self.logical_x = PauliString.from_str(self.logical_x)
        if isinstance(self.logical_z, str):
            self.logical_z = PauliString.from_str(self.logical_z)
        if not self.generators:
            raise PauliError("need at least one generator")
        n = self.generators[0].num_qubits
        if any(g.num_qubits != n for g in self.generators):
            raise PauliError("generators have different lengths")
        for g in self.generators:
            if not g.is_hermitian:
                raise PauliError(f"generator {g} is not Hermitian; its square is -I")
        for a, b in itertools.combinations(self.generators, 2):
            if not commutes(a, b):
                raise PauliError(f"generators {a} and {b} anticommute")
        if gf2_rank(self.matrix) != len(self.generators):
            raise PauliError("generators are not independent over GF(2)")
        for name in ("logical_x", "logical_z"):
            op = getattr(self, name)
            if op is not None and not self.is_logical(op):
                raise PauliError(f"{name}={op} is not a nontrivial logical operator")
        if self.logical_x is not None and self.logical_z is not None:
            if commutes(self.logical_x, self.logical_z):
                raise PauliError("logical_x and logical_z must anticommute")

    @classmethod
    def from_strings(cls, gens: Sequence[str], logical_x: str | None = None, logical_z: str | None = None):
        return cls([PauliString.from_str(g) for g in gens], logical_x, logical_z)

    @property
    def num_qubits(self) -> int:
        return self.generators[0].num_qubits

    @property
    def num_logical(self) -> int:
        return self.num_qubits - len(self.generators)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([g.vector for g in self.generators], dtype=np.uint8)

    def element(self, coeffs: Sequence[int]) -> PauliString:
        """Ordered product of the generators selected by ``coeffs``."""
        out = PauliString.identity(self.num_qubits)
        for c, g in zip(coeffs, self.generators):
            if c:
                out = out * g
        return out

    def commutes_with_all(self, p: PauliString) -> bool:
        return all(commutes(p, g) for g in self.generators)

    def contains(self, p: PauliString) -> bool:
        """Membership in the group, phase included."""
        coeffs = gf2_solve(self.matrix.T, p.vector)
        if coeffs is None:
            return False
        return self.element(coeffs) == p

    def in_span(self, p: PauliString) -> bool:
        """Membership up to phase."""
        return gf2_solve(self.matrix.T, p.vector) is not None

    def is_logical(self, p: PauliString) -> bool:
        return self.commutes_with_all(p) and not self.in_span(p)

    def normalizer_basis(self) -> np.ndarray:
        n = self.num_qubits
        m = self.matrix
        lam = np.concatenate([m[:, n:], m[:, :n]], axis=1)
        return gf2_nullspace(lam)

    def logical_classes(self) -> tuple[np.ndarray, np.ndarray]:
        """Two symplectic vectors spanning N(S)/S, anticommuting."""
        if self.num_logical != 1:
            raise PauliError(f"expected k = 1, got k = {self.num_logical}")
        span = self.matrix
        extra = []
        for v in self.normalizer_basis():
            trial = np.vstack([span, v])
            if gf2_rank(trial) > gf2_rank(span):
                span = trial
                extra.append(v)
        if len(extra) != 2 or symplectic_product(extra[0], extra[1]) == 0:
            raise PauliError("normalizer quotient is not a symplectic pair")
        return extra[0], extra[1]

    def coset(self, p: PauliString) -> Iterable[PauliString]:
        """All ``p * g`` for ``g`` in the group."""
        for coeffs in itertools.product((0, 1), repeat=len(self.generators)):
            yield p * self.element(coeffs)


def _pure_rep_exists(s: StabilizerGroup, v: np.ndarray, kind: str) -> bool:
    n = s.num_qubits
    m = s.matrix
    if kind == "Z":  # need (v + c G)_x = 0
        return gf2_solve(m[:, :n].T, v[:n]) is not None
    return gf2_solve(m[:, n:].T, v[n:]) is not None


def _rep_key(p: PauliString, kind: str) -> tuple:
    pure = not (p.x.any() if kind == "Z" else p.z.any())
    return (p.weight, not pure, p.support, p.letters())


def min_weight_representative(s: StabilizerGroup, p: PauliString, kind: str = "Z") -> PauliString:
    """Lowest-weight element of the coset ``p S`` (exhaustive, ``n <= 12``)."""
    if s.num_qubits > MAX_EXHAUSTIVE_QUBITS:
        raise qla.CapExceeded("coset search limited to 12 qubits")
    return min(s.coset(p), key=lambda q: _rep_key(q, kind))


def logical_operators(s: StabilizerGroup) -> tuple[PauliString, PauliString]:
    """Minimal-weight logical X and Z for a ``k = 1`` group.

    The Z label goes to a class with an all-Z representative when one exists
    (and X likewise), which reproduces the textbook assignment for CSS codes.
    """
    a, b = s.logical_classes()
    classes = [a, b, a ^ b]
    z_cls = next((v for v in classes if _pure_rep_exists(s, v, "Z")), b)
    partners = [
        v for v in classes if not np.array_equal(v, z_cls) and symplectic_product(v, z_cls) == 1
    ]
    x_cls = next((v for v in partners if _pure_rep_exists(s, v, "X")), partners[0])
    lz = min_weight_representative(s, PauliString.from_vector(z_cls), "Z").with_phase(0)
    lx = min_weight_representative(s, PauliString.from_vector(x_cls), "X").with_phase(0)
    return lx, lz


def code_distance(s: StabilizerGroup) -> int:
    """Minimum weight over ``N(S) \\ S`` by exhaustive enumeration of the normalizer."""
    n = s.num_qubits
    if n > MAX_EXHAUSTIVE_QUBITS:
        raise qla.CapExceeded(f"distance search limited to {MAX_EXHAUSTIVE_QUBITS} qubits")
    a, b = s.logical_classes()
    gens = s.matrix.astype(np.int64)
    r = gens.shape[0]
    coeffs = ((np.arange(1 << r)[:, None] >> np.arange(r)[None, :]) & 1).astype(np.int64)
    stab = (coeffs @ gens) % 2
    best = n + 1
    for v in (a, b, a ^ b):
        elems = stab ^ v.astype(np.int64)
        w = np.count_nonzero(elems[:, :n] | elems[:, n:], axis=1)
        best = min(best, int(w.min()))
    return best


def restricted_normalizer(s: StabilizerGroup, r: Iterable[int]) -> list[PauliString]:
    """Basis of Paulis supported inside ``r`` that commute with every generator."""
    n = s.num_qubits
    r = sorted(set(int(q) for q in r))
    if any(q < 0 or q >= n for q in r):
        raise IndexError(f"subset {r} out of range for {n} qubits")
    if not r:
        return []
    m = s.matrix
    cols_x = [n + q for q in r]  # generator z-bits pair with candidate x-bits
    cols_z = list(r)
    lam = np.concatenate([m[:, cols_x], m[:, cols_z]], axis=1)
    out = []
    for v in gf2_nullspace(lam):
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        x[r] = v[: len(r)]
        z[r] = v[len(r):]
        out.append(PauliString(x, z))
    return out


def is_cleanable(s: StabilizerGroup, r: Iterable[int]) -> bool:
    """True iff no nontrivial logical Pauli is supported inside ``r``."""
    return all(s.in_span(p) for p in restricted_normalizer(s, r))


def clean_operator(s: StabilizerGroup, p: PauliString, r: Iterable[int]) -> PauliString:
    """Representative ``p * g`` of the logical ``p`` with no support on ``r``.

    Among all valid stabilizer corrections the lexicographically first GF(2)
    coefficient vector (generator 0 most significant) is used.
    """
    r = sorted(set(int(q) for q in r))
    n = s.num_qubits
    if not s.commutes_with_all(p):
        raise CleaningError(f"{p} does not commute with the stabilizer group")
    if not r:
        return p
    cols = r + [n + q for q in r]
    a = s.matrix[:, cols].T
    coeffs = gf2_solve(a, p.vector[cols])
    if coeffs is None:
        raise CleaningError(f"{p} has no representative avoiding qubits {r}")
    q = p * s.element(coeffs)
    if set(q.support) & set(r) or not s.contains(q * p.inverse()):
        raise VerificationError("cleaning produced an invalid representative")
    return q


# -- dense group-theoretic checks -------------------------------------------------------


def group_commutator(a: np.ndarray, b: np.ndarray, atol: float = STRUCT_TOL) -> np.ndarray:
    """``a b a^dagger b^dagger`` for unitaries of equal dimension."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if not (qla.is_unitary(a, atol) and qla.is_unitary(b, atol)):
        raise ValueError("group_commutator needs unitary inputs")
    return a @ b @ a.conj().T @ b.conj().T


def _pauli_generators(n: int) -> list[np.ndarray]:
    return [qla.embed(g, [q], n) for q in range(n) for g in (qla.X, qla.Z)]


def _all_pauli_mats(n: int) -> list[np.ndarray]:
    return [p.to_dense() for p in all_paulis(n) if p.weight > 0]


def _level(u: np.ndarray, cap: int, atol: float) -> int | None:
    if decompose_pauli(u, atol) is not None:
        return 1
    if cap <= 1:
        return None
    n = qla.num_qubits(u)
    ud = u.conj().T
    worst = 0
    for p in _pauli_generators(n):
        lv = _level(u @ p @ ud, cap - 1, atol)
        if lv is None:
            return None
        worst = max(worst, lv)
    if worst >= 3:
        # C_k is not a group for k >= 3: generators no longer suffice
        for p in _all_pauli_mats(n):
            lv = _level(u @ p @ ud, cap - 1, atol)
            if lv is None:
                return None
            worst = max(worst, lv)
    return worst + 1


def clifford_level(u: np.ndarray, max_k: int = 4, atol: float = 1e-9) -> int | None:
    """Smallest ``k`` with ``u`` in ``C_k`` (up to global phase), ``None`` beyond ``max_k``."""
    u = np.asarray(u, dtype=complex)
    if not qla.is_unitary(u, STRUCT_TOL):
        raise ValueError("clifford_level needs a unitary")
    n = qla.num_qubits(u)
    if n > 4:
        raise qla.CapExceeded("clifford_level supports at most 4 qubits")
    if not 1 <= max_k <= 4:
        raise ValueError("max_k must be in 1..4")
    return _level(u, max_k, atol)


# -- stabilizer codespaces ----------------------------------------------------------------


def codespace_basis(s: StabilizerGroup) -> tuple[np.ndarray, np.ndarray]:
    """Logical basis ``(|0_L>, |1_L>)`` fixed by ``s`` and by ``logical_z``.

    ``|0_L>`` is the normalized projection of the first computational basis
    state with nonzero overlap, phased so its leading amplitude is real and
    positive; ``|1_L> = logical_x |0_L>``.
    """
    n = s.num_qubits
    qla.check_state_cap(n)
    lx, lz = s.logical_x, s.logical_z
    if lx is None or lz is None:
        lx, lz = logical_operators(s)
    projectors = list(s.generators) + [lz]
    dim = 1 << n
    for start in range(dim):
        v = np.zeros(dim, dtype=complex)
        v[start] = 1.0
        for g in projectors:
            v = (v + g.apply(v)) / 2
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            v /= norm
            lead = v[np.flatnonzero(np.abs(v) > 1e-12)[0]]
            v *= abs(lead) / lead
            return v, lx.apply(v)
    raise PauliError("stabilizer group has an empty codespace")


def logical_action(basis: Sequence[np.ndarray], op: np.ndarray, atol: float = E2E_TOL) -> np.ndarray | None:
    """2x2 action of ``op`` on the span of ``basis``; ``None`` if it leaks out."""
    v = np.column_stack(basis)
    w = op @ v
    action = v.conj().T @ w
    if np.linalg.norm(w - v @ action) > atol:
        return None
    return action


def commutator_scalar(
    basis: Sequence[np.ndarray], u: np.ndarray, p: np.ndarray, atol: float = E2E_TOL
) -> complex | None:
    """Scalar ``c`` if ``[u, p]`` acts as ``c * I`` on the codespace, else ``None``."""
    act = logical_action(basis, group_commutator(u, p), atol)
    if act is None:
        return None
    c = act[0, 0]
    if np.linalg.norm(act - c * np.eye(act.shape[0])) > atol:
        return None
    return complex(c)


def transversal_level_bound(
    s: StabilizerGroup,
    partition: Sequence[Iterable[int]],
    transversal_logicals: Sequence[np.ndarray] = (),
    atol: float = E2E_TOL,
) -> int:
    """Hierarchy level ``k = len(partition) - 1`` bounding transversal logicals.

    Every block of ``partition`` must be cleanable. For each supplied dense
    transversal logical ``U`` (``n <= 10``) the commutator with each logical
    Pauli cleaned off the last block is checked to act on the codespace as an
    element of ``C_{k-1}`` (``C_0`` meaning scalars).
    """
    blocks = [sorted(set(int(q) for q in b)) for b in partition]
    flat = [q for b in blocks for q in b]
    if len(flat) != len(set(flat)):
        raise ValueError("partition blocks overlap")
    if not blocks:
        raise ValueError("empty partition")
    for b in blocks:
        if not is_cleanable(s, b):
            raise CleaningError(f"subset {b} is not cleanable")
    k = len(blocks) - 1
    if len(transversal_logicals) == 0:
        return k
    n = s.num_qubits
    if n > 10:
        raise qla.CapExceeded("dense commutator check limited to 10 qubits")
    basis = codespace_basis(s)
    lx, lz = (s.logical_x, s.logical_z) if s.logical_x is not None else logical_operators(s)
    cleaned = [clean_operator(s, p, blocks[-1]).to_dense() for p in (lx, lz)]
    for u in transversal_logicals:
        for pd in cleaned:
            act = logical_action(basis, group_commutator(u, pd), atol)
            if act is None:
                raise VerificationError("commutator leaves the codespace")
            if k - 1 == 0:
                if np.linalg.norm(act - act[0, 0] * np.eye(2)) > atol:
                    raise VerificationError("base-case commutator is not a scalar")
            elif k - 1 <= 4:
                lv = clifford_level(act / np.sqrt(np.linalg.det(act)), max_k=min(k - 1, 4))
                if lv is None:
                    raise VerificationError(f"commutator exceeds level {k - 1}")
    return k


# -- text formats --------------------------------------------------------------------------


def parse_generators(text: str) -> list[PauliString]:
    """One Pauli per line; blank lines and ``#`` comments ignored."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(PauliString.from_str(line))
        except PauliError as exc:
            raise PauliError(f"line {lineno}: {exc}") from None
    return out
