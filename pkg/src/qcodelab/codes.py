"""Single-logical-qubit codes as dense codespaces.

A :class:`CodeSpace` is just the pair ``(|0_L>, |1_L>)`` plus metadata. Every
check here works from the amplitudes, so it applies equally to stabilizer and
non-additive codes: Knill-Laflamme scans, erasure recovery with the transpose
channel, concatenation, product-factor (r-fold) decomposition and a Pauli
expansion test for additivity.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import qla
from .pauli import (
    MAX_EXHAUSTIVE_QUBITS,
    PauliError,
    PauliString,
    StabilizerGroup,
    all_paulis,
    code_distance,
    codespace_basis,
    gf2_rref,
)
from .tolerances import E2E_TOL, STRUCT_TOL

SCHMIDT_TOL = 1e-9


class CodeError(ValueError):
    pass


class ErasureError(ValueError):
    """Erasure pattern cannot be corrected (too large or singular channel)."""


class MisalignedFactorizationError(CodeError):
    """The logical basis states split into products along different cuts."""


@dataclass
class Factor:
    """One product factor of a code: subcode basis pair on ``qubits``."""

    qubits: tuple[int, ...]
    zero: np.ndarray
    one: np.ndarray

    @property
    def overlap(self) -> float:
        return float(abs(np.vdot(self.zero, self.one)))

    @property
    def orthogonal(self) -> bool:
        return self.overlap <= SCHMIDT_TOL

    def as_code(self) -> "CodeSpace":
        return CodeSpace(len(self.qubits), self.zero, self.one, name="subcode")


@dataclass
class CodeSpace:
    n: int
    zero: np.ndarray
    one: np.ndarray
    distance: int | None = None
    name: str = "custom"
    stabilizer: StabilizerGroup | None = None
    fold_structure: list[Factor] | None = None

    def __post_init__(self):
        self.zero = np.asarray(self.zero, dtype=complex).reshape(-1)
        self.one = np.asarray(self.one, dtype=complex).reshape(-1)
        qla.check_state_cap(self.n)
        dim = 1 << self.n
        if self.zero.shape != (dim,) or self.one.shape != (dim,):
            raise CodeError(f"basis vectors must have length 2^{self.n} = {dim}")
        for label, v in (("logical_zero", self.zero), ("logical_one", self.one)):
            if abs(np.linalg.norm(v) - 1) > STRUCT_TOL:
                raise CodeError(f"{label} is not normalized (norm {np.linalg.norm(v):.12f})")
        if abs(np.vdot(self.zero, self.one)) > STRUCT_TOL:
            raise CodeError("logical basis states are not orthogonal")
        if self.fold_structure is not None:
            check_fold_structure(self, self.fold_structure)

    @property
    def basis(self) -> tuple[np.ndarray, np.ndarray]:
        return self.zero, self.one

    @property
    def encoder(self) -> np.ndarray:
        """Isometry ``V`` with columns ``|0_L>, |1_L>``."""
        return np.column_stack([self.zero, self.one])

    def encode(self, psi: Sequence[complex]) -> np.ndarray:
        return self.encoder @ np.asarray(psi, dtype=complex)

    def projector(self) -> np.ndarray:
        qla.check_density_cap(self.n)
        v = self.encoder
        return v @ v.conj().T


def check_fold_structure(code: CodeSpace, factors: Sequence[Factor], atol: float = E2E_TOL) -> None:
    used = [q for f in factors for q in f.qubits]
    if len(used) != len(set(used)) or any(q < 0 or q >= code.n for q in used):
        raise CodeError("fold structure subsets must be disjoint and in range")
    if sorted(used) != list(range(code.n)):
        raise CodeError("fold structure does not cover the register")
    order = [q for f in factors for q in f.qubits]
    for label, pick in (("logical_zero", "zero"), ("logical_one", "one")):
        prod = qla.tensor(*[getattr(f, pick) for f in factors])
        rebuilt = qla.permute_qubits(prod, qla.inverse_permutation(order))
        if np.linalg.norm(rebuilt - getattr(code, pick)) > atol:
            raise CodeError(f"fold factors do not reproduce {label}")


# -- builtins -------------------------------------------------------------------------


def from_stabilizer(s: StabilizerGroup, name: str = "custom") -> CodeSpace:
    zero, one = codespace_basis(s)
    dist = code_distance(s) if s.num_qubits <= MAX_EXHAUSTIVE_QUBITS else None
    return CodeSpace(s.num_qubits, zero, one, distance=dist, name=name, stabilizer=s)


_STABILIZERS: dict[str, tuple[list[str], str, str]] = {
    "five_qubit": (["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"], "XXXXX", "ZZZZZ"),
    "steane": (
        ["IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"],
        "XXXXXXX",
        "ZZZZZZZ",
    ),
    # |0_L> = GHZ^{(x)3}, so the all-X string fixes it and one Z per block flips it
    "shor": (
        ["ZZIIIIIII", "IZZIIIIII", "IIIZZIIII", "IIIIZZIII", "IIIIIIZZI", "IIIIIIIZZ",
         "XXXXXXIII", "IIIXXXXXX"],
        "ZZZZZZZZZ",
        "XXXXXXXXX",
    ),
    "bitflip3": (["ZZI", "IZZ"], "XXX", "ZII"),
    "phaseflip3": (["XXI", "IXX"], "ZZZ", "XII"),
    # (|000> +- |111>)/sqrt2: a single GHZ factor of the Shor code
    "ghz3_subcode": (["ZZI", "IZZ"], "ZII", "XXX"),
}

BUILTIN_CODES = tuple(_STABILIZERS)


def builtin_stabilizer(name: str) -> StabilizerGroup:
    try:
        gens, lx, lz = _STABILIZERS[name]
    except KeyError:
        raise CodeError(f"unknown code {name!r}; choose from {', '.join(BUILTIN_CODES)}") from None
    return StabilizerGroup.from_strings(gens, lx, lz)


def builtin_code(name: str) -> CodeSpace:
    return from_stabilizer(builtin_stabilizer(name), name=name)


def repetition_code(n: int, basis: str = "Z") -> CodeSpace:
    """``|0...0>, |1...1>`` (``basis="Z"``) or ``|+...+>, |-...->`` (``"X"``)."""
    if n < 1:
        raise CodeError("repetition code needs n >= 1")
    pair = {"Z": "ZZ", "X": "XX"}[basis]
    if n == 1:
        single = qla.H if basis == "X" else qla.I2
        return CodeSpace(1, single[:, 0], single[:, 1], distance=1, name="trivial")
    gens = ["I" * j + pair + "I" * (n - j - 2) for j in range(n - 1)]
    if basis == "Z":
        s = StabilizerGroup.from_strings(gens, "X" * n, "Z" + "I" * (n - 1))
    else:
        s = StabilizerGroup.from_strings(gens, "Z" * n, "X" + "I" * (n - 1))
    return from_stabilizer(s, name=f"repetition{n}{basis}")


def trivial_code() -> CodeSpace:
    return repetition_code(1)


def local_rotation(code: CodeSpace, u: np.ndarray, qubit: int) -> CodeSpace:
    """The code with the single-qubit unitary ``u`` applied to one physical qubit."""
    zero = qla.apply(u, code.zero, [qubit])
    one = qla.apply(u, code.one, [qubit])
    return CodeSpace(code.n, zero, one, distance=code.distance, name=f"{code.name}_rotated")


# -- Knill-Laflamme ----------------------------------------------------------------------


@dataclass
class KLViolation:
    pauli: str
    kind: str  # "diagonal" or "off_diagonal"
    magnitude: float


@dataclass
class KLReport:
    max_weight: int
    checked: int
    lambdas: dict[str, complex] = field(default_factory=dict)
    violations: list[KLViolation] = field(default_factory=list)
    diagonal_ok: bool = True
    off_diagonal_ok: bool = True

    @property
    def passed(self) -> bool:
        return self.diagonal_ok and self.off_diagonal_ok


def kl_check(
    code: CodeSpace,
    max_weight: int,
    atol: float = E2E_TOL,
    max_violations: int | None = 16,
    paulis: Iterable[PauliString] | None = None,
) -> KLReport:
    """Scan Pauli errors of weight ``<= max_weight`` in lexicographic order.

    For each ``E`` checks ``<0|E|0> = <1|E|1>`` (diagonal) and
    ``<0|E|1> = 0`` (off-diagonal). ``lambdas`` maps each Pauli to ``<0|E|0>``.
    At most ``max_violations`` violations are kept, in scan order.
    """
    if code.n > MAX_EXHAUSTIVE_QUBITS:
        raise qla.CapExceeded(f"kl_check limited to {MAX_EXHAUSTIVE_QUBITS} qubits")
    if max_weight < 0 or max_weight > code.n:
        raise ValueError(f"max_weight must lie in [0, {code.n}]")
    report = KLReport(max_weight=max_weight, checked=0)
    z, o = code.zero, code.one
    for e in paulis if paulis is not None else all_paulis(code.n, max_weight):
        ez, eo = e.apply(z), e.apply(o)
        a, b, c = np.vdot(z, ez), np.vdot(o, eo), np.vdot(z, eo)
        report.checked += 1
        report.lambdas[str(e)] = complex(a)
        found = []
        if abs(a - b) > atol:
            report.diagonal_ok = False
            found.append(KLViolation(str(e), "diagonal", float(abs(a - b))))
        if abs(c) > atol:
            report.off_diagonal_ok = False
            found.append(KLViolation(str(e), "off_diagonal", float(abs(c))))
        for v in found:
            if max_violations is None or len(report.violations) < max_violations:
                report.violations.append(v)
    return report


def kl_distance(code: CodeSpace, atol: float = E2E_TOL) -> int:
    """Smallest ``w`` such that some weight-``w`` Pauli violates Knill-Laflamme."""
    for w in range(1, code.n + 1):
        paulis = (p for p in all_paulis(code.n, w) if p.weight == w)
        if not kl_check(code, w, atol, max_violations=1, paulis=paulis).passed:
            return w
    raise CodeError("no Knill-Laflamme violation found; not a k=1 code")


def distance(code: CodeSpace) -> int:
    """Verified distance, computed on first use and cached on the code."""
    if code.distance is None:
        if code.stabilizer is not None:
            code.distance = code_distance(code.stabilizer)
        else:
            code.distance = kl_distance(code)
    return code.distance


# -- erasure recovery ------------------------------------------------------------------------


def erasure_correctable(code: CodeSpace, erased: Iterable[int], atol: float = E2E_TOL) -> bool:
    """Knill-Laflamme restricted to Paulis supported on the erased set."""
    erased = sorted(set(erased))
    paulis = (
        PauliString.on(code.n, dict(zip(erased, letters)))
        for letters in itertools.product("IXYZ", repeat=len(erased))
    )
    return kl_check(code, code.n, atol, max_violations=1, paulis=paulis).passed


@dataclass
class RecoveryChannel:
    """Transpose-channel recovery for an erasure pattern.

    ``kraus[k]`` maps the kept register (qubits in ascending order) to the
    logical qubit; ``kept`` lists those qubits.
    """

    code: CodeSpace
    erased: tuple[int, ...]
    kept: tuple[int, ...]
    kraus: list[np.ndarray]

    def apply_logical(self, sigma: np.ndarray) -> np.ndarray:
        """Logical 2x2 density from a density on the kept register."""
        return sum(w @ sigma @ w.conj().T for w in self.kraus)

    def apply_kept_vector(self, v: np.ndarray) -> list[np.ndarray]:
        """Unnormalized logical vectors ``W_k v`` for a kept-register vector."""
        return [w @ v for w in self.kraus]


def recovery_channel(code: CodeSpace, erased: Iterable[int], check: bool = True) -> RecoveryChannel:
    erased = tuple(sorted(set(int(q) for q in erased)))
    if any(q < 0 or q >= code.n for q in erased):
        raise IndexError(f"erased qubits {erased} out of range")
    if len(erased) >= code.n:
        raise ErasureError("cannot erase the whole register")
    kept = tuple(q for q in range(code.n) if q not in erased)
    if check:
        d = distance(code)
        if len(erased) > d - 1:
            raise ErasureError(f"{len(erased)} erasures exceed d - 1 = {d - 1}")
    perm = list(erased) + list(kept)
    vp = np.column_stack([qla.permute_qubits(code.zero, perm), qla.permute_qubits(code.one, perm)])
    blocks = vp.reshape(1 << len(erased), 1 << len(kept), 2)
    q = sum(a @ a.conj().T for a in blocks)
    try:
        m = qla.inv_sqrt_psd(q)
    except np.linalg.LinAlgError as exc:
        raise ErasureError(f"recovery channel is numerically singular: {exc}") from None
    kraus = [a.conj().T @ m for a in blocks]
    tp = sum(w.conj().T @ w for w in kraus)
    # trace preservation on the support of the erased-code states
    if check and np.linalg.norm(tp @ q - q) > 1e-8:
        raise ErasureError("recovery channel is not trace preserving on the code image")
    return RecoveryChannel(code, erased, kept, kraus)


def erasure_recover_logical(code: CodeSpace, erased: Iterable[int], corrupted: np.ndarray) -> np.ndarray:
    """Logical 2x2 density recovered from a full-register density operator."""
    ch = recovery_channel(code, erased)
    return ch.apply_logical(qla.partial_trace(corrupted, ch.kept))


def erasure_recover(code: CodeSpace, erased: Iterable[int], corrupted: np.ndarray) -> np.ndarray:
    """Trace out ``erased``, recover, and re-encode onto a fresh full register."""
    qla.check_density_cap(code.n)
    logical = erasure_recover_logical(code, erased, corrupted)
    v = code.encoder
    return v @ logical @ v.conj().T


# -- concatenation ------------------------------------------------------------------------------


def concatenate(outer: CodeSpace, inner: CodeSpace) -> CodeSpace:
    """Replace each physical qubit of ``outer`` by a block of ``inner``.

    Block ``j`` occupies qubits ``j*inner.n ... (j+1)*inner.n - 1``.
    """
    total = outer.n * inner.n
    qla.check_state_cap(total)
    v_in = inner.encoder
    states = []
    for v in outer.basis:
        t = v.reshape((2,) * outer.n)
        for _ in range(outer.n):
            t = np.tensordot(t, v_in, axes=([0], [1]))
        states.append(t.reshape(-1))
    return CodeSpace(total, states[0], states[1], name=f"{outer.name}*{inner.name}")


# -- r-fold structure ---------------------------------------------------------------------------


def _split(state: np.ndarray, nq: int, part: Sequence[int]) -> tuple[np.ndarray, np.ndarray] | None:
    rest = [q for q in range(nq) if q not in part]
    m = state.reshape((2,) * nq).transpose(list(part) + rest).reshape(1 << len(part), -1)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    if s.size > 1 and s[1] > SCHMIDT_TOL:
        return None
    a = u[:, 0]
    lead = a[np.flatnonzero(np.abs(a) > 1e-12)[0]]
    phase = abs(lead) / lead
    return a * phase, s[0] * vh[0] / phase


def _first_factor(state: np.ndarray, nq: int) -> tuple[int, ...]:
    for size in range(1, nq):
        for rest in itertools.combinations(range(1, nq), size - 1):
            part = (0,) + rest
            if _split(state, nq, part) is not None:
                return part
    return tuple(range(nq))


def rfold_decompose(code: CodeSpace) -> list[Factor]:
    """Finest aligned product factorization of both logical basis states.

    Factors are found greedily: the smallest subset containing the lowest
    remaining qubit across which both states have Schmidt rank 1. Raises
    :class:`MisalignedFactorizationError` when the two basis states factor
    along different cuts.
    """
    if code.n > MAX_EXHAUSTIVE_QUBITS:
        raise qla.CapExceeded(f"rfold_decompose limited to {MAX_EXHAUSTIVE_QUBITS} qubits")
    labels = list(range(code.n))
    z, o = code.zero, code.one
    factors: list[Factor] = []
    while labels:
        nq = len(labels)
        pz, po = _first_factor(z, nq), _first_factor(o, nq)
        if pz != po:
            raise MisalignedFactorizationError(
                f"logical_zero splits off qubits {[labels[i] for i in pz]} "
                f"but logical_one splits off {[labels[i] for i in po]}"
            )
        if len(pz) == nq:
            factors.append(Factor(tuple(labels), z, o))
            break
        az, z = _split(z, nq, pz)
        ao, o = _split(o, nq, pz)
        factors.append(Factor(tuple(labels[i] for i in pz), az, ao))
        labels = [labels[i] for i in range(nq) if i not in pz]
    check_fold_structure(code, factors)
    return factors


@dataclass
class Classification:
    kind: str  # "generic", "r_fold" or "maximally_redundant"
    r: int
    distance: int
    factors: list[Factor]
    subcode_reports: list[KLReport]
    non_orthogonal_factors: list[int]

    def __str__(self) -> str:
        return f"r_fold({self.r})" if self.kind == "r_fold" else self.kind


def classify(code: CodeSpace) -> Classification:
    """generic / r_fold(r) / maximally_redundant from the aligned factorization.

    ``r`` counts the factors whose subcode basis pair is orthogonal. Each
    subcode is scanned at weight 1 with diagonal and off-diagonal violations
    kept apart in its report.
    """
    factors = rfold_decompose(code)
    d = distance(code)
    ortho = [f for f in factors if f.orthogonal]
    r = len(ortho)
    reports = [kl_check(f.as_code(), 1, max_violations=None) for f in ortho]
    sub_distance_one = all(not rep.passed for rep in reports)
    if r >= 3 and r == d and sub_distance_one:
        kind = "maximally_redundant"
    elif r > 1:
        kind = "r_fold"
    else:
        kind = "generic"
    bad = [i for i, f in enumerate(factors) if not f.orthogonal]
    return Classification(kind, r, d, factors, reports, bad)


# -- additivity -----------------------------------------------------------------------------------


def _walsh_hadamard(a: np.ndarray, n: int) -> np.ndarray:
    """Transform the last axis: ``out[..., z] = sum_i (-1)^{z.i} a[..., i]``."""
    lead = a.shape[:-1]
    t = a.reshape(lead + (2,) * n)
    for ax in range(len(lead), len(lead) + n):
        e = np.take(t, 0, axis=ax)
        f = np.take(t, 1, axis=ax)
        t = np.stack([e + f, e - f], axis=ax)
    return t.reshape(lead + (1 << n,))


def pauli_expansion(code: CodeSpace) -> np.ndarray:
    """Coefficients ``c[x, z] = Tr(sigma(x, z) P_C) / 2^n`` of the projector.

    ``sigma(x, z)`` is the Hermitian Pauli with X-pattern ``x`` and Z-pattern
    ``z`` (integers, qubit 0 as most significant bit).
    """
    n = code.n
    if n > 10:
        raise qla.CapExceeded("Pauli expansion limited to 10 qubits")
    dim = 1 << n
    idx = np.arange(dim)
    xor = np.bitwise_xor.outer(idx, idx)  # xor[x, i] = i ^ x
    total = np.zeros((dim, dim), dtype=complex)
    for v in code.basis:
        # <v| X^x Z^z |v> = sum_i conj(v[i^x]) (-1)^{z.i} v[i]
        total += _walsh_hadamard(v.conj()[xor] * v[None, :], n)
    ycount = np.bitwise_count(idx[:, None] & idx[None, :]).astype(np.int64)
    return total * (1j ** (ycount % 4)) / dim


def is_additive(code: CodeSpace, atol: float = E2E_TOL) -> bool:
    """Whether the code projector is a uniform signed sum over a Pauli group."""
    n = code.n
    c = pauli_expansion(code)
    if np.max(np.abs(c.imag)) > atol:
        return False
    c = c.real
    xs, zs = np.nonzero(np.abs(c) > atol)
    target = 1 / (1 << (n - 1))
    if not np.allclose(np.abs(c[xs, zs]), target, rtol=0, atol=atol):
        return False
    if len(xs) != 1 << (n - 1):
        return False
    def bits(v):
        return [(int(v) >> (n - 1 - j)) & 1 for j in range(n)]

    vecs = np.array([bits(x) + bits(z) for x, z in zip(xs, zs)], dtype=np.uint8)
    _, piv = gf2_rref(vecs)
    if len(xs) != 1 << len(piv):
        return False
    signed = {
        (int(x), int(z)): PauliString(bits(x), bits(z), 0 if c[x, z] > 0 else 2)
        for x, z in zip(xs, zs)
    }
    elems = list(signed.values())
    for a in elems:
        for b in elems[: len(piv) + 1]:
            prod = a * b
            key = tuple(int(v @ (1 << np.arange(n - 1, -1, -1))) for v in (prod.x, prod.z))
            if key not in signed or signed[key] != prod:
                return False
    return True


# -- code files ------------------------------------------------------------------------------------


class CodeFileError(CodeError):
    pass


def _parse_complex(tok: str, lineno: int) -> complex:
    try:
        re_s, im_s = tok.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError:
        raise CodeFileError(f"line {lineno}: bad amplitude {tok!r}, expected re,im") from None


def parse_code_text(text: str, name: str = "file") -> CodeSpace:
    """Parse the code file format.

    Either a ``stabilizer:`` section with one generator per line (optionally
    followed by ``logical_x:`` / ``logical_z:`` lines) or an ``amplitudes:``
    section with two lines of ``re,im`` pairs for ``|0_L>`` and ``|1_L>``.
    Lines starting with ``#`` are comments; ``name:`` sets the code name.
    """
    section = None
    gens: list[tuple[int, str]] = []
    amps: list[tuple[int, str]] = []
    logicals: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition(":")
        key = key.strip().lower()
        if sep and key in ("stabilizer", "amplitudes"):
            if section is not None:
                raise CodeFileError(f"line {lineno}: a file holds exactly one section")
            section = key
            if val.strip():
                raise CodeFileError(f"line {lineno}: section header takes no value")
            continue
        if sep and key in ("logical_x", "logical_z"):
            logicals[key] = (lineno, val.strip())
            continue
        if sep and key == "name":
            name = val.strip()
            continue
        if section == "stabilizer":
            gens.append((lineno, line))
        elif section == "amplitudes":
            amps.append((lineno, line))
        else:
            raise CodeFileError(f"line {lineno}: expected 'stabilizer:' or 'amplitudes:' first")
    if section is None:
        raise CodeFileError("no 'stabilizer:' or 'amplitudes:' section")
    if section == "stabilizer":
        if not gens:
            raise CodeFileError("stabilizer section is empty")
        parsed = []
        for lineno, g in gens:
            try:
                parsed.append(PauliString.from_str(g))
            except PauliError as exc:
                raise CodeFileError(f"line {lineno}: {exc}") from None
        lx = lz = None
        try:
            if "logical_x" in logicals:
                lx = PauliString.from_str(logicals["logical_x"][1])
            if "logical_z" in logicals:
                lz = PauliString.from_str(logicals["logical_z"][1])
        except PauliError as exc:
            raise CodeFileError(f"logical operator: {exc}") from None
        try:
            s = StabilizerGroup(parsed, lx, lz)
        except PauliError as exc:
            raise CodeFileError(f"lines {gens[0][0]}-{gens[-1][0]}: {exc}") from None
        if s.num_logical != 1:
            raise CodeFileError(f"lines {gens[0][0]}-{gens[-1][0]}: need n-1 generators")
        return from_stabilizer(s, name=name)
    if len(amps) != 2:
        where = amps[-1][0] if amps else "end"
        raise CodeFileError(f"line {where}: amplitudes section needs exactly two lines")
    vecs = []
    for lineno, line in amps:
        vecs.append(np.array([_parse_complex(t, lineno) for t in line.split()]))
    n = max(len(vecs[0]), 1).bit_length() - 1
    for (lineno, _), v in zip(amps, vecs):
        if len(v) != 1 << n or len(v) != len(vecs[0]):
            raise CodeFileError(f"line {lineno}: need 2^n amplitudes, got {len(v)}")
    try:
        return CodeSpace(n, vecs[0], vecs[1], name=name)
    except CodeError as exc:
        raise CodeFileError(f"lines {amps[0][0]}-{amps[1][0]}: {exc}") from None


def format_code_text(code: CodeSpace) -> str:
    lines = [f"name: {code.name}"]
    if code.stabilizer is not None:
        lines.append("stabilizer:")
        lines += [str(g) for g in code.stabilizer.generators]
        if code.stabilizer.logical_x is not None:
            lines.append(f"logical_x: {code.stabilizer.logical_x}")
            lines.append(f"logical_z: {code.stabilizer.logical_z}")
    else:
        lines.append("amplitudes:")
        for v in code.basis:
            lines.append(" ".join(f"{float(a.real)!r},{float(a.imag)!r}" for a in v))
    return "\n".join(lines) + "\n"


def load_code(name: str) -> CodeSpace:
    """A builtin name, ``repetition<n>[Z|X]``, or a path to a code file."""
    if name in _STABILIZERS:
        return builtin_code(name)
    m = re.fullmatch(r"repetition(\d+)([ZX]?)", name)
    if m:
        return repetition_code(int(m.group(1)), m.group(2) or "Z")
    try:
        with open(name, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CodeError(f"unknown code {name!r} and cannot read it as a file: {exc}") from None
    return parse_code_text(text, name=name)


def reduced_purity(state: np.ndarray, keep: Sequence[int]) -> float:
    return qla.purity(qla.partial_trace(state, keep))

