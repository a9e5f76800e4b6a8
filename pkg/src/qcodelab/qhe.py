"""Coding-based information-theoretically secure homomorphic encryption.

Scheme
------
The plaintext ``x`` (``p`` bits) is encoded block by block into a code of
length ``N = n + r``: block ``l`` holds ``|x_l>_L``. The ``r`` withheld
subsystems (one per product factor of the code) stay with the client. Each of
the ``n`` sent subsystems ``j`` becomes an *array* of ``m`` columns of ``p``
qubits; the secret key ``s`` picks the column ``s[j]`` (0-based) that carries
the code qubits, every other column is maximally mixed noise.

Server register layout: qubit ``(j*m + c)*p + l`` is row ``l`` of column ``c``
of array ``j``. Code-only states (``gamma``) are ordered subsystem-major,
``j*p + l``. Joint client states are block-major, qubit ``b*N + q``.

Noise qubits are never stored; they only appear inside the dense server view
and inside the factorized Gram identity
``K^{mn} Tr(gamma_S gamma_S') = K^l * prod_b purity(Tr_{not Delta} gamma_b)``
where ``Delta`` is the set of arrays on which the two keys agree.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath
import numpy as np

from . import qla
from .codes import CodeSpace, classify, distance, load_code, recovery_channel, rfold_decompose
from .tolerances import E2E_TOL
from .transversal import ProductOperator, verify_transversal

KEY_MISMATCH_TOL = 1e-6
PRUNE_TOL = 1e-14
ENUMERATION_BUDGET = 10**7


class SchemeError(ValueError):
    pass


class KeyMismatchError(ValueError):
    """Decoded projection weight too small: the key does not match."""


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class QheParams:
    code: CodeSpace
    p: int
    m: int
    withheld: tuple[int, ...] | None = None
    ancilla_count: int = 2

    def __post_init__(self):
        if self.p < 1:
            raise SchemeError("p must be at least 1")
        if self.m < 1:
            raise SchemeError("m must be at least 1")
        if self.ancilla_count < 0:
            raise SchemeError("ancilla_count must be nonnegative")
        if self.withheld is None:
            factors = [f for f in rfold_decompose(self.code) if f.orthogonal]
            object.__setattr__(self, "withheld", tuple(sorted(min(f.qubits) for f in factors)))
        else:
            w = tuple(sorted(set(int(q) for q in self.withheld)))
            if any(q < 0 or q >= self.code.n for q in w):
                raise SchemeError(f"withheld subsystems {w} out of range")
            if len(w) >= self.code.n:
                raise SchemeError("at least one subsystem must be sent")
            object.__setattr__(self, "withheld", w)

    @property
    def N(self) -> int:
        return self.code.n

    @property
    def r(self) -> int:
        return len(self.withheld)

    @property
    def sent(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.code.n) if q not in self.withheld)

    @property
    def n(self) -> int:
        return len(self.sent)

    @property
    def K(self) -> int:
        return 1 << self.p

    @property
    def server_qubits(self) -> int:
        return self.m * self.n * self.p

    @property
    def noise_qubits(self) -> int:
        return self.n * self.p * (self.m - 1)

    def check_scheme(self) -> None:
        """Require ``r < d`` and exactly one withheld subsystem per product factor."""
        d = distance(self.code)
        cls = classify(self.code)
        factors = [f for f in cls.factors if f.orthogonal]
        if self.r != len(factors):
            raise SchemeError(f"need one withheld subsystem per factor ({len(factors)}), got {self.r}")
        for f in factors:
            if len(set(f.qubits) & set(self.withheld)) != 1:
                raise SchemeError(f"factor on qubits {f.qubits} must contain exactly one withheld subsystem")
        if self.r >= d:
            raise SchemeError(f"scheme needs r < d, got r = {self.r}, d = {d}")


@dataclass(frozen=True)
class SecretKey:
    s: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(int(v) for v in self.s))

    def check(self, params: QheParams) -> None:
        if len(self.s) != params.n or any(v < 0 or v >= params.m for v in self.s):
            raise SchemeError(f"key {self.s} is not in [0, {params.m})^{params.n}")


def keygen(params: QheParams, seed: int | np.random.Generator) -> SecretKey:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return SecretKey(tuple(int(v) for v in rng.integers(0, params.m, size=params.n)))


def all_keys(params: QheParams) -> list[SecretKey]:
    return [SecretKey(s) for s in itertools.product(range(params.m), repeat=params.n)]


# -- ciphertexts -------------------------------------------------------------------------------


@dataclass(frozen=True)
class Ancilla:
    label: int
    state: np.ndarray


@dataclass(frozen=True)
class QheCiphertext:
    """Client-side simulation record of an encryption.

    ``state`` is the joint pure state of all code blocks (sent and withheld
    qubits), block-major. ``placements`` is the key-derived column of each
    array; the server only ever sees :func:`server_view`.
    """

    params: QheParams
    placements: tuple[int, ...]
    state: np.ndarray
    num_blocks: int
    ancillas: tuple[Ancilla, ...] = field(default_factory=tuple)

    @property
    def noise_qubits(self) -> int:
        return self.params.n * self.num_blocks * (self.params.m - 1)

    @property
    def server_qubits(self) -> int:
        return self.params.m * self.params.n * self.num_blocks

    def summary(self) -> dict[str, int]:
        return {
            "blocks": self.num_blocks,
            "server_qubits": self.server_qubits,
            "noise_qubits": self.noise_qubits,
            "withheld_qubits": self.params.r * self.num_blocks,
            "ancillas": len(self.ancillas),
        }


def _bits(x: str | Sequence[int], p: int) -> tuple[int, ...]:
    bits = tuple(int(c) for c in x)
    if len(bits) != p or any(b not in (0, 1) for b in bits):
        raise SchemeError(f"plaintext must be {p} bits, got {x!r}")
    return bits


def encrypt(params: QheParams, key: SecretKey, x: str | Sequence[int], check: bool = True) -> QheCiphertext:
    """Encode ``x`` block-wise; embed sent subsystems at the key's columns.

    ``check=False`` skips the ``r < d`` scheme validation (used by
    experiments on deliberately insecure variants).
    """
    if check:
        params.check_scheme()
    key.check(params)
    bits = _bits(x, params.p)
    qla.check_state_cap(params.N * params.p)
    state = qla.tensor(*[params.code.basis[b] for b in bits])
    ancillas = tuple(
        Ancilla(label=i % 2, state=params.code.basis[i % 2].copy()) for i in range(params.ancilla_count)
    )
    return QheCiphertext(params, key.s, state, params.p, ancillas)


def absorb_ancilla(ct: QheCiphertext, label: int) -> QheCiphertext:
    """Append a published ancilla encryption of ``label`` as a new block."""
    for i, a in enumerate(ct.ancillas):
        if a.label == label:
            qla.check_state_cap(ct.params.N * (ct.num_blocks + 1))
            rest = ct.ancillas[:i] + ct.ancillas[i + 1:]
            return replace(ct, state=np.kron(ct.state, a.state), num_blocks=ct.num_blocks + 1, ancillas=rest)
    raise SchemeError(f"no published ancilla with label {label}")


def evaluate(ct: QheCiphertext, gate: ProductOperator, blocks: Sequence[int] | None = None) -> QheCiphertext:
    """Apply each factor ``U_i`` to the code column of array ``i``.

    Noise columns are invariant under unitary conjugation, so only the code
    qubits change; withheld subsystems are left untouched.
    """
    params = ct.params
    if gate.code.n != params.N:
        raise SchemeError("gate was built for a code of a different length")
    blocks = tuple(range(gate.num_blocks)) if blocks is None else tuple(blocks)
    if len(blocks) != gate.num_blocks or len(set(blocks)) != len(blocks):
        raise SchemeError(f"gate acts on {gate.num_blocks} distinct blocks, got {blocks}")
    if any(b < 0 or b >= ct.num_blocks for b in blocks):
        raise SchemeError(f"blocks {blocks} out of range for {ct.num_blocks} blocks")
    psi = ct.state
    for q in params.sent:
        psi = qla.apply(gate.factors[q], psi, [b * params.N + q for b in blocks])
    return replace(ct, state=psi)


# -- decryption ----------------------------------------------------------------------------------


def _decrypt_branches(ct: QheCiphertext, key: SecretKey) -> list[np.ndarray]:
    """Unnormalized logical branch vectors after erasure recovery of every block.

    Arrays whose key entry differs from the placement yield a noise column:
    the true code qubit is lost and a maximally mixed qubit takes its place.
    """
    params = ct.params
    N, nb = params.N, ct.num_blocks
    ch = recovery_channel(params.code, params.withheld, check=False)
    wrong = [params.sent[j] for j in range(params.n) if key.s[j] != ct.placements[j]]
    inv_sqrt2 = 1 / math.sqrt(2)
    # each branch: tensor with one axis per qubit; axes of processed blocks
    # collapse to a single logical qubit at the front
    n = params.n
    branches = [ct.state.reshape((2,) * (N * nb))]
    for b in range(nb):
        done = b  # logical qubits of finished blocks sit on the leading axes
        new = []
        for t in branches:
            parts = [t]
            # trace out withheld qubits and code qubits hidden behind noise,
            # highest axis first so lower axis numbers stay valid
            for q in sorted(set(params.withheld) | set(wrong), reverse=True):
                parts = [np.take(u, v, axis=done + q) for u in parts for v in (0, 1)]
            # the extracted noise column is a fresh maximally mixed qubit
            for q in sorted(wrong):
                ax = done + params.sent.index(q)
                mixed = []
                for u in parts:
                    zero = np.zeros_like(u)
                    mixed.append(np.stack([u, zero], axis=ax) * inv_sqrt2)
                    mixed.append(np.stack([zero, u], axis=ax) * inv_sqrt2)
                parts = mixed
            for u in parts:
                for w in ch.kraus:
                    wt = w.reshape((2,) * (n + 1))
                    out = np.tensordot(wt, u, axes=(list(range(1, n + 1)), list(range(done, done + n))))
                    out = np.moveaxis(out, 0, done)
                    if np.vdot(out, out).real > PRUNE_TOL:
                        new.append(out)
        branches = new
    return [t.reshape(-1) for t in branches]


def decrypt_distribution(ct: QheCiphertext, key: SecretKey) -> dict[str, float]:
    """Probability of each plaintext string after recovery and logical measurement."""
    key.check(ct.params)
    branches = _decrypt_branches(ct, key)
    nb = ct.num_blocks
    probs = np.zeros(1 << nb)
    for v in branches:
        probs += np.abs(v) ** 2
    total = float(probs.sum())
    if total < 1 - KEY_MISMATCH_TOL:
        raise KeyMismatchError(f"decoded projection weight {total:.6f} < 1; wrong key?")
    probs /= total
    return {format(i, f"0{nb}b"): float(pr) for i, pr in enumerate(probs) if pr > 1e-12}


def decrypt(ct: QheCiphertext, key: SecretKey, rng: np.random.Generator | None = None) -> str:
    """Most likely plaintext, or a sample from the distribution when ``rng`` is given."""
    dist = decrypt_distribution(ct, key)
    outcomes = sorted(dist)
    if rng is None:
        return max(outcomes, key=lambda k: (dist[k], k))
    probs = np.array([dist[k] for k in outcomes])
    return outcomes[int(rng.choice(len(outcomes), p=probs / probs.sum()))]


# -- dense views ---------------------------------------------------------------------------------


def code_density(ct: QheCiphertext) -> np.ndarray:
    """``gamma``: sent code qubits of every block, subsystem-major ``j*p + l``."""
    params = ct.params
    nb = ct.num_blocks
    keep = [b * params.N + params.sent[j] for j in range(params.n) for b in range(nb)]
    qla.check_density_cap(len(keep))
    return qla.partial_trace(ct.state, keep)


def server_layout(params: QheParams, placements: Sequence[int], rows: int) -> list[int]:
    """Permutation mapping (code qubits, then noise qubits) to server qubit order."""
    m, n = params.m, params.n
    perm = []
    noise = n * rows
    for j in range(n):
        for c in range(m):
            for l in range(rows):
                if c == placements[j]:
                    perm.append(j * rows + l)
                else:
                    perm.append(noise)
                    noise += 1
    return perm


def embed_server(params: QheParams, gamma: np.ndarray, placements: Sequence[int], rows: int) -> np.ndarray:
    n_noise = params.n * rows * (params.m - 1)
    total = params.m * params.n * rows
    qla.check_density_cap(total)
    full = np.kron(gamma, qla.maximally_mixed(n_noise)) if n_noise else gamma
    return qla.permute_qubits(full, server_layout(params, placements, rows))


def server_view(ct: QheCiphertext) -> np.ndarray:
    """Dense ``gamma_S`` seen by the server (withheld traced, noise materialized)."""
    return embed_server(ct.params, code_density(ct), ct.placements, ct.num_blocks)


def joint_density(ct: QheCiphertext) -> np.ndarray:
    """Server register plus the client's withheld qubits (withheld last)."""
    params = ct.params
    nb = ct.num_blocks
    withheld = [b * params.N + q for q in params.withheld for b in range(nb)]
    sent = [b * params.N + params.sent[j] for j in range(params.n) for b in range(nb)]
    qla.check_density_cap(params.m * params.n * nb + len(withheld))
    rho = qla.partial_trace(ct.state, sent + withheld)
    n_noise = params.n * nb * (params.m - 1)
    full = np.kron(rho, qla.maximally_mixed(n_noise)) if n_noise else rho
    # full order: sent code, withheld, noise -> server order, withheld
    n_code, n_w = len(sent), len(withheld)
    layout = server_layout(params, ct.placements, nb)
    perm = [q if q < n_code else q + n_w for q in layout] + list(range(n_code, n_code + n_w))
    return qla.permute_qubits(full, perm)


# -- security ------------------------------------------------------------------------------------


def _block_gamma_purity(params: QheParams, bit: int, delta: Sequence[int]) -> float:
    keep = [params.sent[j] for j in delta]
    if not keep:
        return 1.0
    return qla.purity(qla.partial_trace(params.code.basis[bit], keep))


class _PurityCache:
    def __init__(self, params: QheParams):
        self.params = params
        self.cache: dict[tuple[int, tuple[int, ...]], float] = {}

    def __call__(self, bits: Sequence[int], delta: tuple[int, ...]) -> float:
        out = 1.0
        for b in bits:
            k = (b, delta)
            if k not in self.cache:
                self.cache[k] = _block_gamma_purity(self.params, b, delta)
            out *= self.cache[k]
        return out


def gram_overlap(params: QheParams, x: str | Sequence[int], s: SecretKey, s2: SecretKey, _cache=None) -> float:
    """``K^{mn} Tr(gamma_S gamma_S')`` from reduced states on the agreement set."""
    bits = _bits(x, params.p)
    s.check(params)
    s2.check(params)
    delta = tuple(j for j in range(params.n) if s.s[j] == s2.s[j])
    if not delta:
        return 1.0
    purity = _cache or _PurityCache(params)
    return float(params.K ** len(delta)) * purity(bits, delta)


def gram_overlap_dense(params: QheParams, x: str | Sequence[int], s: SecretKey, s2: SecretKey) -> float:
    """Same quantity from two materialized server views (oracle path)."""
    a = server_view(encrypt(params, s, x, check=False))
    b = server_view(encrypt(params, s2, x, check=False))
    return float(params.K ** (params.m * params.n) * np.real(np.vdot(a.conj().T, b)))


def mixed_server_view(params: QheParams, x: str | Sequence[int]) -> np.ndarray:
    """``E_S[gamma_S]`` over all ``m^n`` keys, densely."""
    qla.check_density_cap(params.server_qubits)
    bits = _bits(x, params.p)
    any_key = SecretKey((0,) * params.n)
    gamma = code_density(encrypt(params, any_key, bits, check=False))
    keys = all_keys(params)
    acc = np.zeros((1 << params.server_qubits,) * 2, dtype=complex)
    for k in keys:
        acc += embed_server(params, gamma, k.s, params.p)
    return acc / len(keys)


@dataclass
class SecurityExact:
    dist_to_uniform_x: float
    dist_to_uniform_y: float
    dist_between: float


def security_exact(params: QheParams, x: str | Sequence[int], y: str | Sequence[int]) -> SecurityExact:
    """Dense 1-norm distances of the key-averaged server views."""
    if params.server_qubits > 10:
        raise qla.CapExceeded(
            f"security_exact needs m*n*p <= 10, got {params.server_qubits}; use security_bound"
        )
    ex, ey = mixed_server_view(params, x), mixed_server_view(params, y)
    u = qla.maximally_mixed(params.server_qubits)
    return SecurityExact(qla.trace_distance(ex, u), qla.trace_distance(ey, u), qla.trace_distance(ex, ey))


def p_ell_table(n: int, m: int) -> list[Fraction]:
    """``P(|S cap S'| = l)`` for independent uniform keys in ``[m]^n``, exactly."""
    return [Fraction(math.comb(n, l) * (m - 1) ** (n - l), m**n) for l in range(n + 1)]


def _p_ell_by_counting(n: int, m: int) -> list[Fraction]:
    counts = [0] * (n + 1)
    for delta_size in range(n + 1):
        counts[delta_size] = math.comb(n, delta_size) * m**delta_size * (m * (m - 1)) ** (n - delta_size)
    return [Fraction(c, m ** (2 * n)) for c in counts]


@dataclass
class SecurityBound:
    bound_1norm: float
    second_moment: float  # K^{mn} Tr(E_S[gamma_S]^2)
    p_ell: list[Fraction]
    empirical_c: float | None
    x: str
    method: str
    samples: int | None = None


def _inputs(params: QheParams, x) -> list[tuple[int, ...]]:
    if x is None:
        return list(itertools.product((0, 1), repeat=params.p))
    return [_bits(x, params.p)]


def _second_moment_grouped(params: QheParams, bits, purity) -> float:
    n, m, K = params.n, params.m, params.K
    total = 0.0
    terms = []
    for size in range(n + 1):
        count = m**size * (m * (m - 1)) ** (n - size)
        if count == 0:
            continue
        for delta in itertools.combinations(range(n), size):
            gram = float(K**size) * purity(bits, delta) if delta else 1.0
            terms.append(count * gram)
    total = math.fsum(terms) / float(m ** (2 * n))
    return total


def _second_moment_enumerated(params: QheParams, bits, purity, workers: int | None) -> float:
    keys = all_keys(params)
    x = "".join(map(str, bits))

    def row(s: SecretKey) -> float:
        return math.fsum(gram_overlap(params, x, s, s2, purity) for s2 in keys)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, keys))
    else:
        rows = [row(s) for s in keys]
    return math.fsum(rows) / len(keys) ** 2


def _second_moment_sampled(params: QheParams, bits, purity, samples: int, seed: int) -> float:
    rng = np.random.default_rng(seed)
    a = rng.integers(0, params.m, size=(samples, params.n))
    b = rng.integers(0, params.m, size=(samples, params.n))
    x = "".join(map(str, bits))
    vals = [gram_overlap(params, x, SecretKey(u), SecretKey(v), purity) for u, v in zip(a, b)]
    return math.fsum(vals) / samples


def _empirical_c(params: QheParams, bits, purity) -> float | None:
    """``min over nonempty Delta of (l - log_K gram)``, rounded to 12 decimals."""
    best = None
    for size in range(1, params.n + 1):
        for delta in itertools.combinations(range(params.n), size):
            val = -math.log(purity(bits, delta), params.K)
            best = val if best is None else min(best, val)
    return None if best is None else round(best, 12)


def security_bound(
    params: QheParams,
    x: str | Sequence[int] | None = None,
    method: str = "grouped",
    workers: int | None = None,
    samples: int = 20000,
    seed: int = 0,
) -> SecurityBound:
    """Upper bound ``||E_S[gamma_S] - I/D||_1 <= sqrt(K^{mn} Tr(E_S[gamma_S]^2) - 1)``.

    ``method``:
      * ``"grouped"``: exact, sums Gram overlaps by agreement set with
        multiplicity ``m^l (m(m-1))^{n-l}``;
      * ``"enumerate"``: exact, loops over all ``m^{2n}`` key pairs (budget
        ``10^7``), optionally over ``workers`` threads with a fixed-order sum;
      * ``"sample"``: seeded Monte Carlo estimate over ``samples`` key pairs.

    With ``x=None`` the worst case over all plaintexts is reported.
    """
    purity = _PurityCache(params)
    best = None
    for bits in _inputs(params, x):
        if method == "grouped":
            s2 = _second_moment_grouped(params, bits, purity)
        elif method == "enumerate":
            if params.m ** (2 * params.n) > ENUMERATION_BUDGET:
                raise BudgetExceeded(
                    f"m^(2n) = {params.m ** (2 * params.n)} key pairs exceeds {ENUMERATION_BUDGET}; "
                    "use method='sample' or 'grouped'"
                )
            s2 = _second_moment_enumerated(params, bits, purity, workers)
        elif method == "sample":
            s2 = _second_moment_sampled(params, bits, purity, samples, seed)
        else:
            raise ValueError(f"unknown method {method!r}")
        bound = math.sqrt(max(0.0, s2 - 1.0))
        if best is None or bound > best.bound_1norm:
            best = SecurityBound(
                bound_1norm=bound,
                second_moment=s2,
                p_ell=_p_ell_by_counting(params.n, params.m),
                empirical_c=_empirical_c(params, bits, purity),
                x="".join(map(str, bits)),
                method=method,
                samples=samples if method == "sample" else None,
            )
    return best


@dataclass
class EpsilonValue:
    value: float
    indeterminate: bool
    radicand: float


def epsilon_formula(K: float, m: float, n: int, c: float) -> EpsilonValue:
    """``sqrt(((m-1)/m)^n - 1 + K^{-c} (2K/m)^n)`` in extended precision.

    A negative radicand makes the closed form vacuous; the value is then
    reported as 0 with ``indeterminate`` set.
    """
    if K < 2 or m < 1 or n < 1 or not 0 < c < 1:
        raise ValueError("need K >= 2, m >= 1, n >= 1 and 0 < c < 1")
    with mpmath.workdps(50):
        K_, m_ = mpmath.mpf(K), mpmath.mpf(m)
        rad = ((m_ - 1) / m_) ** n - 1 + K_ ** (-c) * (2 * K_ / m_) ** n
        if rad < 0:
            return EpsilonValue(0.0, True, float(rad))
        return EpsilonValue(float(mpmath.sqrt(rad)), False, float(rad))


# -- no-withholding rank experiment ------------------------------------------------------------------


@dataclass
class RankReport:
    rank: int
    dim: int
    rank_fraction: float
    rank_bound: int
    fraction_bound: float
    distance_lower_bound: float
    distance_to_uniform: float


def rank_experiment(params: QheParams, x: str | Sequence[int] | None = None) -> RankReport:
    """Rank of ``E_S[gamma_S]`` and the 1-norm floor it implies.

    A rank-``R`` state in dimension ``D`` is at least ``2(1 - R/D)`` from
    ``I/D`` in 1-norm. ``rank_bound = m^n 2^{np(m-1)}`` applies when nothing
    is withheld and the code columns are pure.
    """
    if params.server_qubits > 10:
        raise qla.CapExceeded(f"rank experiment needs m*n*p <= 10, got {params.server_qubits}")
    x = "0" * params.p if x is None else x
    rho = mixed_server_view(params, x)
    dim = 1 << params.server_qubits
    rank = qla.numerical_rank(rho)
    n, m, p = params.n, params.m, params.p
    return RankReport(
        rank=rank,
        dim=dim,
        rank_fraction=rank / dim,
        rank_bound=m**n * 2 ** (n * p * (m - 1)),
        fraction_bound=float(m**n) / 2 ** (n * p),
        distance_lower_bound=2 * (1 - rank / dim),
        distance_to_uniform=qla.trace_distance(rho, qla.maximally_mixed(params.server_qubits)),
    )


def no_withhold_rank_experiment(params: QheParams, x: str | Sequence[int] | None = None) -> RankReport:
    """Rank experiment on the same code and ``p, m`` with every subsystem sent."""
    bare = QheParams(params.code, params.p, params.m, withheld=(), ancilla_count=0)
    return rank_experiment(bare, x)


# -- QRAC harness --------------------------------------------------------------------------------


@dataclass
class QracMember:
    """Boolean map with its transversal implementation.

    ``target`` is the logical permutation matrix on ``gate.num_blocks`` bits,
    applied to ``blocks`` of the ``p``-bit plaintext.
    """

    name: str
    gate: ProductOperator
    target: np.ndarray
    blocks: tuple[int, ...] | None = None

    def classical(self, bits: tuple[int, ...], p: int) -> tuple[int, ...]:
        blocks = self.blocks if self.blocks is not None else tuple(range(self.gate.num_blocks))
        t = np.asarray(self.target)
        col = int("".join(str(bits[b]) for b in blocks), 2)
        out = int(np.argmax(np.abs(t[:, col])))
        if abs(abs(t[out, col]) - 1) > E2E_TOL:
            raise SchemeError(f"{self.name} is not a classical reversible map")
        res = list(bits)
        for k, b in enumerate(blocks):
            res[b] = (out >> (len(blocks) - 1 - k)) & 1
        return tuple(res)


@dataclass
class QracQuery:
    member: str
    x: str
    expected: str
    success_prob: float


@dataclass
class QracReport:
    queries: list[QracQuery]
    communication_qubits: int


def qrac_harness(params: QheParams, family: Sequence[QracMember], seed: int = 0) -> QracReport:
    """Encode each database ``f`` as the evaluated ciphertext and query every ``x``."""
    if params.p > 2:
        raise SchemeError("QRAC harness is limited to p <= 2")
    for member in family:
        if not verify_transversal(member.gate, member.target).logical:
            raise SchemeError(f"{member.name} has no verified transversal implementation")
    key = keygen(params, seed)
    queries = []
    for member in family:
        for bits in itertools.product((0, 1), repeat=params.p):
            x = "".join(map(str, bits))
            ct = evaluate(encrypt(params, key, x), member.gate, member.blocks)
            expected = "".join(map(str, member.classical(bits, params.p)))
            dist = decrypt_distribution(ct, key)
            queries.append(QracQuery(member.name, x, expected, dist.get(expected, 0.0)))
    return QracReport(queries, params.server_qubits)


# -- scheme files ------------------------------------------------------------------------------------


@dataclass
class SchemeConfig:
    params: QheParams
    seed: int


def parse_scheme_text(text: str) -> SchemeConfig:
    """``key: value`` lines: code, p, m, withheld (list or ``default``), seed, ancilla_count."""
    values: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition(":")
        key = key.strip().lower()
        if not sep:
            raise SchemeError(f"line {lineno}: expected 'key: value'")
        if key not in {"code", "p", "m", "withheld", "seed", "ancilla_count", "n_sent"}:
            raise SchemeError(f"line {lineno}: unknown key {key!r}")
        values[key] = (lineno, val.strip())
    if "code" not in values:
        raise SchemeError("scheme file needs a 'code' line")

    def integer(name: str, default: int | None = None) -> int:
        if name not in values:
            if default is None:
                raise SchemeError(f"scheme file needs a '{name}' line")
            return default
        lineno, v = values[name]
        try:
            return int(v)
        except ValueError:
            raise SchemeError(f"line {lineno}: {name} must be an integer") from None

    code = load_code(values["code"][1])
    withheld = None
    if "withheld" in values:
        lineno, v = values["withheld"]
        if v.lower() == "default":
            withheld = None
        elif v.lower() in ("none", ""):
            withheld = ()
        else:
            try:
                withheld = tuple(int(t) for t in v.replace(",", " ").split())
            except ValueError:
                raise SchemeError(f"line {lineno}: withheld must list qubit indices") from None
    params = QheParams(code, integer("p"), integer("m"), withheld, integer("ancilla_count", 2))
    if "n_sent" in values and integer("n_sent") != params.n:
        raise SchemeError(f"line {values['n_sent'][0]}: n_sent = {integer('n_sent')} but scheme sends {params.n}")
    return SchemeConfig(params, integer("seed", 0))


def scheme_from_mapping(d: Mapping[str, str]) -> SchemeConfig:
    return parse_scheme_text("\n".join(f"{k}: {v}" for k, v in d.items()))
