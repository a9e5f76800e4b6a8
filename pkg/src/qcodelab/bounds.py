"""Communication lower bounds and the scheme-size crossing analysis.

``nayak_lower_bound`` and ``qfhe_comm_bound`` are the random-access-code
bounds. ``crossing_analysis`` compares the scheme's server register size
``m n p`` (with ``m = ceil(K^{c'})``, ``K = 2^p``) against the information
requirement ``log2 |F_p|`` of a function class over a finite sweep of ``p``.
All sweep arithmetic is done with exact integers or 50-digit mpmath reals.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass

import mpmath

from .qla import binary_entropy

SCHEME_DEFEATS_BOUND = "scheme_defeats_bound"
BOUND_EXCLUDES_SCHEME = "bound_excludes_scheme"
INCONCLUSIVE = "inconclusive"

_DPS = 50


def nayak_lower_bound(n: int, p: float) -> float:
    """Qubits needed by an ``(n, m, p)`` random access code: ``n (1 - H(p))``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return n * (1 - binary_entropy(p))


def qfhe_comm_bound(n_input_bits: int, epsilon: float) -> float:
    """``2^n (1 - H(eps))`` qubits for evaluating every Boolean function on ``n`` bits."""
    if n_input_bits < 0:
        raise ValueError("n_input_bits must be nonnegative")
    with mpmath.workdps(_DPS):
        return float(mpmath.mpf(2) ** n_input_bits * (1 - mpmath.mpf(binary_entropy(epsilon))))


@dataclass
class BoundReport:
    n_bits: int  # p, the plaintext length
    m: int
    scheme_size_qubits: float
    lower_bound_qubits: float
    verdict: str
    epsilon: float | None = None


@dataclass
class CrossingReport:
    points: list[BoundReport]
    verdict: str
    crossover_p: int | None
    n: int
    c_prime: float

    def to_csv(self) -> str:
        lines = ["p,m,scheme_size,required,verdict"]
        for pt in self.points:
            lines.append(
                f"{pt.n_bits},{pt.m},{pt.scheme_size_qubits:.17g},{pt.lower_bound_qubits:.17g},{pt.verdict}"
            )
        return "\n".join(lines) + "\n"


def columns_for(p: int, c_prime: float) -> int:
    """``ceil(K^{c'})`` for ``K = 2^p``, exactly.

    ``c'`` is read through its shortest decimal repr, so 0.9 means 9/10 and
    ``K^{0.9}`` at ``p = 10`` is exactly 512 rather than a hair above it.
    """
    with mpmath.workdps(_DPS):
        return int(mpmath.ceil(mpmath.mpf(2) ** (mpmath.mpf(p) * mpmath.mpf(repr(float(c_prime))))))


def all_boolean_functions(p: int) -> int:
    """``log2`` of the number of Boolean functions on ``p`` bits."""
    return 2**p


def clifford_group(p: int) -> int:
    """Upper bound on ``log2`` of the ``p``-qubit Clifford group size."""
    return 2 * p * p + 3 * p


def affine_flips(p: int) -> int:
    return p


LOG_F_FAMILIES: dict[str, Callable[[int], int]] = {
    "boolean": all_boolean_functions,
    "clifford": clifford_group,
    "linear": affine_flips,
}


def crossing_analysis(
    n: int,
    log_f: Callable[[int], float],
    c_prime: float,
    p_values: Iterable[int] = range(1, 31),
    constant: float = 1.0,
) -> CrossingReport:
    """Compare ``m n p`` with ``constant * log_f(p)`` at each ``p``.

    Per point the verdict says which side is larger. Over the sweep:

    * ``bound_excludes_scheme`` when the requirement exceeds the scheme size
      from some ``p*`` through the end of the range (``crossover_p = p*``);
    * ``scheme_defeats_bound`` when the scheme is at least as large everywhere
      and the ratio requirement/scheme never increases along the sweep;
    * ``inconclusive`` otherwise.
    """
    if not 0 < c_prime < 1:
        raise ValueError("c_prime must lie in (0, 1)")
    if hasattr(n, "n"):  # accept QheParams
        n = n.n
    ps = sorted(set(int(p) for p in p_values))
    if not ps or ps[0] < 1:
        raise ValueError("p values must be positive integers")
    points = []
    ratios = []
    with mpmath.workdps(_DPS):
        for p in ps:
            m = columns_for(p, c_prime)
            size = m * n * p
            need = mpmath.mpf(constant) * mpmath.mpf(log_f(p))
            excluded = need > size
            points.append(
                BoundReport(
                    n_bits=p,
                    m=m,
                    scheme_size_qubits=float(size),
                    lower_bound_qubits=float(need),
                    verdict=BOUND_EXCLUDES_SCHEME if excluded else SCHEME_DEFEATS_BOUND,
                )
            )
            ratios.append(need / size)
    crossover = None
    for pt in reversed(points):
        if pt.verdict != BOUND_EXCLUDES_SCHEME:
            break
        crossover = pt.n_bits
    if crossover is not None:
        verdict = BOUND_EXCLUDES_SCHEME
    elif all(pt.verdict == SCHEME_DEFEATS_BOUND for pt in points) and all(
        b <= a for a, b in zip(ratios, ratios[1:])
    ):
        verdict = SCHEME_DEFEATS_BOUND
    else:
        verdict = INCONCLUSIVE
    return CrossingReport(points, verdict, crossover, n, c_prime)

