import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcodelab import qla


def brute_partial_trace(rho, keep, n):
    """Index-by-index contraction; independent of the einsum path."""
    keep = list(keep)
    out = np.zeros((1 << len(keep),) * 2, dtype=complex)
    for i, j in itertools.product(range(1 << n), repeat=2):
        bi = [(i >> (n - 1 - q)) & 1 for q in range(n)]
        bj = [(j >> (n - 1 - q)) & 1 for q in range(n)]
        if any(bi[q] != bj[q] for q in range(n) if q not in keep):
            continue
        a = int("".join(str(bi[q]) for q in keep), 2) if keep else 0
        b = int("".join(str(bj[q]) for q in keep), 2) if keep else 0
        out[a, b] += rho[i, j]
    return out


# -- tensor / basis ------------------------------------------------------------------------------


def test_tensor_identity():
    assert np.array_equal(qla.tensor(qla.I2, qla.I2), np.eye(4))


def test_tensor_xx_flips_both():
    out = qla.tensor(qla.X, qla.X) @ qla.basis_state("00")
    assert np.allclose(out, qla.basis_state("11"))


def test_tensor_projector_with_mixed():
    rho = qla.tensor(qla.projector(qla.basis_state("0")), qla.maximally_mixed(1))
    assert abs(np.trace(rho) - 1) < 1e-12
    assert qla.numerical_rank(rho) == 2


def test_first_factor_is_high_order():
    # qubit 0 is the most significant bit
    psi = qla.tensor(qla.basis_state("1"), qla.basis_state("0"))
    assert np.argmax(np.abs(psi)) == 0b10


def test_gate_aliases():
    assert np.array_equal(qla.gate("cnot"), qla.CX)
    with pytest.raises(KeyError):
        qla.gate("nope")


# -- partial trace -------------------------------------------------------------------------------


def test_partial_trace_product():
    rho = qla.projector(qla.basis_state("00"))
    assert np.allclose(qla.partial_trace(rho, [0]), qla.projector(qla.basis_state("0")))


def test_partial_trace_bell_matches_brute_force():
    phi = (qla.basis_state("00") + qla.basis_state("11")) / math.sqrt(2)
    rho = qla.projector(phi)
    want = brute_partial_trace(rho, [0], 2)
    assert np.allclose(want, np.eye(2) / 2)
    assert np.allclose(qla.partial_trace(rho, [0]), want, atol=1e-12)


def test_partial_trace_of_state_vector():
    phi = (qla.basis_state("00") + qla.basis_state("11")) / math.sqrt(2)
    assert np.allclose(qla.partial_trace(phi, [1]), np.eye(2) / 2)


@pytest.mark.parametrize("keep", [[0], [2], [1, 0], [2, 0], [0, 1, 2], []])
def test_partial_trace_brute_force_random(keep):
    rho = qla.random_density(3, np.random.default_rng(4))
    assert np.allclose(qla.partial_trace(rho, keep), brute_partial_trace(rho, keep, 3), atol=1e-12)


def test_partial_trace_preserves_trace():
    rho = qla.random_density(4, np.random.default_rng(1))
    assert abs(np.trace(qla.partial_trace(rho, [1, 3])) - 1) < 1e-12


def test_partial_trace_out_of_range():
    with pytest.raises(IndexError):
        qla.partial_trace(np.eye(4) / 4, [2])


def test_overlap_identity_fixed_example():
    rng = np.random.default_rng(11)
    rho = qla.random_density(2, rng)  # qubits {0, 1}
    sigma = qla.random_density(2, rng)  # qubits {1, 2}
    lhs = np.trace(np.kron(rho, np.eye(2)) @ np.kron(np.eye(2), sigma))
    rhs = np.trace(qla.partial_trace(rho, [1]) @ qla.partial_trace(sigma, [0]))
    assert abs(lhs - rhs) <= 1e-10


def overlap_identity_gap(seed: int) -> float:
    """|Tr((rho (x) I)(I (x) sigma)) - Tr(Tr_a(rho) Tr_b(sigma))| for one random instance."""
    rng = np.random.default_rng(seed)
    a, d, b = (int(v) for v in rng.integers(1, 3, size=3))
    rho = qla.random_density(a + d, rng)
    sigma = qla.random_density(d + b, rng)
    lhs = np.trace(np.kron(rho, np.eye(1 << b)) @ np.kron(np.eye(1 << a), sigma))
    rhs = np.trace(
        qla.partial_trace(rho, list(range(a, a + d))) @ qla.partial_trace(sigma, list(range(d)))
    )
    return float(abs(lhs - rhs))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_overlap_identity_property(seed):
    assert overlap_identity_gap(seed) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_partial_trace_keeps_density(seed, n):
    rng = np.random.default_rng(seed)
    rho = qla.random_density(n, rng)
    keep = sorted(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False).tolist())
    assert qla.is_density(qla.partial_trace(rho, keep))


# -- permutations --------------------------------------------------------------------------------


def test_permute_identity():
    rho = qla.random_density(3, np.random.default_rng(0))
    assert np.array_equal(qla.permute_qubits(rho, [0, 1, 2]), rho)


def test_permute_swap_basis():
    rho = qla.projector(qla.basis_state("01"))
    assert np.allclose(qla.permute_qubits(rho, [1, 0]), qla.projector(qla.basis_state("10")))


def test_permute_three_cycle_composition():
    rho = qla.random_density(3, np.random.default_rng(2))
    cyc = [1, 2, 0]
    inv_sq = qla.inverse_permutation([cyc[cyc[k]] for k in range(3)])
    out = qla.permute_qubits(qla.permute_qubits(qla.permute_qubits(rho, cyc), cyc), inv_sq)
    assert np.linalg.norm(out - rho) <= 1e-12


def test_permute_matches_swap_conjugation():
    rho = qla.random_density(2, np.random.default_rng(3))
    assert np.allclose(qla.permute_qubits(rho, [1, 0]), qla.SWAP @ rho @ qla.SWAP)


def test_permute_rejects_non_bijection():
    with pytest.raises(ValueError):
        qla.permute_qubits(np.eye(4), [0, 0])


def test_embed_and_apply_agree():
    rng = np.random.default_rng(5)
    u = qla.random_unitary(2, rng)
    psi = qla.random_state(4, rng)
    assert np.allclose(qla.embed(u, [3, 1], 4) @ psi, qla.apply(u, psi, [3, 1]))


# -- norms ---------------------------------------------------------------------------------------


def test_trace_distance_self():
    rho = qla.random_density(2, np.random.default_rng(0))
    assert qla.trace_distance(rho, rho) < 1e-12


def test_trace_distance_orthogonal():
    a = qla.projector(qla.basis_state("0"))
    b = qla.projector(qla.basis_state("1"))
    assert abs(qla.trace_distance(a, b) - 2) < 1e-12


def test_trace_distance_zero_plus():
    plus = np.array([1, 1]) / math.sqrt(2)
    a, b = qla.projector(qla.basis_state("0")), qla.projector(plus)
    # oracle: eigenvalues of the difference are +-1/sqrt2
    ev = np.linalg.eigvalsh(a - b)
    assert np.allclose(sorted(ev), [-1 / math.sqrt(2), 1 / math.sqrt(2)])
    assert abs(qla.trace_distance(a, b) - math.sqrt(2)) < 1e-12


def test_trace_norm_non_hermitian_uses_singular_values():
    a = np.array([[0, 2], [0, 0]], dtype=complex)
    assert abs(qla.trace_norm(a) - 2) < 1e-12


def test_trace_distance_shape_mismatch():
    with pytest.raises(ValueError):
        qla.trace_distance(np.eye(2), np.eye(4))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trace_distance_triangle_and_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (qla.random_density(2, rng) for _ in range(3))
    assert qla.trace_distance(a, c) <= qla.trace_distance(a, b) + qla.trace_distance(b, c) + 1e-9
    u = qla.random_unitary(2, rng)
    rot = qla.trace_distance(u @ a @ u.conj().T, u @ b @ u.conj().T)
    assert abs(rot - qla.trace_distance(a, b)) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_purity_bounds(seed, n):
    rng = np.random.default_rng(seed)
    rank = int(rng.integers(1, (1 << n) + 1))
    rho = qla.random_density(n, rng, rank=rank)
    pur = qla.purity(rho)
    assert 1 / (1 << n) - 1e-12 <= pur <= 1 + 1e-12


# -- entropy ---------------------------------------------------------------------------------------


def test_binary_entropy_endpoints():
    assert qla.binary_entropy(0.5) == 1
    assert qla.binary_entropy(0) == 0
    assert qla.binary_entropy(1) == 0


def test_binary_entropy_matches_extended_precision():
    p = mpmath.mpf("0.11")
    with mpmath.workdps(40):
        want = float(-p * mpmath.log(p, 2) - (1 - p) * mpmath.log(1 - p, 2))
    assert abs(qla.binary_entropy(0.11) - want) < 1e-12
    assert abs(want - 0.4999159) < 1e-6


def test_binary_entropy_domain():
    with pytest.raises(ValueError):
        qla.binary_entropy(1.5)


# -- caps ------------------------------------------------------------------------------------------


def test_caps_are_errors():
    with pytest.raises(qla.CapExceeded):
        qla.check_state_cap(23)
    with pytest.raises(qla.CapExceeded):
        qla.check_density_cap(13)
    qla.check_state_cap(22)
    qla.check_density_cap(12)


def test_num_qubits_rejects_bad_shape():
    with pytest.raises(ValueError):
        qla.num_qubits(np.eye(3))


def test_inv_sqrt_psd_on_support():
    rng = np.random.default_rng(8)
    rho = qla.random_density(2, rng, rank=2)
    m = qla.inv_sqrt_psd(rho)
    proj = m @ rho @ m
    assert np.allclose(proj @ proj, proj, atol=1e-9)
    assert abs(np.trace(proj) - 2) < 1e-9
