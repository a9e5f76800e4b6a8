import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcodelab import codes, qhe, qla
from qcodelab.qhe import (
    KeyMismatchError,
    QheParams,
    SchemeError,
    SecretKey,
)
from qcodelab.transversal import ProductOperator


@pytest.fixture(scope="module")
def five():
    return QheParams(codes.builtin_code("five_qubit"), p=1, m=2)


@pytest.fixture(scope="module")
def steane2():
    return QheParams(codes.builtin_code("steane"), p=2, m=2)


def uniform(params, u):
    return ProductOperator.uniform(params.code, u)


def expected_distribution(target, x):
    amp = target @ qla.basis_state(x)
    nb = len(x)
    return {format(i, f"0{nb}b"): float(abs(a) ** 2) for i, a in enumerate(amp) if abs(a) ** 2 > 1e-12}


# -- parameters / keys ---------------------------------------------------------------------------


def test_params_layout(five):
    assert five.withheld == (0,)
    assert (five.n, five.r, five.K) == (4, 1, 2)
    assert five.server_qubits == 8
    assert five.noise_qubits == 4
    five.check_scheme()


def test_shor_default_withholds_one_per_factor():
    params = QheParams(codes.builtin_code("shor"), p=1, m=2)
    assert params.withheld == (0, 3, 6)
    with pytest.raises(SchemeError, match="r < d"):
        params.check_scheme()


def test_scheme_rejects_wrong_withheld_count():
    params = QheParams(codes.builtin_code("five_qubit"), p=1, m=2, withheld=(0, 1))
    with pytest.raises(SchemeError):
        params.check_scheme()


def test_params_validation():
    code = codes.builtin_code("five_qubit")
    with pytest.raises(SchemeError):
        QheParams(code, p=0, m=2)
    with pytest.raises(SchemeError):
        QheParams(code, p=1, m=0)
    with pytest.raises(SchemeError):
        QheParams(code, p=1, m=2, withheld=(7,))


def test_keygen_single_column_key(five):
    params = QheParams(five.code, p=1, m=1)
    assert qhe.keygen(params, 5).s == (0, 0, 0, 0)


def test_keygen_deterministic(five):
    assert qhe.keygen(five, 42) == qhe.keygen(five, 42)
    assert qhe.keygen(five, 7).s == (1, 1, 1, 1)


def test_keygen_marginals_are_fair(five):
    rng = np.random.default_rng(123)
    draws = np.array([qhe.keygen(five, rng).s for _ in range(10000)])
    sigma = math.sqrt(10000 * 0.25)
    for j in range(4):
        assert abs(draws[:, j].sum() - 5000) <= 3 * sigma


def test_key_check(five):
    with pytest.raises(SchemeError):
        qhe.encrypt(five, SecretKey((0, 0, 2, 0)), "0")
    with pytest.raises(SchemeError):
        qhe.encrypt(five, SecretKey((0, 0, 0)), "0")


def test_all_keys_count(five):
    assert len(qhe.all_keys(five)) == 16


# -- encrypt -------------------------------------------------------------------------------------


def test_encrypt_five_qubit_views(five):
    ct = qhe.encrypt(five, qhe.keygen(five, 1), "0")
    assert ct.state.size == 1 << 5
    joint = qhe.joint_density(ct)
    assert joint.shape == (1 << 9, 1 << 9)
    view = qhe.server_view(ct)
    assert view.shape == (256, 256)
    assert abs(np.trace(view) - 1) < 1e-12
    assert qla.is_density(view)
    # tracing the withheld qubit out of the joint state gives the server view
    assert np.allclose(qla.partial_trace(joint, list(range(8))), view, atol=1e-12)


def test_fixed_key_views_are_distinguishable_key_average_is_not(five):
    # the sent qubits alone still determine the logical bit (that is what
    # makes erasure recovery of the withheld qubit possible); only the
    # average over keys hides it
    key = qhe.keygen(five, 1)
    a = qhe.server_view(qhe.encrypt(five, key, "0"))
    b = qhe.server_view(qhe.encrypt(five, key, "1"))
    assert abs(qla.trace_distance(a, b) - 2) < 1e-9
    between = qhe.security_exact(five, "0", "1").dist_between
    assert 1e-6 < between < 2 - 1e-6


def test_single_column_view_is_code_density(five):
    params = QheParams(five.code, p=1, m=1)
    ct = qhe.encrypt(params, SecretKey((0,) * 4), "1")
    assert np.allclose(qhe.server_view(ct), qhe.code_density(ct))


def test_code_qubits_lie_in_codespace(steane2):
    ct = qhe.encrypt(steane2, qhe.keygen(steane2, 0), "10")
    proj = steane2.code.encoder
    for b in range(2):
        rho = qla.partial_trace(ct.state, list(range(b * 7, b * 7 + 7)))
        assert abs(np.real(np.trace(proj.conj().T @ rho @ proj)) - 1) < 1e-9


def test_encrypt_rejects_bad_plaintext(five):
    with pytest.raises(SchemeError):
        qhe.encrypt(five, qhe.keygen(five, 0), "01")
    with pytest.raises(SchemeError):
        qhe.encrypt(five, qhe.keygen(five, 0), "2")


def test_ancillas_published(five):
    ct = qhe.encrypt(five, qhe.keygen(five, 0), "0")
    assert [a.label for a in ct.ancillas] == [0, 1]
    assert ct.summary()["ancillas"] == 2


def test_server_view_depends_on_key_only_through_placements(five):
    k1, k2 = SecretKey((0, 1, 1, 0)), SecretKey((1, 0, 0, 1))
    ct1 = qhe.encrypt(five, k1, "1")
    ct2 = qhe.encrypt(five, k2, "1")
    moved = qhe.embed_server(five, qhe.code_density(ct2), k1.s, five.p)
    assert np.array_equal(moved, qhe.server_view(ct1))
    assert not np.allclose(qhe.server_view(ct1), qhe.server_view(ct2))


# -- evaluate / decrypt --------------------------------------------------------------------------


@pytest.mark.parametrize("x", ["0", "1"])
def test_round_trip_p1(five, x):
    key = qhe.keygen(five, 3)
    assert qhe.decrypt(qhe.encrypt(five, key, x), key) == x


@pytest.mark.parametrize("x", ["00", "01", "10", "11"])
def test_round_trip_p2(x):
    params = QheParams(codes.builtin_code("five_qubit"), p=2, m=2)
    key = qhe.keygen(params, 9)
    assert qhe.decrypt_distribution(qhe.encrypt(params, key, x), key) == {x: pytest.approx(1.0, abs=1e-12)}


def test_identity_evaluation_leaves_state(five):
    key = qhe.keygen(five, 0)
    ct = qhe.encrypt(five, key, "1")
    assert np.allclose(qhe.evaluate(ct, uniform(five, qla.I2)).state, ct.state)


def test_logical_x_flips(five):
    key = qhe.keygen(five, 7)
    ct = qhe.evaluate(qhe.encrypt(five, key, "1"), uniform(five, qla.X))
    assert qhe.decrypt(ct, key) == "0"


def test_sequential_evaluations_compose(steane2):
    key = qhe.keygen(steane2, 4)
    ct = qhe.encrypt(steane2, key, "10")
    ct = qhe.evaluate(ct, uniform(steane2, qla.CX))  # 10 -> 11
    ct = qhe.evaluate(ct, uniform(steane2, qla.X), blocks=[0])  # 11 -> 01
    assert qhe.decrypt(ct, key) == "01"


def test_steane_cx_on_ten(steane2):
    key = qhe.keygen(steane2, 0)
    ct = qhe.evaluate(qhe.encrypt(steane2, key, "10"), uniform(steane2, qla.CX))
    assert qhe.decrypt(ct, key) == "11"


def test_cx_with_published_ancilla(steane2):
    params = QheParams(steane2.code, p=1, m=2)
    key = qhe.keygen(params, 2)
    ct = qhe.absorb_ancilla(qhe.encrypt(params, key, "1"), label=0)
    assert ct.num_blocks == 2 and len(ct.ancillas) == 1
    ct = qhe.evaluate(ct, uniform(params, qla.CX))
    assert qhe.decrypt(ct, key) == "11"
    with pytest.raises(SchemeError):
        qhe.absorb_ancilla(ct, label=0)


def test_wrong_key_is_detected(five):
    key = SecretKey((0, 0, 0, 0))
    ct = qhe.encrypt(five, key, "0")
    with pytest.raises(KeyMismatchError):
        qhe.decrypt(ct, SecretKey((1, 0, 0, 0)))


def test_non_css_cx_fails_to_decrypt():
    params = QheParams(codes.builtin_code("five_qubit"), p=2, m=1)
    key = SecretKey((0,) * 4)
    ct = qhe.evaluate(qhe.encrypt(params, key, "10"), uniform(params, qla.CX))
    with pytest.raises(KeyMismatchError):
        qhe.decrypt(ct, key)


def test_evaluate_validates_blocks(steane2):
    ct = qhe.encrypt(steane2, qhe.keygen(steane2, 0), "00")
    with pytest.raises(SchemeError):
        qhe.evaluate(ct, uniform(steane2, qla.X), blocks=[2])
    with pytest.raises(SchemeError):
        qhe.evaluate(ct, uniform(steane2, qla.CX), blocks=[1, 1])


def test_sampled_decrypt_is_seeded():
    params = QheParams(codes.builtin_code("steane"), p=1, m=2)
    key = qhe.keygen(params, 1)
    ct = qhe.evaluate(qhe.encrypt(params, key, "0"), uniform(params, qla.H))
    dist = qhe.decrypt_distribution(ct, key)
    assert dist == {"0": pytest.approx(0.5), "1": pytest.approx(0.5)}
    a = [qhe.decrypt(ct, key, np.random.default_rng(5)) for _ in range(3)]
    b = [qhe.decrypt(ct, key, np.random.default_rng(5)) for _ in range(3)]
    assert a == b


FIVE_LIBRARY = {"I": qla.I2, "X": qla.X, "Y": qla.Y, "Z": qla.Z}
STEANE_LIBRARY_1 = {"I": qla.I2, "X": qla.X, "Y": qla.Y, "Z": qla.Z, "H": qla.H, "S": qla.S}
STEANE_LIBRARY_2 = {"CX": qla.CX, "CZ": qla.CZ}


@pytest.mark.parametrize("name", sorted(FIVE_LIBRARY))
def test_homomorphic_five_qubit_exhaustive(name, five):
    g = FIVE_LIBRARY[name]
    for key in qhe.all_keys(five):
        for x in ("0", "1"):
            ct = qhe.evaluate(qhe.encrypt(five, key, x), uniform(five, g))
            assert qhe.decrypt_distribution(ct, key) == pytest.approx(expected_distribution(g, x), abs=1e-9)


@pytest.mark.parametrize("name", sorted(STEANE_LIBRARY_1) + sorted(STEANE_LIBRARY_2))
def test_homomorphic_steane(name, steane2):
    g = STEANE_LIBRARY_1.get(name)
    if g is None:
        g, blocks = STEANE_LIBRARY_2[name], [0, 1]
        target = g
    else:
        blocks = [1]
        target = np.kron(np.eye(2), g)
    key = qhe.keygen(steane2, 11)
    for x in ("00", "01", "10", "11"):
        ct = qhe.evaluate(qhe.encrypt(steane2, key, x), uniform(steane2, g), blocks)
        assert qhe.decrypt_distribution(ct, key) == pytest.approx(expected_distribution(target, x), abs=1e-9)


# -- Gram identity -------------------------------------------------------------------------------


def test_gram_matches_dense_all_pairs(five):
    keys = qhe.all_keys(five)
    for s, s2 in itertools.product(keys, keys):
        assert abs(qhe.gram_overlap(five, "0", s, s2) - qhe.gram_overlap_dense(five, "0", s, s2)) <= 1e-9


def test_gram_disjoint_is_one(five):
    assert qhe.gram_overlap(five, "1", SecretKey((0,) * 4), SecretKey((1,) * 4)) == 1.0


def test_gram_equal_keys_single_column(five):
    params = QheParams(five.code, p=1, m=1)
    s = SecretKey((0,) * 4)
    ct = qhe.encrypt(params, s, "0")
    want = params.K**params.n * qla.purity(qhe.code_density(ct))
    assert abs(qhe.gram_overlap(params, "0", s, s) - want) <= 1e-9
    assert abs(qhe.gram_overlap_dense(params, "0", s, s) - want) <= 1e-9


@pytest.mark.parametrize("name", ["five_qubit", "steane"])
def test_gram_strictly_below_k_to_ell(name):
    params = QheParams(codes.builtin_code(name), p=1, m=2)
    keys = qhe.all_keys(params)
    for s, s2 in itertools.product(keys, repeat=2):
        ell = sum(a == b for a, b in zip(s.s, s2.s))
        if ell:
            for x in ("0", "1"):
                assert qhe.gram_overlap(params, x, s, s2) < params.K**ell * (1 - 1e-9)


# -- security ------------------------------------------------------------------------------------


def test_p_ell_table_exact():
    table = qhe.p_ell_table(4, 2)
    assert table[0] == Fraction(1, 16)
    assert sum(table) == 1
    for n, m in [(4, 2), (3, 5), (6, 3)]:
        assert qhe._p_ell_by_counting(n, m) == qhe.p_ell_table(n, m)
        assert qhe.p_ell_table(n, m) == [
            Fraction(math.comb(n, l) * (m - 1) ** (n - l), m**n) for l in range(n + 1)
        ]


def test_security_bound_five_qubit(five):
    b = qhe.security_bound(five)
    assert b.second_moment == pytest.approx(1.6875, abs=1e-12)
    assert b.bound_1norm == pytest.approx(math.sqrt(0.6875), abs=1e-12)
    assert b.p_ell == qhe.p_ell_table(4, 2)
    assert b.empirical_c == 1.0


def dense_second_moment(params, x):
    rho = qhe.mixed_server_view(params, x)
    return float(np.real(np.trace(rho @ rho))) * (1 << params.server_qubits)


def test_second_moment_matches_dense(five):
    for x in ("0", "1"):
        assert qhe.security_bound(five, x).second_moment == pytest.approx(dense_second_moment(five, x), abs=1e-9)


def test_security_methods_agree(five):
    grouped = qhe.security_bound(five, "0")
    enumerated = qhe.security_bound(five, "0", method="enumerate")
    assert enumerated.second_moment == pytest.approx(grouped.second_moment, abs=1e-12)
    sampled = qhe.security_bound(five, "0", method="sample", samples=4000, seed=3)
    assert abs(sampled.second_moment - grouped.second_moment) < 0.1


def test_enumeration_is_bit_stable_across_workers(five):
    a = qhe.security_bound(five, "0", method="enumerate", workers=1)
    b = qhe.security_bound(five, "0", method="enumerate", workers=3)
    assert a.second_moment == b.second_moment


def test_enumeration_budget():
    params = QheParams(codes.builtin_code("steane"), p=1, m=20)
    with pytest.raises(qhe.BudgetExceeded):
        qhe.security_bound(params, "0", method="enumerate")


def test_unknown_method(five):
    with pytest.raises(ValueError):
        qhe.security_bound(five, "0", method="magic")


def dense_feasible_points():
    for name in ("five_qubit", "steane"):
        code = codes.builtin_code(name)
        for p in (1, 2):
            for m in (1, 2):
                params = QheParams(code, p=p, m=m)
                if params.server_qubits <= 10:
                    yield params


@pytest.mark.parametrize("params", list(dense_feasible_points()), ids=lambda p: f"{p.code.name}-p{p.p}-m{p.m}")
def test_bound_ordering(params):
    for x in itertools.product("01", repeat=params.p):
        x = "".join(x)
        y = "".join("1" if c == "0" else "0" for c in x)
        ex = qhe.security_exact(params, x, y)
        b = qhe.security_bound(params, x)
        assert ex.dist_to_uniform_x <= b.bound_1norm + 1e-9
        assert ex.dist_between <= ex.dist_to_uniform_x + ex.dist_to_uniform_y + 1e-9


def test_single_column_far_from_uniform(five):
    params = QheParams(five.code, p=1, m=1)
    ex = qhe.security_exact(params, "0", "1")
    assert ex.dist_to_uniform_x > 0.5


def test_security_exact_cap():
    params = QheParams(codes.builtin_code("steane"), p=1, m=2)
    with pytest.raises(qla.CapExceeded):
        qhe.security_exact(params, "0", "1")


def test_empirical_c_never_exceeds_one():
    # any single agreeing array already gives purity 2^{-p} per block
    for name in ("five_qubit", "steane"):
        for p in (1, 2):
            b = qhe.security_bound(QheParams(codes.builtin_code(name), p=p, m=2))
            assert 0 < b.empirical_c <= 1


# -- epsilon formula -----------------------------------------------------------------------------


def test_epsilon_reference_value():
    e = qhe.epsilon_formula(2, 4, 4, 0.5)
    assert not e.indeterminate
    assert abs(e.value - 0.15334) <= 1e-5


def test_epsilon_large_m_goes_vacuous():
    vals = [qhe.epsilon_formula(4, m, 4, 0.5) for m in (10**3, 10**5, 10**8)]
    assert all(v.indeterminate and v.value == 0.0 for v in vals)
    assert all(-1e-2 < v.radicand < 0 for v in vals)
    assert abs(vals[-1].radicand) < abs(vals[0].radicand)


def test_epsilon_unceiled_sweep_decreases():
    vals = [qhe.epsilon_formula(2**p, 2 ** (0.9 * p), 4, 0.5).value for p in range(2, 21)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_epsilon_ceiled_sweep_decreases_for_larger_c():
    vals = [qhe.epsilon_formula(2**p, math.ceil(2 ** (0.9 * p)), 4, 0.9).value for p in range(2, 13)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_epsilon_domain():
    with pytest.raises(ValueError):
        qhe.epsilon_formula(1, 4, 4, 0.5)
    with pytest.raises(ValueError):
        qhe.epsilon_formula(2, 4, 4, 1.0)


# -- rank experiment ------------------------------------------------------------------------------


def test_rank_experiment_two_qubit_code():
    params = QheParams(codes.repetition_code(2), p=1, m=2, withheld=())
    rep = qhe.rank_experiment(params)
    assert rep.dim == 16
    assert rep.rank <= rep.rank_bound == 16
    assert rep.rank == 9
    assert rep.distance_to_uniform >= rep.distance_lower_bound - 1e-9


def test_rank_floor_at_two_inputs():
    params = QheParams(codes.repetition_code(2), p=2, m=2, withheld=())
    rep = qhe.rank_experiment(params)
    assert rep.dim == 256 and rep.rank_bound == 64
    assert rep.rank <= 64
    assert rep.distance_to_uniform >= 1.5 - 1e-6


def test_rank_single_column_is_pure():
    params = QheParams(codes.repetition_code(2), p=1, m=1, withheld=())
    rep = qhe.rank_experiment(params)
    assert rep.rank == 1
    assert rep.distance_to_uniform == pytest.approx(2 * (1 - 1 / 4), abs=1e-9)


def test_withholding_raises_rank():
    bare = qhe.rank_experiment(QheParams(codes.repetition_code(2), p=1, m=2, withheld=()))
    kept = qhe.rank_experiment(QheParams(codes.builtin_code("ghz3_subcode"), p=1, m=2))
    assert kept.dim == bare.dim
    assert kept.rank > bare.rank


def test_no_withhold_variant_sends_everything(five):
    params = QheParams(codes.builtin_code("bitflip3"), p=1, m=1)
    rep = qhe.no_withhold_rank_experiment(params)
    assert rep.dim == 8 and rep.rank == 1


# -- QRAC -----------------------------------------------------------------------------------------


def test_qrac_identity_and_x(five):
    family = [
        qhe.QracMember("identity", uniform(five, qla.I2), qla.I2),
        qhe.QracMember("logical_x", uniform(five, qla.X), qla.X),
    ]
    rep = qhe.qrac_harness(five, family, seed=0)
    assert [(q.member, q.x, q.expected) for q in rep.queries] == [
        ("identity", "0", "0"),
        ("identity", "1", "1"),
        ("logical_x", "0", "1"),
        ("logical_x", "1", "0"),
    ]
    assert all(q.success_prob == pytest.approx(1.0, abs=1e-12) for q in rep.queries)
    assert rep.communication_qubits == five.m * five.n * five.p


def test_qrac_empty_family(five):
    rep = qhe.qrac_harness(five, [])
    assert rep.queries == []


def test_qrac_rejects_non_transversal(five):
    bad = qhe.QracMember("fake_x", uniform(five, qla.Z), qla.X)
    with pytest.raises(SchemeError):
        qhe.qrac_harness(five, [bad])


# -- scheme files ---------------------------------------------------------------------------------


def test_scheme_file_parse():
    cfg = qhe.parse_scheme_text("code: five_qubit\np: 1\nm: 2\nwithheld: 0\nseed: 7\nn_sent: 4\n")
    assert cfg.seed == 7 and cfg.params.withheld == (0,) and cfg.params.n == 4


@pytest.mark.parametrize(
    "text,msg",
    [
        ("code: five_qubit\np: x\nm: 2\n", "line 2"),
        ("code: five_qubit\np: 1\nm: 2\ncolour: red\n", "line 4"),
        ("p: 1\nm: 2\n", "code"),
        ("code: five_qubit\np: 1\nm: 2\nn_sent: 3\n", "line 4"),
        ("code: five_qubit\njunk\n", "line 2"),
    ],
)
def test_scheme_file_errors(text, msg):
    with pytest.raises(SchemeError, match=msg):
        qhe.parse_scheme_text(text)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**16))
def test_decrypt_is_correct_for_any_seeded_key(seed):
    params = QheParams(codes.builtin_code("five_qubit"), p=1, m=3)
    key = qhe.keygen(params, seed)
    ct = qhe.evaluate(qhe.encrypt(params, key, "0"), ProductOperator.uniform(params.code, qla.X))
    assert qhe.decrypt(ct, key) == "1"
