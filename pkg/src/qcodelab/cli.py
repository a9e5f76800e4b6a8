"""Command-line entry point ``qcodelab``.

Exit codes: 0 success or verified, 1 verification failure, 2 usage or input
error. ``--machine`` switches to flat ``key=value`` lines.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence

import numpy as np

from . import bounds, codes, pauli, qhe, qla, transversal
from .tolerances import ENV_VAR, e2e_tol_from_env

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Report:
    """Ordered key/value records printed in human or machine form."""

    def __init__(self, machine: bool, stream=None):
        self.machine = machine
        self.stream = stream or sys.stdout

    @staticmethod
    def fmt(v) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, (float, np.floating)):
            return format(float(v), ".12g")
        if isinstance(v, complex):
            return f"{v.real:.12g}{v.imag:+.12g}j"
        if isinstance(v, (list, tuple)):
            return ",".join(Report.fmt(x) for x in v)
        return str(v)

    def __call__(self, key: str, value) -> None:
        sep = "=" if self.machine else ": "
        print(f"{key}{sep}{self.fmt(value)}", file=self.stream)

    def note(self, text: str) -> None:
        if not self.machine:
            print(text, file=self.stream)


def _subset(text: str | None) -> list[int]:
    if text is None or text.strip() == "":
        return []
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"bad qubit list {text!r}") from None


def _code(name: str) -> codes.CodeSpace:
    try:
        return codes.load_code(name)
    except (codes.CodeError, pauli.PauliError) as exc:
        raise UsageError(str(exc)) from None


def _gate(name: str) -> np.ndarray:
    try:
        return qla.gate(name)
    except KeyError:
        raise UsageError(f"unknown gate {name!r}") from None


# -- codes -------------------------------------------------------------------------------------


def cmd_codes_list(args, out: Report) -> int:
    for name in codes.BUILTIN_CODES:
        c = codes.builtin_code(name)
        out(f"code.{name}", f"n={c.n},d={c.distance}")
    return EXIT_OK


def cmd_codes_check(args, out: Report) -> int:
    code = _code(args.code)
    rep = codes.kl_check(code, args.max_weight, atol=args.tol)
    out("code", code.name)
    out("max_weight", args.max_weight)
    out("paulis_checked", rep.checked)
    lam = {k: v for k, v in rep.lambdas.items() if abs(v) > args.tol}
    out("nonzero_lambdas", len(lam))
    for k, v in sorted(lam.items()):
        out(f"lambda.{k}", complex(round(v.real, 12), round(v.imag, 12)))
    out("diagonal_ok", rep.diagonal_ok)
    out("off_diagonal_ok", rep.off_diagonal_ok)
    for i, v in enumerate(rep.violations):
        out(f"violation.{i}", f"{v.pauli}:{v.kind}:{v.magnitude:.6g}")
    out("passed", rep.passed)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_codes_distance(args, out: Report) -> int:
    code = _code(args.code)
    kl = codes.kl_distance(code, args.tol)
    out("code", code.name)
    out("kl_distance", kl)
    agree = True
    if code.stabilizer is not None:
        sd = pauli.code_distance(code.stabilizer)
        out("stabilizer_distance", sd)
        agree = sd == kl
    out("oracles_agree", agree)
    return EXIT_OK if agree else EXIT_FAIL


def cmd_codes_classify(args, out: Report) -> int:
    code = _code(args.code)
    try:
        cls = codes.classify(code)
    except codes.MisalignedFactorizationError as exc:
        out("error", str(exc))
        return EXIT_FAIL
    out("code", code.name)
    out("classification", str(cls))
    out("r", cls.r)
    out("distance", cls.distance)
    for i, (f, rep) in enumerate(zip([f for f in cls.factors if f.orthogonal], cls.subcode_reports)):
        out(f"factor.{i}.qubits", list(f.qubits))
        out(f"factor.{i}.diagonal_ok", rep.diagonal_ok)
        out(f"factor.{i}.off_diagonal_ok", rep.off_diagonal_ok)
    if cls.non_orthogonal_factors:
        out("non_orthogonal_factors", cls.non_orthogonal_factors)
    return EXIT_OK


def cmd_codes_additive(args, out: Report) -> int:
    code = _code(args.code)
    out("code", code.name)
    out("additive", codes.is_additive(code, args.tol))
    return EXIT_OK


# -- transversal ----------------------------------------------------------------------------------


def _parse_matrix(obj, where: str) -> np.ndarray:
    if isinstance(obj, str):
        return _gate(obj)
    try:
        arr = np.array(obj, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError
        return arr[..., 0] + 1j * arr[..., 1]
    except (ValueError, TypeError):
        raise UsageError(f"{where}: factor must be a gate name or [[re, im], ...] rows") from None


def load_candidate(path: str, code: codes.CodeSpace) -> transversal.ProductOperator:
    """JSON ``{"blocks": r, "factors": [...]}``; one factor means use it everywhere."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read candidate file {path}: {exc}") from None
    if not isinstance(data, dict) or "factors" not in data:
        raise UsageError(f"{path}: expected an object with a 'factors' list")
    factors = [_parse_matrix(f, f"{path} factor {i}") for i, f in enumerate(data["factors"])]
    if len(factors) == 1:
        factors = factors * code.n
    blocks = int(data.get("blocks", qla.num_qubits(factors[0])))
    try:
        return transversal.ProductOperator(code, factors, blocks)
    except transversal.TransversalError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_transversal_verify(args, out: Report) -> int:
    code = _code(args.code)
    if args.candidate:
        op = load_candidate(args.candidate, code)
    elif args.gate:
        op = transversal.ProductOperator.uniform(code, _gate(args.gate))
    else:
        raise UsageError("give --gate or --candidate")
    target = _gate(args.target or args.gate)
    if qla.num_qubits(target) != op.num_blocks:
        raise UsageError("target arity does not match the candidate's block count")
    try:
        rep = transversal.verify_transversal(op, target, args.tol)
    except qla.CapExceeded as exc:
        raise UsageError(str(exc)) from None
    out("code", code.name)
    out("seed", transversal.PROBE_SEED)
    out("blocks", op.num_blocks)
    out("logical", rep.logical)
    if rep.phase is not None:
        out("phase", complex(round(rep.phase.real, 12), round(rep.phase.imag, 12)))
    out("strongly_transversal", rep.strongly_transversal)
    out("implements", rep.implements or "none")
    return EXIT_OK if rep.logical else EXIT_FAIL


def cmd_transversal_search(args, out: Report) -> int:
    code = _code(args.code)
    target = _gate(args.target)
    names = [t for t in args.library.replace(",", " ").split() if t]
    library = {name: _gate(name) for name in names}
    try:
        hits = transversal.strongly_transversal_search(code, target, library, args.workers, args.tol)
    except qla.CapExceeded as exc:
        raise UsageError(str(exc)) from None
    out("code", code.name)
    out("target", args.target)
    out("library", names)
    out("hits", hits if hits else "none")
    return EXIT_OK


# -- stab -----------------------------------------------------------------------------------------


def _stabilizer(code: codes.CodeSpace) -> pauli.StabilizerGroup:
    if code.stabilizer is None:
        raise UsageError(f"code {code.name} has no stabilizer description")
    return code.stabilizer


def cmd_stab_clean(args, out: Report) -> int:
    s = _stabilizer(_code(args.code))
    lx, lz = (s.logical_x, s.logical_z) if s.logical_x is not None else pauli.logical_operators(s)
    if args.logical.lower() in ("x", "z"):
        p = lx if args.logical.lower() == "x" else lz
    else:
        try:
            p = pauli.PauliString.from_str(args.logical)
        except pauli.PauliError as exc:
            raise UsageError(str(exc)) from None
    subset = _subset(args.subset)
    out("logical", str(p))
    out("subset", subset if subset else "none")
    try:
        q = pauli.clean_operator(s, p, subset)
    except pauli.CleaningError as exc:
        out("error", str(exc))
        return EXIT_FAIL
    out("cleaned", str(q))
    out("weight", q.weight)
    out("verified", s.contains(q * p.inverse()) and not set(q.support) & set(subset))
    return EXIT_OK


def cmd_stab_cleanable(args, out: Report) -> int:
    s = _stabilizer(_code(args.code))
    subset = _subset(args.subset)
    ok = pauli.is_cleanable(s, subset)
    out("subset", subset if subset else "none")
    out("cleanable", ok)
    return EXIT_OK


def cmd_stab_level(args, out: Report) -> int:
    u = _gate(args.gate)
    level = pauli.clifford_level(u, args.max_k)
    out("gate", args.gate)
    out("level", level if level is not None else f"exceeds {args.max_k}")
    return EXIT_OK


# -- qhe ------------------------------------------------------------------------------------------


def _params(args, withheld=None) -> tuple[qhe.QheParams, int]:
    if getattr(args, "scheme", None):
        try:
            with open(args.scheme, encoding="utf-8") as fh:
                cfg = qhe.parse_scheme_text(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read scheme file: {exc}") from None
        return cfg.params, cfg.seed if args.seed is None else args.seed
    if args.code is None or args.m is None or args.p is None:
        raise UsageError("give --scheme or all of --code, --m, --p")
    code = _code(args.code)
    if withheld is None and args.withheld is not None:
        withheld = () if args.withheld.lower() == "none" else tuple(_subset(args.withheld))
    return qhe.QheParams(code, args.p, args.m, withheld), args.seed if args.seed is not None else 0


def cmd_qhe_demo(args, out: Report) -> int:
    params, seed = _params(args)
    gate = transversal.ProductOperator.uniform(params.code, _gate(args.gate))
    key = qhe.keygen(params, seed)
    x = args.input
    if gate.num_blocks > params.p:
        raise UsageError(f"gate acts on {gate.num_blocks} blocks but p = {params.p}")
    out("seed", seed)
    out("code", params.code.name)
    out("plaintext", x)
    ct = qhe.encrypt(params, key, x)
    for k, v in ct.summary().items():
        out(f"ciphertext.{k}", v)
    ct = qhe.evaluate(ct, gate)
    out("gate", args.gate)
    dist = qhe.decrypt_distribution(ct, key)
    result = qhe.decrypt(ct, key)
    out("decrypted", result)
    out("probability", dist[result])
    t = _gate(args.gate)
    bits = tuple(int(c) for c in x)
    col = int("".join(map(str, bits[: gate.num_blocks])), 2)
    row = int(np.argmax(np.abs(t[:, col])))
    expected = format(row, f"0{gate.num_blocks}b") + x[gate.num_blocks:]
    ok = abs(abs(t[row, col]) - 1) < 1e-9 and result == expected and dist[result] > 1 - args.tol
    out("expected", expected)
    out("correct", ok)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_qhe_security(args, out: Report) -> int:
    params, seed = _params(args)
    try:
        params.check_scheme()
        b = qhe.security_bound(params, args.x, args.method, args.workers, args.samples, seed)
    except (qhe.SchemeError, qhe.BudgetExceeded) as exc:
        raise UsageError(str(exc)) from None
    out("seed", seed)
    out("code", params.code.name)
    out("params", f"n={params.n},r={params.r},p={params.p},m={params.m}")
    out("x", b.x)
    out("method", b.method)
    out("bound", b.bound_1norm)
    out("second_moment", b.second_moment)
    out("p_ell", [str(v) for v in b.p_ell])
    out("empirical_c", b.empirical_c if b.empirical_c is not None else "none")
    ok = True
    if params.server_qubits <= 10:
        x = b.x
        y = args.y or "".join("1" if c == "0" else "0" for c in x)
        ex = qhe.security_exact(params, x, y)
        out("exact_distance", ex.dist_to_uniform_x)
        out("exact_between", ex.dist_between)
        ok = ex.dist_to_uniform_x <= b.bound_1norm + args.tol
        out("bound_holds", ok)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_qhe_rank(args, out: Report) -> int:
    params, _ = _params(args)
    try:
        rep = qhe.no_withhold_rank_experiment(params)
        other = None
        if args.withheld_code:
            other = qhe.rank_experiment(qhe.QheParams(_code(args.withheld_code), params.p, params.m))
    except qla.CapExceeded as exc:
        raise UsageError(str(exc)) from None
    out("code", params.code.name)
    out("no_withhold.sent", params.code.n)
    out("no_withhold.rank", rep.rank)
    out("no_withhold.dim", rep.dim)
    out("no_withhold.rank_bound", rep.rank_bound)
    out("no_withhold.rank_fraction", rep.rank_fraction)
    out("no_withhold.distance_lower_bound", rep.distance_lower_bound)
    out("no_withhold.distance_to_uniform", rep.distance_to_uniform)
    ok = rep.rank <= rep.rank_bound
    out("rank_within_bound", ok)
    if other is not None:
        out("withheld.code", args.withheld_code)
        out("withheld.rank", other.rank)
        out("withheld.dim", other.dim)
        out("withheld.distance_to_uniform", other.distance_to_uniform)
        if other.dim == rep.dim:
            out("rank_increases", other.rank > rep.rank)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_qhe_qrac(args, out: Report) -> int:
    params, seed = _params(args)
    code = params.code
    family = [
        qhe.QracMember("identity", transversal.ProductOperator.uniform(code, qla.I2), qla.I2),
        qhe.QracMember("logical_x", transversal.ProductOperator.uniform(code, qla.X), qla.X),
    ]
    try:
        rep = qhe.qrac_harness(params, family, seed)
    except qhe.SchemeError as exc:
        raise UsageError(str(exc)) from None
    out("seed", seed)
    out("code", code.name)
    for q in rep.queries:
        out(f"query.{q.member}.{q.x}", f"expected={q.expected},success={Report.fmt(q.success_prob)}")
    out("communication_qubits", rep.communication_qubits)
    ok = all(q.success_prob >= 1 - args.tol for q in rep.queries)
    out("all_succeed", ok)
    return EXIT_OK if ok else EXIT_FAIL


# -- bounds ---------------------------------------------------------------------------------------


def cmd_bounds_nayak(args, out: Report) -> int:
    try:
        v = bounds.nayak_lower_bound(args.n, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out("nayak_lower_bound", v)
    return EXIT_OK


def cmd_bounds_qfhe(args, out: Report) -> int:
    try:
        v = bounds.qfhe_comm_bound(args.n, args.epsilon)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out("qfhe_comm_bound", v)
    return EXIT_OK


def cmd_bounds_crossing(args, out: Report) -> int:
    fam = bounds.LOG_F_FAMILIES.get(args.family)
    if fam is None:
        raise UsageError(f"unknown family {args.family!r}; choose {', '.join(bounds.LOG_F_FAMILIES)}")
    try:
        rep = bounds.crossing_analysis(args.n, fam, args.c_prime, range(args.p_min, args.p_max + 1))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.csv:
        out.stream.write(rep.to_csv())
    out("family", args.family)
    out("verdict", rep.verdict)
    out("crossover_p", rep.crossover_p if rep.crossover_p is not None else "none")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--machine", action="store_true", help="flat key=value output")
    common.add_argument("--tol", type=float, default=None, help=f"tolerance (default ${ENV_VAR} or 1e-9)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--workers", type=int, default=None)

    parser = argparse.ArgumentParser(prog="qcodelab", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    def sub(group, name, func, **kw):
        p = group.add_parser(name, parents=[common], **kw)
        p.set_defaults(func=func)
        return p

    g = groups.add_parser("codes").add_subparsers(dest="cmd", required=True)
    sub(g, "list", cmd_codes_list)
    p = sub(g, "check", cmd_codes_check)
    p.add_argument("--code", required=True)
    p.add_argument("--max-weight", type=int, required=True)
    for name, func in (("distance", cmd_codes_distance), ("classify", cmd_codes_classify),
                       ("additive", cmd_codes_additive)):
        sub(g, name, func).add_argument("--code", required=True)

    g = groups.add_parser("transversal").add_subparsers(dest="cmd", required=True)
    p = sub(g, "verify", cmd_transversal_verify)
    p.add_argument("--code", required=True)
    p.add_argument("--gate")
    p.add_argument("--candidate", help="JSON file with per-subsystem factors")
    p.add_argument("--target")
    p = sub(g, "search", cmd_transversal_search)
    p.add_argument("--code", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--library", required=True, help="comma-separated gate names")

    g = groups.add_parser("stab").add_subparsers(dest="cmd", required=True)
    p = sub(g, "clean", cmd_stab_clean)
    p.add_argument("--code", required=True)
    p.add_argument("--logical", required=True, help="x, z or a Pauli string")
    p.add_argument("--subset", required=True)
    p = sub(g, "cleanable", cmd_stab_cleanable)
    p.add_argument("--code", required=True)
    p.add_argument("--subset", required=True)
    p = sub(g, "level", cmd_stab_level)
    p.add_argument("--gate", required=True)
    p.add_argument("--max-k", type=int, default=4)

    g = groups.add_parser("qhe").add_subparsers(dest="cmd", required=True)
    scheme = argparse.ArgumentParser(add_help=False)
    scheme.add_argument("--scheme", help="scheme config file")
    scheme.add_argument("--code")
    scheme.add_argument("--m", type=int)
    scheme.add_argument("--p", type=int)
    scheme.add_argument("--withheld", help="qubit list, or 'none'")
    p = g.add_parser("demo", parents=[common, scheme])
    p.set_defaults(func=cmd_qhe_demo)
    p.add_argument("--gate", default="I")
    p.add_argument("--input", required=True)
    p = g.add_parser("security", parents=[common, scheme])
    p.set_defaults(func=cmd_qhe_security)
    p.add_argument("--x", default=None, help="plaintext (default: worst case)")
    p.add_argument("--y", default=None)
    p.add_argument("--method", choices=["grouped", "enumerate", "sample"], default="grouped")
    p.add_argument("--samples", type=int, default=20000)
    p = g.add_parser("rank-experiment", parents=[common, scheme])
    p.set_defaults(func=cmd_qhe_rank)
    p.add_argument("--withheld-code", help="code with the same number of sent subsystems plus withheld ones")
    p = g.add_parser("qrac", parents=[common, scheme])
    p.set_defaults(func=cmd_qhe_qrac)

    g = groups.add_parser("bounds").add_subparsers(dest="cmd", required=True)
    p = sub(g, "nayak", cmd_bounds_nayak)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p = sub(g, "qfhe", cmd_bounds_qfhe)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p = sub(g, "crossing", cmd_bounds_crossing)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--c-prime", type=float, default=0.9)
    p.add_argument("--family", default="boolean", help="boolean, clifford or linear")
    p.add_argument("--p-min", type=int, default=1)
    p.add_argument("--p-max", type=int, default=30)
    p.add_argument("--csv", action="store_true")
    return parser


def run(argv: Sequence[str] | None = None, stream=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    out = Report(args.machine, stream)
    try:
        if args.tol is None:
            args.tol = e2e_tol_from_env()
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, qla.CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
