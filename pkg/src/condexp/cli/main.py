"""``condexp`` command line: check, dist, expect, pp-expect, gapfn.

Exit codes: 0 success or Certified, 2 budget exhausted, 3 validation failure,
4 parse error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from ..engine import (
    BudgetExhausted,
    SearchExhausted,
    expectation_from_distance,
    interleaved_distance,
    pimsner_popa_expectation,
    spectral_gap_fn_from_kazhdan,
)
from ..exactnum import format_rational
from ..findim import (
    NotRepresentable,
    contraction_witness,
    eval_term,
    infer_adjoint_structure,
)
from ..findim.backend import verify_adjoint_structure
from ..findim.subalgebra import SubalgebraSpec, certify_gap
from ..oracle import ComputablePoint
from ..termalg import adjoint_close, encode, format_term, generators_of
from .problem import MatrixSpec, Problem, ProblemError, load_problem, spectral_gap_function

EXIT_OK = 0
EXIT_BUDGET = 2
EXIT_INVALID = 3
EXIT_PARSE = 4

log = logging.getLogger("condexp")


class Output:
    def __init__(self, stream=None):
        self.stream = stream or sys.stdout

    def __call__(self, line: str = ""):
        print(line, file=self.stream)


def _check_lines(problem: Problem) -> list[tuple[bool, str]]:
    """``(passed, message)`` per presentation precondition, with exact witnesses."""
    out: list[tuple[bool, str]] = []
    alg = problem.algebra(validate=False)
    defect = alg.normalization_defect()
    out.append((not defect, f"trace normalization: sum weight*dim = {format_rational(alg.trace_of_unit())}"))
    gens = problem.m_matrices(alg)
    n_mats = {}
    for i, g in enumerate(problem.n_generators):
        if isinstance(g, MatrixSpec):
            n_mats[i] = problem.matrix(g, alg, f"n_generators[{i}]")
    target_mat = problem.matrix(problem.target, alg, "target") if isinstance(problem.target, MatrixSpec) else None

    def ball(name, x):
        w = contraction_witness(x)
        if w is None:
            out.append((True, f"unit ball: {name}"))
        else:
            block, kind, idx, val = w
            out.append((False, f"unit ball: {name} fails, 1 - a*a has a {kind} {val} at block {block} index {idx}"))

    for i, g in enumerate(gens):
        ball(f"m_generators[{i}] ({problem.m_generators[i].label})", g)
    for i, x in n_mats.items():
        ball(f"n_generators[{i}]", x)
    if target_mat is not None:
        ball("target", target_mat)

    # N-generators as matrices in M, with term references checked
    all_m = list(gens) + list(n_mats.values())
    n_values = []
    refs_ok = True
    for i, g in enumerate(problem.n_generators):
        if i in n_mats:
            n_values.append(n_mats[i])
            continue
        bad = [j for j in generators_of(g) if j >= len(gens)]
        if bad:
            refs_ok = False
            out.append((False, f"n_generators[{i}] uses undefined M-generators {sorted(bad)}"))
        else:
            n_values.append(eval_term(g, all_m))
    if not isinstance(problem.target, MatrixSpec):
        bad = [j for j in generators_of(problem.target) if j >= len(gens)]
        out.append((not bad, "target term references" + (f": undefined M-generators {sorted(bad)}" if bad else " are defined")))
    if refs_ok:
        try:
            if problem.n_adjoint is None:
                adj = infer_adjoint_structure(n_values)
            else:
                adj = adjoint_close(problem.n_adjoint)
                if adj.count != len(n_values):
                    raise ValueError("adjoint declarations do not match the number of N-generators")
                verify_adjoint_structure(n_values, adj)
            out.append((True, f"adjoint closure: involution {list(adj.involution)}"))
        except ValueError as exc:
            out.append((False, f"adjoint closure: {exc}"))
        if not defect and problem.spectral_gap.get("kind", "certified") == "certified":
            cert = certify_gap(SubalgebraSpec(alg, n_values))
            if cert is None:
                out.append((False, "spectral gap: no exact certificate for these N-generators"))
            else:
                out.append((True, f"spectral gap: certified lambda = {format_rational(cert.lam)}, offset {cert.offset()}"))
    return out


def cmd_check(problem: Problem, args, out: Output) -> int:
    lines = _check_lines(problem)
    for ok, msg in lines:
        out(("PASS " if ok else "FAIL ") + msg)
    ok = all(ok for ok, _ in lines)
    out(f"RESULT check {'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_INVALID


def _render_distance(result, out: Output, audit: bool) -> int:
    if audit:
        for line in result.log:
            out(line)
    if isinstance(result, BudgetExhausted):
        out(f"BudgetExhausted: d(b, N) in [{result.lower}, {result.upper}] after {result.queries_spent} queries")
        out(f"RESULT BudgetExhausted lower={result.lower} upper={result.upper} queries={result.queries_spent}")
        return EXIT_BUDGET
    out(f"Certified: d(b, N) = {result.value} within 2^-{result.k} (~{float(result.value):.6g})")
    out(f"RESULT Certified value={result.value} k={result.k} queries={result.queries_spent}")
    return EXIT_OK


def cmd_dist(problem: Problem, args, out: Output) -> int:
    built = problem.build()
    f = spectral_gap_function(problem, built)
    k = problem.resolved_precision(args.precision)
    budget = problem.resolved_budget(args.budget)
    log.info("spectral gap function %s, k=%d, budget=%d", f.label, k, budget)
    result = interleaved_distance(built.pair.oracle, built.target, f, k, budget, parallel=args.parallel)
    return _render_distance(result, out, args.audit)


def _render_term(pair, term, out: Output):
    out(f"term: {format_term(term)}")
    out(f"value: {pair.n_value(term)!r}")
    out(f"RESULT term={format_term(term)} code={encode(term)}")


def cmd_expect(problem: Problem, args, out: Output) -> int:
    built = problem.build()
    pair = built.pair
    k = problem.resolved_precision(args.precision)
    budget = problem.resolved_budget(args.budget)
    if args.exact:
        dist = pair.distance_estimator()
    else:
        f = spectral_gap_function(problem, built)

        def dist(term, l):
            r = interleaved_distance(pair.oracle, term, f, l, budget, parallel=args.parallel)
            if isinstance(r, BudgetExhausted):
                raise SearchExhausted("the distance search did not certify", r.queries_spent)
            return r.value

    try:
        term = expectation_from_distance(pair.oracle, dist, built.target, k, budget)
    except SearchExhausted as exc:
        out(f"BudgetExhausted: {exc}")
        out("RESULT BudgetExhausted")
        return EXIT_BUDGET
    _render_term(pair, term, out)
    return EXIT_OK


def cmd_pp_expect(problem: Problem, args, out: Output) -> int:
    if not problem.pp_basis:
        raise ValueError("pp-expect needs a 'pp_basis' section")
    built = problem.build()
    pair = built.pair
    k = problem.resolved_precision(args.precision)
    budget = problem.resolved_budget(args.budget)
    basis = [ComputablePoint.exact(m) for m, _ in problem.pp_basis]
    exps = [ComputablePoint.exact(e) for _, e in problem.pp_basis]
    try:
        term = pimsner_popa_expectation(pair.oracle, basis, exps, built.target, k, budget)
    except SearchExhausted as exc:
        out(f"BudgetExhausted: {exc}")
        out("RESULT BudgetExhausted")
        return EXIT_BUDGET
    _render_term(pair, term, out)
    return EXIT_OK


def cmd_gapfn(problem: Problem, args, out: Output) -> int:
    built = problem.build()
    if problem.kazhdan is not None:
        f = spectral_gap_fn_from_kazhdan(problem.kazhdan, built.pair.n_adjoint)
    else:
        f = spectral_gap_function(problem, built)
    out(f"spectral gap function: {f.label}")
    for n in range(args.n_max + 1):
        out(f"f({n}) = {f(n)}")
    out("RESULT " + " ".join(str(f(n)) for n in range(args.n_max + 1)))
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "dist": cmd_dist,
    "expect": cmd_expect,
    "pp-expect": cmd_pp_expect,
    "gapfn": cmd_gapfn,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="condexp", description="Distances to and expectations onto presented subalgebras.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0] if fn.__doc__ else None)
        p.add_argument("problem", help="problem file (YAML)")
        p.add_argument("--precision", "-k", type=int, default=None, help="precision exponent k (tolerance 2^-k)")
        p.add_argument("--budget", type=int, default=None, help="step budget (default: file, then $CONDEXP_BUDGET, then 5000)")
        p.add_argument("--audit", action="store_true", help="print the emission log")
        p.add_argument("--exact", action="store_true", help="expect: use the exact distance instead of the search")
        p.add_argument("--parallel", action="store_true", help="run the two machines on separate threads")
        p.add_argument("--n-max", type=int, default=10, help="gapfn: tabulate f(0..n_max)")
        p.add_argument("--verbose", "-v", action="store_true")
    return parser


def main(argv=None, stream=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    out = Output(stream)
    for name in ("precision", "budget", "n_max"):
        v = getattr(args, name)
        if v is not None and v < 0:
            out(f"error: --{name.replace('_', '-')} must be non-negative")
            return EXIT_PARSE
    try:
        problem = load_problem(args.problem)
        return COMMANDS[args.command](problem, args, out)
    except ProblemError as exc:
        out(f"parse error: {exc}")
        return EXIT_PARSE
    except (ValueError, NotRepresentable) as exc:
        out(f"validation error: {exc}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
