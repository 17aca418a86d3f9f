"""Command line: ``reclab symbol``, ``reclab verify`` and ``reclab generators``.

Exit codes: 0 agreement / all checks pass, 1 disagreement or failed check,
2 input detected as invalid, 64 unparsable arguments or element text.
Seed precedence: ``--seed`` flag, then ``REC_LAB_SEED``, then 0.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass

from .errors import ParseError, ReclabError
from .fgl import lt_check_axioms, lt_make
from .formats import element_from_json, element_to_json_obj, element_to_text, parse_element
from .generators import forward_valid_input, generator_system
from .residue import frobenius, selfdual_normal_basis, trace_to_prime
from .symbol import METHODS, compare_all
from .tower import TowerParams, trace_LK

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_USAGE = 0, 1, 2, 64
SEED_ENV = "REC_LAB_SEED"


@dataclass(frozen=True)
class RunConfig:
    p: int = 3
    m: int = 1
    N: int = 8
    D: int | None = None
    seed: int = 0
    trials: int = 20
    output: str = "text"

    def __post_init__(self):
        if self.p not in (3, 5, 7):
            raise ParseError("--p must be 3, 5 or 7")
        if self.m not in (1, 2):
            raise ParseError("--m must be 1 or 2")
        if self.N < 4:
            raise ParseError("-N must be >= 4")
        if self.trials < 1:
            raise ParseError("--trials must be >= 1")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("-N", "--precision", type=int, default=8, dest="N")
    sp.add_argument("--trunc-D", type=int, default=None, dest="D")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--json", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="reclab", description="Hilbert symbol laboratory for unramified p-extensions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sp = sub.add_parser("symbol", help="compute (t, x) by every route")
    _common(sp)
    sp.add_argument("--t", default="P", help="element of L, e.g. P or P^2")
    sp.add_argument("--x", required=True, help="element text (P, u, integers, + - * ^) or JSON")
    sp = sub.add_parser("verify", help="run a verification suite")
    _common(sp)
    sp.add_argument("--suite", choices=("all", "lemmas", "basis", "generators", "symbol", "lubin-tate"), default="all")
    sp = sub.add_parser("generators", help="dump the generator system as JSON")
    _common(sp)
    return parser


def resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParseError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def _config(args) -> RunConfig:
    return RunConfig(args.p, args.m, args.N, args.D, resolve_seed(args.seed), args.trials, "json" if args.json else "text")


def _element(params: TowerParams, text: str):
    text = text.strip()
    if text.startswith("{"):
        try:
            return element_from_json(params, text)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    return parse_element(params, text)


def _emit(cfg: RunConfig, obj: dict, text_lines: list[str]) -> None:
    if cfg.output == "json":
        print(json.dumps(obj, sort_keys=True, indent=2))
    else:
        print("\n".join(text_lines))


# -- symbol ---------------------------------------------------------------------


def cmd_symbol(cfg: RunConfig, t_expr: str, x_expr: str) -> int:
    params = TowerParams(cfg.p, cfg.m, cfg.N)
    t = _element(params, t_expr)
    x = _element(params, x_expr)
    if t.is_zero():
        raise ParseError("t must be non-zero")
    report = compare_all(params, x, t=t)
    lines = [f"(t, x) with t = {element_to_text(t)}, x = {element_to_text(x)}  [p={cfg.p} m={cfg.m} N={cfg.N}]"]
    for m in METHODS:
        o = report.outcomes[m]
        if o.result is not None:
            lines.append(f"  {m:<15} gamma = {o.result.gamma}  stable = {o.result.stable}")
        else:
            lines.append(f"  {m:<15} {'rejected' if o.rejected else 'error'}: {o.error}")
    lines.append(f"verdict: {report.verdict}")
    _emit(cfg, report.to_json_obj(), lines)
    return report.exit_code


# -- verify -----------------------------------------------------------------------


def _suite_lemmas(cfg: RunConfig) -> list[tuple[str, bool, str]]:
    params = TowerParams(cfg.p, 1, cfg.N)
    p = params.p
    Pi = params.pi()
    fprime = params.zero()
    for k in range(1, p):
        fprime = fprime + Pi ** (k - 1) * (k * params.f[k])
    rows = []
    for i in range(p - 1):
        tr = trace_LK(Pi**i / fprime)
        want = 0 if i <= p - 3 else 1
        rows.append((f"Tr(Pi^{i}/f'(Pi)) = {want}", tr.value % p**tr.precision == want, str(tr)))
    lhs = Pi * Pi * fprime * params.eta()
    rows.append(("Pi^2 f'(Pi) eta = p Pi", lhs == Pi * p, element_to_text(lhs)))
    rows.append(("Tr(eta) = -1", trace_LK(params.eta()).centered() == -1, str(trace_LK(params.eta()).centered())))
    return rows


def _suite_basis(cfg: RunConfig) -> list[tuple[str, bool, str]]:
    field, tau = selfdual_normal_basis(cfg.p)
    conj = [tau]
    for _ in range(cfg.p - 1):
        conj.append(frobenius(conj[-1]))
    rows = []
    for k in range(cfg.p):
        for j in range(k, cfg.p):
            tr = trace_to_prime(conj[k] * conj[j])
            rows.append((f"Tr(tau^(p^{k}+p^{j})) = {int(k == j)}", tr == int(k == j), str(tr)))
    rows.append(("Tr(tau) = 1", trace_to_prime(tau) == 1, str(trace_to_prime(tau))))
    return rows


def _suite_generators(cfg: RunConfig) -> list[tuple[str, bool, str]]:
    gens = generator_system(TowerParams(cfg.p, cfg.m, cfg.N))
    return [(name, ok, "") for name, ok in gens.checks]


def _suite_symbol(cfg: RunConfig) -> list[tuple[str, bool, str]]:
    params = TowerParams(cfg.p, cfg.m, cfg.N)
    gens = generator_system(params)
    rng = random.Random(cfg.seed)
    agree = stable = built = 0
    for _ in range(cfg.trials):
        vi = forward_valid_input(params, gens, rng)
        report = compare_all(params, vi.x)
        agree += report.verdict == "agree"
        stable += report.stable
        built += report.gammas.get("direct") == vi.gamma
    n = cfg.trials
    return [
        ("all routes agree", agree == n, f"{agree}/{n}"),
        ("direct = constructed gamma", built == n, f"{built}/{n}"),
        ("stable at N and N+2", stable == n, f"{stable}/{n}"),
    ]


def _suite_lubin_tate(cfg: RunConfig) -> list[tuple[str, bool, str]]:
    q = cfg.p
    D = cfg.D if cfg.D is not None else 2 * q * q
    rows = []
    law = lt_make(cfg.p, q, D, cfg.N)
    law2 = lt_make(cfg.p, q, 2 * D, cfg.N)
    for name, ok, deg in lt_check_axioms(law).rows():
        rows.append((f"{name} (D={D})", ok, f"first failure >= {deg}"))
    same = (law2.F[:D, :D] * (sum_mask(D))).tolist() == (law.F * sum_mask(D)).tolist()
    rows.append((f"F at D={D} equals F at D={2 * D} truncated", same, ""))
    return rows


def sum_mask(D: int):
    import numpy as np

    return (np.add.outer(np.arange(D), np.arange(D)) < D).astype(int)


SUITES = {
    "lemmas": _suite_lemmas,
    "basis": _suite_basis,
    "generators": _suite_generators,
    "symbol": _suite_symbol,
    "lubin-tate": _suite_lubin_tate,
}


def cmd_verify(cfg: RunConfig, suite: str) -> int:
    names = list(SUITES) if suite == "all" else [suite]
    table = []
    for name in names:
        for label, ok, detail in SUITES[name](cfg):
            table.append({"suite": name, "check": label, "pass": bool(ok), "detail": detail})
    width = max(len(r["check"]) for r in table)
    lines = [f"{'PASS' if r['pass'] else 'FAIL'}  {r['suite']:<11} {r['check']:<{width}}  {r['detail']}".rstrip() for r in table]
    passed = sum(r["pass"] for r in table)
    lines.append(f"{passed}/{len(table)} checks passed")
    _emit(cfg, {"config": cfg.__dict__, "suite": suite, "rows": table, "ok": passed == len(table)}, lines)
    return EXIT_OK if passed == len(table) else EXIT_FAIL


# -- generators ---------------------------------------------------------------------


def cmd_generators(cfg: RunConfig) -> int:
    params = TowerParams(cfg.p, cfg.m, cfg.N)
    gens = generator_system(params)
    checks = {name: "PASS" if ok else "FAIL" for name, ok in gens.checks}
    dump = {
        "params": {"p": cfg.p, "m": cfg.m, "N": cfg.N, "residue_modulus": list(params.g)},
        "chi": element_to_json_obj(gens.chi),
        "xi": element_to_json_obj(gens.xi),
        "omega": element_to_json_obj(gens.omega),
        "thetas": [element_to_json_obj(t) for t in gens.thetas],
        "big_omega": element_to_json_obj(gens.big_omega),
        "lambda_big_omega": element_to_json_obj(gens.lambda_omega_big),
        "checks": checks,
        "relation_residual": 0 if checks["relation residual = 0"] == "PASS" else 1,
        "lambda_Omega_congruence": checks["lambda Omega = -p Pi mod p Pi^2"],
    }
    print(json.dumps(dump, sort_keys=True, indent=2))
    return EXIT_OK if gens.ok else EXIT_FAIL


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "symbol":
            return cmd_symbol(cfg, args.t, args.x)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite)
        return cmd_generators(cfg)
    except ParseError as exc:
        print(f"reclab: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ReclabError as exc:
        print(f"reclab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
