"""The symbol (Pi, x) = [gamma](zeta) for x in [p]F(m_M), computed four ways.

* ``direct``: divide x by [p] in M and read (1 + sigma y)/(1 + y) = eta^gamma.
* ``artin_hasse``: gamma = Tr_{L/Q_p}(Pi^-1 eta lambda(x)) / p.
* ``trace_equation``: the same trace divided by Tr(Pi^-1 eta lambda(Omega)).
* ``borevich``: gamma = p * sum(c_j) / p^m from the generator expansion of y.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .errors import (
    DenominatorDegenerate,
    NoRootInM,
    NoSolution,
    NotDivisible,
    NotInBaseField,
    NotInMaximalIdeal,
    NotTorsion,
    ReclabError,
)
from .fgl import f_log
from .generators import decompose, gamma_from_decomposition, generator_system
from .padic import PAdicScalar, div_exact_p as padic_div_exact_p, is_exhausted, val_p
from .residue import solve_frobenius_affine
from .tower import TowerElement, TowerParams, apply_sigma, div_exact_p, div_exact_pi, pi_val, trace_LK

METHODS = ("direct", "artin_hasse", "trace_equation", "borevich")


@dataclass(frozen=True)
class SymbolResult:
    gamma: int
    method: str
    precision_used: int
    stable: bool

    def __post_init__(self):
        if self.method not in METHODS and self.method != "general":
            raise ValueError(f"unknown method {self.method!r}")

    def to_json_obj(self) -> dict:
        return {"gamma": self.gamma, "method": self.method, "precision_used": self.precision_used, "stable": self.stable}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SymbolResult":
        obj = json.loads(text)
        return cls(int(obj["gamma"]), str(obj["method"]), int(obj["precision_used"]), bool(obj["stable"]))


@lru_cache(maxsize=None)
def _tower(p: int, m: int, N: int, g: tuple) -> TowerParams:
    return TowerParams(p, m, N, residue_modulus=g)


def raised(params: TowerParams, extra: int = 2) -> TowerParams:
    """The same tower at precision N + extra."""
    return _tower(params.p, params.m, params.N + extra, params.g)


def lift_to(x: TowerElement, params: TowerParams) -> TowerElement:
    """Read x's integer representatives in another tower with the same p, m, g."""
    if (x.params.p, x.params.m, x.params.g) != (params.p, params.m, params.g):
        raise ValueError("towers differ in more than precision")
    prec = x.precision + (params.N - x.params.N)
    return params.element(x.coeffs, x.pi_shift, max(0, prec))


def _require_base(x: TowerElement) -> None:
    if not x.u_part_is_zero():
        raise NotInBaseField("x must lie in L (zero u-part)")


def divide_isogeny(params: TowerParams, x: TowerElement) -> TowerElement:
    """y in m_M with (1+y)^p = 1+x.

    Defect 1+D = (1+x)/(1+y)^p at valuation k:
    * k < p has no root in an unramified extension;
    * k = p needs c^p + alpha c = beta on residues (alpha the residue of p/Pi^(p-1));
    * k > p is fixed by 1 + D/p, which at least doubles k - (p - 1).
    The approximation is re-read at one guard digit each pass, so the
    division by p costs nothing; y is good to one digit less than x.
    """
    _require_base(x)
    p = params.p
    x = x.integral()
    v = pi_val(x)
    if is_exhausted(v):
        return params.zero(max(0, x.precision - 1))
    if v < 1:
        raise NotInMaximalIdeal("x must lie in the maximal ideal")
    if v < p:
        raise NoRootInM(f"v(x) = {v} < p: the p-th root generates a ramified extension")
    work = min(x.precision + 1, params.capacity)
    one_x = (1 + x).with_precision(work)
    alpha = params.residue(params.eps_inverse(work))
    y = params.zero(work)
    for _ in range(4 * params.e * work + 8):
        D = one_x * ((1 + y) ** p).inverse() - 1
        if D.is_zero():
            break
        k = pi_val(D)
        if k < p:
            raise NoRootInM(f"defect of valuation {k} < p")
        if k == p:
            beta = params.residue(div_exact_pi(D.integral(), p))
            try:
                c = solve_frobenius_affine(alpha, beta)
            except NoSolution as exc:
                raise NoRootInM("Artin-Schreier digit equation has no solution in M") from exc
            step = params.from_residue(c, work).shift(1).integral()
        else:
            step = div_exact_p(D.integral(), 1)
        y = ((1 + y) * (1 + step) - 1).with_precision(work)
    else:
        raise NoRootInM("digit lifting did not terminate")
    return y.reduce(x.precision - 1)


def _torsion_exponent(params: TowerParams, u: TowerElement) -> int:
    eta = params.eta(u.precision)
    power = params.one(u.precision)
    for j in range(params.p):
        if (u - power).is_zero():
            return j
        power = power * eta
    raise NotTorsion("(1 + sigma y)/(1 + y) is not a power of eta at precision")


def _direct(params: TowerParams, x: TowerElement) -> tuple[int, int]:
    y = divide_isogeny(params, x)
    u = (1 + apply_sigma(y, 1)) * (1 + y).inverse()
    return _torsion_exponent(params, u), y.precision


def _pi_inv_eta_log_trace(params: TowerParams, a: TowerElement) -> PAdicScalar:
    return trace_LK(f_log(a).shift(-1) * params.eta())


def _artin_hasse(params: TowerParams, x: TowerElement) -> tuple[int, int]:
    _require_base(x)
    t = _pi_inv_eta_log_trace(params, x)
    g = padic_div_exact_p(t, 1)
    return g.value % params.p, g.precision


def _trace_equation(params: TowerParams, x: TowerElement) -> tuple[int, int]:
    _require_base(x)
    gens = generator_system(params)
    den = _pi_inv_eta_log_trace(params, gens.big_omega)
    vden = val_p(den)
    if is_exhausted(vden) or vden != 1:
        raise DenominatorDegenerate(f"v_p(Tr(Pi^-1 eta lambda Omega)) = {vden}, expected 1")
    num = _pi_inv_eta_log_trace(params, x)
    if num.value % params.p:
        raise NotDivisible("Tr(Pi^-1 eta lambda x) is not divisible by p")
    p = params.p
    g = (num.value // p) * pow(den.value // p, -1, p) % p
    return g, min(num.precision, den.precision) - 1


def _borevich(params: TowerParams, x: TowerElement) -> tuple[int, int]:
    gens = generator_system(params)
    y = divide_isogeny(params, x)
    dec = decompose(params, gens, y)
    return gamma_from_decomposition(dec, params).value, dec.precision


_ROUTES: dict[str, Callable[[TowerParams, TowerElement], tuple[int, int]]] = {
    "direct": _direct,
    "artin_hasse": _artin_hasse,
    "trace_equation": _trace_equation,
    "borevich": _borevich,
}


def _run(method: str, params: TowerParams, x: TowerElement, check_stability: bool) -> SymbolResult:
    route = _ROUTES[method]
    g, prec = route(params, x)
    stable = True
    if check_stability:
        hi = raised(params)
        try:
            g2, _ = route(hi, lift_to(x, hi))
            stable = g2 == g
        except ReclabError:
            stable = False
    return SymbolResult(gamma=int(g), method=method, precision_used=params.N, stable=stable)


def gamma_direct(params: TowerParams, x: TowerElement, check_stability: bool = True) -> SymbolResult:
    """gamma from the definition: sigma(y) -_F y = [gamma](zeta).  The oracle."""
    return _run("direct", params, x, check_stability)


def gamma_artin_hasse(params: TowerParams, x: TowerElement, check_stability: bool = True) -> SymbolResult:
    """gamma = Tr(Pi^-1 eta lambda(x)) / p mod p; NotDivisible if the trace is not in p Z_p."""
    return _run("artin_hasse", params, x, check_stability)


def gamma_trace_equation(params: TowerParams, x: TowerElement, check_stability: bool = True) -> SymbolResult:
    return _run("trace_equation", params, x, check_stability)


def gamma_borevich(params: TowerParams, x: TowerElement, check_stability: bool = True) -> SymbolResult:
    return _run("borevich", params, x, check_stability)


def gamma_general(params: TowerParams, t: TowerElement, x: TowerElement, check_stability: bool = True) -> SymbolResult:
    """(t, x) = [v(t) * gamma(Pi, x)](zeta): sigma_t is sigma^v(t) and zeta is sigma-fixed."""
    if t.is_zero():
        raise ValueError("t must be non-zero")
    k = pi_val(t)
    base = gamma_direct(params, x, check_stability)
    return SymbolResult(gamma=k * base.gamma % params.p, method="general", precision_used=base.precision_used, stable=base.stable)


# -- cross-validation -----------------------------------------------------------

#: Errors by which a route declares the input outside [p]F(m_M) n F(m_L).
REJECTIONS = {
    "direct": (NoRootInM, NotInBaseField, NotInMaximalIdeal),
    "artin_hasse": (NotDivisible, NotInBaseField, NotInMaximalIdeal),
    "trace_equation": (NotDivisible, NotInBaseField, NotInMaximalIdeal),
    "borevich": (NoRootInM, NotInBaseField, NotInMaximalIdeal),
}


@dataclass
class RouteOutcome:
    method: str
    result: SymbolResult | None = None
    error: str | None = None
    rejected: bool = False

    def to_json_obj(self) -> dict:
        obj: dict = {"method": self.method, "rejected": self.rejected}
        if self.result is not None:
            obj["result"] = self.result.to_json_obj()
        if self.error is not None:
            obj["error"] = self.error
        return obj


@dataclass
class CompareReport:
    """Verdicts: ``agree``, ``disagree``, ``invalid_consistent``, ``invalid_inconsistent``.

    The input counts as invalid when the direct route rejects it.  It is
    rejected *consistently* when the Artin-Hasse route rejects it as well.
    """

    outcomes: dict[str, RouteOutcome] = field(default_factory=dict)
    verdict: str = ""
    multiplier: int = 1  # v(t) for a symbol (t, x)

    @property
    def gammas(self) -> dict[str, int]:
        return {k: o.result.gamma for k, o in self.outcomes.items() if o.result is not None}

    @property
    def stable(self) -> bool:
        return all(o.result.stable for o in self.outcomes.values() if o.result is not None)

    @property
    def exit_code(self) -> int:
        if self.verdict == "agree":
            return 0
        if self.verdict.startswith("invalid"):
            return 2
        return 1

    def to_json_obj(self) -> dict:
        return {
            "verdict": self.verdict,
            "multiplier": self.multiplier,
            "stable": self.stable,
            "routes": [self.outcomes[m].to_json_obj() for m in METHODS if m in self.outcomes],
        }


def compare_all(params: TowerParams, x: TowerElement, t: TowerElement | None = None, check_stability: bool = True) -> CompareReport:
    """Run every route on (t, x) (t = Pi by default) and classify the outcome."""
    report = CompareReport()
    if t is not None:
        if t.is_zero():
            raise ValueError("t must be non-zero")
        report.multiplier = pi_val(t)
    for method in METHODS:
        out = RouteOutcome(method)
        try:
            res = _run(method, params, x, check_stability)
            k = report.multiplier
            out.result = SymbolResult(res.gamma * k % params.p, method, res.precision_used, res.stable)
        except REJECTIONS[method] as exc:
            out.rejected = True
            out.error = f"{type(exc).__name__}: {exc}"
        except ReclabError as exc:
            out.error = f"{type(exc).__name__}: {exc}"
        report.outcomes[method] = out
    direct = report.outcomes["direct"]
    if direct.rejected:
        report.verdict = "invalid_consistent" if report.outcomes["artin_hasse"].rejected else "invalid_inconsistent"
    elif all(o.result is not None for o in report.outcomes.values()) and len(set(report.gammas.values())) == 1:
        report.verdict = "agree"
    else:
        report.verdict = "disagree"
    return report
