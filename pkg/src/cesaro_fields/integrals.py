"""Integral growth oracles and the sum-vs-integral equivalence check.

Two independent routes decide the same dichotomy: the quadruple
term-probability series (convergence.complete_convergence_sum) and the
one-dimensional tail-moment integral whose finiteness is the matching
moment condition. This module evaluates the integral route, classifies
its growth with the same doubling rule the series uses, and checks that
the two routes agree cell by cell.

It also covers the scale-window integral int_y^{y^{1/g}} x^{-g/(1-g)} dx,
whose growth in y switches branch at g = 1/2; the closed form is exact,
so branch ratios are checked directly.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from scipy.integrate import quad

from . import convergence, fields
from .convergence import classify_moment_case_2d, straddle_profiles
from .errors import DomainError, NumericError
from .fields import TailProfile
from .weights import CesaroOrder

DEFAULT_GAMMA_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)
DEFAULT_UPPERS = (1e2, 1e4, 1e6, 1e8)
RATIO_DRIFT_TOL = 0.02  # |ratio(1e6)/ratio(1e4) - 1| bound

_QUAD_EPSREL = 1e-11
_EXP_GUARD = 700.0  # log-scale overflow guard for the closed form


@dataclass(frozen=True)
class RegimeCase:
    """A scale exponent with its growth branch."""

    gamma: float
    regime: str           # below_half | half | above_half
    asymptotic_form: str  # symbolic tag of the leading growth in y


def regime_case(gamma: float) -> RegimeCase:
    if not (0.0 < gamma < 1.0):
        raise DomainError(f"need gamma in (0, 1), got {gamma}")
    if gamma < 0.5:
        return RegimeCase(gamma, "below_half", "y^((1-2g)/(g(1-g)))")
    if gamma == 0.5:
        return RegimeCase(gamma, "half", "log(y)")
    return RegimeCase(gamma, "above_half", "y^((1-2g)/(1-g))")


def gamma_integral(gamma: float, y: float) -> float:
    """Exact value of int_y^{y^(1/gamma)} x^(-gamma/(1-gamma)) dx."""
    if not (0.0 < gamma < 1.0):
        raise DomainError(f"need gamma in (0, 1), got {gamma}")
    if not y > 1.0:
        raise DomainError(f"need y > 1, got {y}")
    logy = math.log(y)
    if gamma == 0.5:  # exponent -1: logarithmic antiderivative
        return (1.0 / gamma - 1.0) * logy
    c = (1.0 - 2.0 * gamma) / (1.0 - gamma)  # exponent + 1
    hi = c / gamma * logy
    lo = c * logy
    if max(hi, lo) > _EXP_GUARD:
        raise NumericError(f"gamma_integral overflows at gamma={gamma}, y={y}")
    return (math.exp(hi) - math.exp(lo)) / c


def branch_form(gamma: float, y: float) -> float:
    """Leading growth term of the matching branch."""
    case = regime_case(gamma)
    logy = math.log(y)
    if case.regime == "half":
        return logy
    if case.regime == "below_half":
        e = (1.0 - 2.0 * gamma) / (gamma * (1.0 - gamma))
    else:
        e = (1.0 - 2.0 * gamma) / (1.0 - gamma)
    if e * logy > _EXP_GUARD:
        raise NumericError(f"branch form overflows at gamma={gamma}, y={y}")
    return math.exp(e * logy)


def branch_ratio(gamma: float, y: float) -> float:
    return gamma_integral(gamma, y) / branch_form(gamma, y)


def stabilization_report(
    gammas: Sequence[float] = DEFAULT_GAMMA_GRID,
    ys: Sequence[float] = (1e2, 1e4, 1e6),
) -> dict:
    """Branch ratios over a y-grid plus the drift between the last two."""
    cases = []
    all_stable = True
    for g in gammas:
        case = regime_case(g)
        ratios = [branch_ratio(g, y) for y in ys]
        drift = abs(ratios[-1] / ratios[-2] - 1.0)
        stable = drift < RATIO_DRIFT_TOL
        all_stable &= stable
        cases.append(
            {
                "gamma": g,
                "regime": case.regime,
                "asymptotic_form": case.asymptotic_form,
                "y_grid": list(ys),
                "ratios": ratios,
                "drift": drift,
                "stable": stable,
            }
        )
    return {"cases": cases, "all_stable": all_stable}


# ---------------------------------------------------------------------------
# tail-moment integral route


def _integrand_log_scale(profile: TailProfile, r: float, s: float):
    # substitution x = e^t turns x^(r-1) (log+ x)^s P(|X|>x) dx into
    # e^(rt) t^s P(|X|>e^t) dt, slowly varying at the critical power
    def f(t: float) -> float:
        return math.exp(r * t) * t ** s * float(fields.tail_prob(profile, math.exp(t)))

    return f


def moment_integral(
    profile: TailProfile, r: float, s: float, upper: float
) -> float:
    """int_1^upper x^(r-1) (log+ x)^s P(|X|>x) dx by adaptive quadrature."""
    if not upper > 1.0:
        raise DomainError(f"need upper > 1, got {upper}")
    if s < 0:
        raise DomainError("log exponent s must be >= 0")
    f = _integrand_log_scale(profile, r, s)
    t_hi = math.log(upper)
    # the tail switches analytic form at x0 (and gaussian/uniform tails die
    # early); splitting there keeps each quad piece smooth
    knots = [0.0]
    if profile.family == "pareto_log":
        t0 = math.log(profile.x0)
        if 0.0 < t0 < t_hi:
            knots.append(t0)
    knots.append(t_hi)
    total = 0.0
    for lo, hi in zip(knots[:-1], knots[1:]):
        val, err = quad(f, lo, hi, epsabs=0.0, epsrel=_QUAD_EPSREL, limit=300)
        if not math.isfinite(val) or (
            abs(val) > 0 and err > 1e-6 * abs(val) + 1e-300
        ):
            raise NumericError(
                f"quadrature failed on log-scale interval [{lo}, {hi}]"
            )
        total += val
    return total


def integral_growth(
    profile: TailProfile,
    r: float,
    s: float,
    uppers: Sequence[float] = DEFAULT_UPPERS,
) -> Tuple[Tuple[float, ...], str]:
    """Integral values over an upper-limit ladder plus a growth verdict.

    The verdict applies the series doubling rule to the last three values,
    so both routes classify with identical thresholds.
    """
    if len(uppers) < 3:
        raise DomainError("need at least 3 upper limits")
    values = tuple(moment_integral(profile, r, s, u) for u in uppers)
    _, _, cls = convergence._classify_growth(values[-3:])
    return values, cls


# ---------------------------------------------------------------------------
# equivalence of the two routes


@dataclass(frozen=True)
class EquivalenceReport:
    order: CesaroOrder
    profile: TailProfile
    requirement: Tuple[float, float]
    sum_levels: Tuple[int, int, int]
    sum_values: Tuple[float, float, float]
    sum_classification: str
    integral_uppers: Tuple[float, ...]
    integral_values: Tuple[float, ...]
    integral_classification: str

    @property
    def concordant(self) -> Optional[bool]:
        if "inconclusive" in (self.sum_classification,
                              self.integral_classification):
            return None
        return self.sum_classification == self.integral_classification


def equivalence_check(
    profile: TailProfile,
    order: CesaroOrder,
    n_base: int = 128,
    uppers: Sequence[float] = DEFAULT_UPPERS,
) -> EquivalenceReport:
    """Classify one profile by both routes and compare."""
    req = classify_moment_case_2d(order).complete
    sum_res = convergence.complete_convergence_sum(profile, order, n_base)
    ivals, icls = integral_growth(profile, req.r, req.s, uppers)
    return EquivalenceReport(
        order=order,
        profile=profile,
        requirement=(req.r, req.s),
        sum_levels=sum_res.levels,
        sum_values=sum_res.values,
        sum_classification=sum_res.classification,
        integral_uppers=tuple(uppers),
        integral_values=ivals,
        integral_classification=icls,
    )


def equivalence_matrix(
    n_base: int = 128,
    uppers: Sequence[float] = DEFAULT_UPPERS,
) -> dict:
    """The 5 x 2 concordance grid: each order with both straddle profiles."""
    reports = []
    concordant_count = 0
    total = 0
    for a, b in convergence.MATRIX_ORDERS:
        order = CesaroOrder(a, b)
        req = classify_moment_case_2d(order).complete
        finite_prof, infinite_prof = straddle_profiles(req)
        for kind, prof in (("finite", finite_prof),
                           ("infinite", infinite_prof)):
            rep = equivalence_check(prof, order, n_base=n_base, uppers=uppers)
            total += 1
            ok = rep.concordant is True
            concordant_count += int(ok)
            reports.append(
                {
                    "order": [a, b],
                    "kind": kind,
                    "profile": {"family": prof.family, "p": prof.p,
                                "q": prof.q},
                    "requirement": {"r": req.r, "s": req.s},
                    "sum_levels": list(rep.sum_levels),
                    "sum_values": list(rep.sum_values),
                    "sum_classification": rep.sum_classification,
                    "integral_uppers": list(rep.integral_uppers),
                    "integral_values": list(rep.integral_values),
                    "integral_classification": rep.integral_classification,
                    "concordant": rep.concordant,
                }
            )
    discordant = any(c["concordant"] is False for c in reports)
    inconclusive = any(c["concordant"] is None for c in reports)
    return {
        "cases": reports,
        "concordant": concordant_count,
        "total": total,
        "all_concordant": concordant_count == total,
        "discordant": discordant,
        "inconclusive": inconclusive,
    }


def verify_report(
    gammas: Sequence[float] = DEFAULT_GAMMA_GRID,
    n_base: int = 128,
) -> dict:
    """Combined JSON-ready report for the appendix-verify command."""
    branch = stabilization_report(gammas)
    matrix = equivalence_matrix(n_base=n_base)
    return {
        "branch_ratios": branch,
        "equivalence": matrix,
        "ok": bool(branch["all_stable"] and matrix["all_concordant"]),
    }
