"""Heavy- and light-tailed test distributions and seeded i.i.d. fields.

The one heavy-tailed family is parametrized by its two-sided tail

    P(|X - mu| > x) = (x/x0)^(-p) * (log x / log x0)^(-q)   for x >= x0,

and 1 below x0 (so the magnitude support starts at x0, default e). The
(p, q) pair can be placed exactly on either side of every power-log moment
boundary E|X|^r (log+|X|)^s < infinity, which is what the convergence
classifiers need. rademacher, uniform_sym and gaussian are bounded or
light-tailed sanity members, all symmetric about mu.

Field values are a pure function of (seed, k, l): a 64-bit finalizer hash
of the coordinates drives an inverse-transform sampler, so values never
depend on traversal order, block shape or thread count.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc, erfinv, ndtr

from .errors import DomainError, NumericError, RangeError

FAMILIES = ("pareto_log", "rademacher", "uniform_sym", "gaussian")

# Quadrature targets for the partial-moment integrals.
_QUAD_RTOL = 1e-11
_QUAD_LIMIT = 200


@dataclass(frozen=True)
class TailProfile:
    """Distribution of the i.i.d. summands.

    p, q, x0 apply to pareto_log only; mu shifts every family.
    """

    family: str
    p: Optional[float] = None
    q: Optional[float] = None
    mu: float = 0.0
    x0: Optional[float] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")
        if not math.isfinite(self.mu):
            raise DomainError("mu must be finite")
        if self.family == "pareto_log":
            if self.p is None or not (self.p > 0):
                raise DomainError("pareto_log needs a tail exponent p > 0")
            q = 0.0 if self.q is None else self.q
            if q < 0:
                raise DomainError("log exponent q must be >= 0")
            object.__setattr__(self, "q", float(q))
            x0 = math.e if self.x0 is None else float(self.x0)
            if x0 < math.e:
                raise DomainError("support threshold x0 must be >= e")
            object.__setattr__(self, "x0", x0)
            object.__setattr__(self, "p", float(self.p))
        else:
            if self.p is not None or self.q is not None or self.x0 is not None:
                raise DomainError(
                    f"p/q/x0 are pareto_log parameters, not valid for {self.family}"
                )

    def is_symmetric_zero(self) -> bool:
        return self.mu == 0.0


@dataclass(frozen=True)
class FieldSpec:
    """A concrete seeded field: profile + 64-bit seed + inclusive extent."""

    profile: TailProfile
    seed: int
    extent: Tuple[int, int]

    def __post_init__(self):
        m, n = self.extent
        if m < 0 or n < 0:
            raise RangeError(f"extent must be nonnegative, got {self.extent}")
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)


# ---------------------------------------------------------------------------
# counter-based generator

_MASK64 = (1 << 64) - 1
_GOLD = 0x9E3779B97F4A7C15   # 2^64 / golden ratio; coordinate stride
_STRIDE2 = 0xC2B2AE3D27D4EB4F  # second odd stride for the l axis
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64_arr(z):
    # Stafford "mix13" finalizer of splitmix64; wraparound is intended.
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(_MIX1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_MIX2)
        z ^= z >> np.uint64(31)
    return z


def _hash_block(seed: int, ks, ls):
    """uint64 hash grid for coordinate vectors ks x ls."""
    base = _mix64_arr(np.array([seed ^ _GOLD], dtype=np.uint64))[0]
    with np.errstate(over="ignore"):
        ak = _mix64_arr(base + (ks.astype(np.uint64) + np.uint64(1)) * np.uint64(_GOLD))
        grid = ak[:, None] + (ls.astype(np.uint64) + np.uint64(1)) * np.uint64(_STRIDE2)
    return _mix64_arr(grid)


def derive_seed(master: int, *indices) -> int:
    """Deterministic child seed; used for replicate and scenario streams."""
    state = np.array([int(master) & _MASK64], dtype=np.uint64)
    with np.errstate(over="ignore"):
        for idx in indices:
            state = _mix64_arr(state + np.uint64((int(idx) + 1) * _GOLD & _MASK64))
    return int(state[0])


def _uniform_and_sign(bits):
    # top 53 bits -> open-interval uniform, bit 0 -> sign
    u = ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * (2.0 ** -53)
    sign = np.where((bits & np.uint64(1)).astype(bool), 1.0, -1.0)
    return u, sign


def _pareto_log_magnitude(profile: TailProfile, u):
    """Inverse survival of the magnitude: solve S(x) = u for x >= x0."""
    p, q, L0 = profile.p, profile.q, math.log(profile.x0)
    e_target = -np.log(u)  # p*(t - L0) + q*log(t/L0) = e_target, t = log x
    if q == 0.0:
        return np.exp(L0 + e_target / p)
    t_hi = L0 + e_target / p
    t_lo = L0 + e_target / (p + q / L0)
    # two fixed-point steps then clamped Newton; iteration count is fixed so
    # a value is bit-identical whether sampled alone or inside a block
    t = L0 + (e_target - q * np.log1p((t_hi - L0) / L0)) / p
    np.clip(t, t_lo, t_hi, out=t)
    for _ in range(16):
        g = p * (t - L0) + q * np.log(t / L0) - e_target
        t -= g / (p + q / t)
        np.clip(t, t_lo, t_hi, out=t)
    return np.exp(t)


def _magnitude(profile: TailProfile, u):
    fam = profile.family
    if fam == "rademacher":
        return np.ones_like(u)
    if fam == "uniform_sym":
        return u
    if fam == "gaussian":
        return math.sqrt(2.0) * erfinv(u)
    return _pareto_log_magnitude(profile, u)


def sample_block(spec: FieldSpec, k_lo, k_hi, l_lo, l_hi):
    """Values on the inclusive index rectangle [k_lo..k_hi] x [l_lo..l_hi]."""
    m, n = spec.extent
    if not (0 <= k_lo <= k_hi <= m and 0 <= l_lo <= l_hi <= n):
        raise RangeError(
            f"block [{k_lo}..{k_hi}]x[{l_lo}..{l_hi}] outside extent {spec.extent}"
        )
    ks = np.arange(k_lo, k_hi + 1, dtype=np.uint64)
    ls = np.arange(l_lo, l_hi + 1, dtype=np.uint64)
    bits = _hash_block(spec.seed, ks, ls)
    u, sign = _uniform_and_sign(bits)
    return spec.profile.mu + sign * _magnitude(spec.profile, u)


def sample(spec: FieldSpec, k: int, l: int) -> float:
    """The field value at (k, l); pure in (seed, k, l)."""
    return float(sample_block(spec, k, k, l, l)[0, 0])


# ---------------------------------------------------------------------------
# closed-form tail and moment classification


def tail_prob(profile: TailProfile, x):
    """P(|X - mu| > x), exact closed form; accepts scalars or arrays."""
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0):
        raise DomainError("tail_prob needs x >= 0")
    fam = profile.family
    if fam == "rademacher":
        out = np.where(arr < 1.0, 1.0, 0.0)
    elif fam == "uniform_sym":
        out = np.clip(1.0 - arr, 0.0, 1.0)
    elif fam == "gaussian":
        out = erfc(arr / math.sqrt(2.0))
    else:
        p, q, x0 = profile.p, profile.q, profile.x0
        L0 = math.log(x0)
        safe = np.maximum(arr, x0)
        out = (safe / x0) ** (-p) * (np.log(safe) / L0) ** (-q)
        out = np.where(arr < x0, 1.0, out)
    if np.isscalar(x) or arr.ndim == 0:
        return float(out)
    return out


def moment_finite(profile: TailProfile, r: float, s: float = 0.0) -> bool:
    """True iff E|X|^r (log+|X|)^s is finite.

    For pareto_log the boundary p = r is finite only when q > s + 1; the
    edge q = s + 1 diverges (doubly logarithmically) and classifies as
    infinite. The location shift never matters.
    """
    if not r > 0:
        raise DomainError("moment order r must be > 0")
    if s < 0:
        raise DomainError("log exponent s must be >= 0")
    if profile.family != "pareto_log":
        return True
    if profile.p != r:
        return profile.p > r
    return profile.q > s + 1.0


def feller_check(profile: TailProfile) -> bool:
    """True iff n * P(|X| > n) -> 0."""
    if profile.family != "pareto_log":
        return True
    if profile.p != 1.0:
        return profile.p > 1.0
    return profile.q > 0.0


# ---------------------------------------------------------------------------
# truncated first moments


def _tail_integral(profile: TailProfile, x: float) -> float:
    """integral_{x0}^{x} P(|X - mu| > u) du for the pareto_log family."""
    p, q, x0 = profile.p, profile.q, profile.x0
    L0 = math.log(x0)
    top = math.log(x)
    if top <= L0:
        return 0.0

    # substituting u = e^t gives x0^p L0^q * e^((1-p)t) t^(-q) on [L0, log x]
    def integrand(t):
        return math.exp((1.0 - p) * t) * t ** (-q)

    val, err = quad(
        integrand, L0, top, epsabs=0.0, epsrel=_QUAD_RTOL, limit=_QUAD_LIMIT
    )
    if not math.isfinite(val) or (val > 0 and err > 1e-8 * val):
        raise NumericError(
            f"partial tail integral failed on [{L0}, {top}] (err {err})"
        )
    return (x0 ** p) * (L0 ** q) * val


def _abs_partial_mean(profile: TailProfile, x: float) -> float:
    """M(x) = E[|Z| 1{|Z| <= x}] for the centered magnitude Z."""
    fam = profile.family
    if fam == "rademacher":
        return 1.0 if x >= 1.0 else 0.0
    if fam == "uniform_sym":
        c = min(max(x, 0.0), 1.0)
        return c * c / 2.0
    if fam == "gaussian":
        # half-normal partial mean
        return math.sqrt(2.0 / math.pi) * (1.0 - math.exp(-x * x / 2.0))
    x0 = profile.x0
    if x < x0:
        return 0.0
    # integration by parts against the survival function
    return x0 - x * tail_prob(profile, x) + _tail_integral(profile, x)


def _centered_cdf(profile: TailProfile, z: float) -> float:
    """P(Z <= z) for the symmetric centered variable."""
    if profile.family == "gaussian":
        return float(ndtr(z))
    if z >= 0:
        return 1.0 - 0.5 * tail_prob(profile, z)
    return 0.5 * tail_prob(profile, -z)


def truncated_mean_expect(profile: TailProfile, c: float) -> float:
    """E[X 1{|X| <= c}], exact where closed forms exist.

    Symmetric profiles with mu = 0 return exactly 0. The rademacher family
    is enumerated directly to dodge boundary ties in |X| = c.
    """
    if not c > 0:
        raise DomainError("truncation level c must be > 0")
    mu = profile.mu
    if profile.is_symmetric_zero():
        return 0.0
    if profile.family == "rademacher":
        lo, hi = mu - 1.0, mu + 1.0
        out = 0.0
        if abs(lo) <= c:
            out += 0.5 * lo
        if abs(hi) <= c:
            out += 0.5 * hi
        return out
    # |X| <= c  <=>  A <= Z <= B with Z = X - mu
    a, b = -c - mu, c - mu
    prob = _centered_cdf(profile, b) - _centered_cdf(profile, a)
    m_pos = _abs_partial_mean(profile, max(b, 0.0)) - _abs_partial_mean(
        profile, max(a, 0.0)
    )
    m_neg = _abs_partial_mean(profile, max(-a, 0.0)) - _abs_partial_mean(
        profile, max(-b, 0.0)
    )
    return mu * prob + 0.5 * (m_pos - m_neg)


def value_cdf(profile: TailProfile, x):
    """P(X <= x); the distributional test hook."""
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    z = arr - profile.mu
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 - 0.5 * tail_prob(profile, z[pos])
    out[~pos] = 0.5 * tail_prob(profile, -z[~pos])
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return float(out[0])
    return out
