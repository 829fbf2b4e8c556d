"""Univariate lifetime laws on a nonnegative support.

Every law exposes ``cdf``, ``pdf``, ``quantile`` and ``mean`` plus the
reliability functionals built from them (hazard, reversed hazard, mean
inactivity time, partial weighted moments).  Evaluations accept scalars or
arrays; scalars come back as plain floats.

Outside the support the cdf clamps to 0 or 1 so integrals over any enclosing
range are well defined.  A law may carry an atom at ``lo`` (the Type-III
extreme value law does); ``cdf(lo)`` is then the atom's mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple

import numpy as np
from scipy import interpolate, special

from .errors import (
    DivergenceError,
    NotApplicableError,
    ParameterError,
    UndefinedAtPointError,
)
from .quadrature import DEFAULT_CONFIG, IntegrationConfig, integrate

__all__ = [
    "Distribution",
    "IntegralValue",
    "Uniform",
    "Power",
    "TypeIIIExtreme",
    "Pareto",
    "Exponential",
    "FunctionalDistribution",
    "TabulatedDistribution",
    "fmt_number",
]

# below this cdf level the alternating closed forms lose too many digits
_CANCELLATION_TOL = 1e-12  # relative rounding error allowed in closed-form expansions


def fmt_number(x: float) -> str:
    """Shortest round-trip text for a parameter, without a trailing ``.0``."""
    if float(x).is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def _as_output(value):
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


class IntegralValue(NamedTuple):
    value: float
    method: str  # "closed-form" or "quadrature"
    error: float


class Distribution:
    """Base class for a law on ``[lo, hi]`` with ``0 <= lo`` and ``hi`` possibly infinite.

    Subclasses implement ``_cdf``/``_pdf`` for arguments already clipped into
    the support, and may override the ``_closed_*`` hooks with exact formulas.
    """

    lo: float = 0.0
    hi: float = math.inf

    @property
    def descriptor(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.descriptor

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.hi)

    def _cdf(self, x):
        raise NotImplementedError

    def _pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            inner = self._cdf(np.clip(x, self.lo, self.hi))
        out = np.where(x < self.lo, 0.0, np.where(x >= self.hi, 1.0, inner))
        return _as_output(out)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            inner = self._pdf(np.clip(x, self.lo, self.hi))
        out = np.where((x > self.lo) & (x < self.hi), inner, 0.0)
        return _as_output(out)

    def sf(self, x):
        return _as_output(1.0 - np.asarray(self.cdf(x)))

    @property
    def atom(self) -> float:
        """Probability mass sitting exactly at ``lo``."""
        return float(self.cdf(self.lo))

    def quantile(self, p):
        """Right-continuous inverse ``inf{x : F(x) >= p}``."""
        p = _check_prob(p)
        return _as_output(self._quantile(p))

    def _quantile(self, p):
        return _bisect_quantile(self, p)

    @cached_property
    def mean(self) -> float:
        closed = self._closed_mean()
        if closed is not None:
            return closed
        if self.bounded:
            return self.hi - self.integral_of_cdf_power(self.hi, 1).value
        try:
            r = integrate(lambda x: float(self.sf(x)), self.lo, math.inf)
        except DivergenceError:
            return math.inf
        return self.lo + r.value

    def _closed_mean(self):
        return None

    # -- reliability functionals -------------------------------------------

    def reversed_hazard(self, t):
        """``f(t) / F(t)``; undefined where the cdf vanishes."""
        F = np.asarray(self.cdf(t))
        if np.any(F <= 0):
            raise UndefinedAtPointError(f"reversed hazard undefined: F(t)=0 for {self} at t={t}")
        return _as_output(np.asarray(self.pdf(t)) / F)

    def hazard(self, t):
        """``f(t) / (1 - F(t))``; undefined where the survival function vanishes."""
        S = np.asarray(self.sf(t))
        if np.any(S <= 0):
            raise UndefinedAtPointError(f"hazard undefined: survival is 0 for {self} at t={t}")
        return _as_output(np.asarray(self.pdf(t)) / S)

    def mean_inactivity_time(self, t: float, cfg: IntegrationConfig = DEFAULT_CONFIG) -> float:
        """``E[t - X | X <= t] = int_0^t F(x)/F(t) dx``."""
        if self.cdf(t) <= 0:
            raise UndefinedAtPointError(f"mean inactivity time undefined: F({t})=0 for {self}")
        return self.integral_of_cdf_power(t, 1, cfg, normalize=True).value

    def integral_of_cdf_power(
        self,
        t: float,
        k: float,
        cfg: IntegrationConfig = DEFAULT_CONFIG,
        *,
        normalize: bool = False,
        method: str = "auto",
    ) -> IntegralValue:
        """``int_lo^t (F(x)/c)^k dx`` with ``c = F(t)`` if ``normalize`` else 1.

        ``method`` is ``"auto"`` (closed form when available and numerically
        safe), ``"closed-form"`` (formula regardless of cancellation) or
        ``"quadrature"``.
        """
        if method not in ("auto", "closed-form", "quadrature"):
            raise ValueError(f"unknown method {method!r}")
        t = float(t)
        if t <= self.lo:
            return IntegralValue(0.0, "closed-form", 0.0)
        if t == math.inf:
            raise DivergenceError("integral of F^k up to +inf diverges")
        c = float(self.cdf(t)) if normalize else 1.0
        if c <= 0:
            raise UndefinedAtPointError(f"F({t}) = 0 for {self}")
        top = min(t, self.hi)
        tail = (t - top) / c**k  # F = 1 beyond the support
        if method != "quadrature":
            closed = self._closed_power_integral(top, k, strict=(method == "closed-form"))
            if closed is not None:
                return IntegralValue(closed / c**k + tail, "closed-form", 0.0)
            if method == "closed-form":
                raise NotApplicableError(f"no closed form of int F^{k} for {self}")
        r = integrate(lambda x: (float(self.cdf(x)) / c) ** k, self.lo, top, cfg)
        return IntegralValue(r.value + tail, "quadrature", r.error)

    def _closed_power_integral(self, t: float, k: float, strict: bool):
        """Exact ``int_lo^t F^k`` for ``lo <= t <= hi``, or ``None``."""
        return None

    # -- weighted moments ----------------------------------------------------

    def partial_weighted_moment(self, w, t, cfg: IntegrationConfig = DEFAULT_CONFIG):
        """``E[w(X) 1{X <= t}]``, atom at ``lo`` included."""
        t_arr = np.asarray(t, dtype=float)
        if w.power is not None:
            closed = self._closed_partial_moment(w.power, np.clip(t_arr, self.lo, self.hi))
            if closed is not None:
                return _as_output(np.where(t_arr < self.lo, 0.0, closed))
        return _as_output(np.vectorize(lambda s: self._quad_partial_moment(w, s, cfg))(t_arr))

    def _quad_partial_moment(self, w, t, cfg):
        if t < self.lo:
            return 0.0
        base = float(w(self.lo)) * self.atom if self.atom > 0 else 0.0
        top = min(t, self.hi)
        try:
            r = integrate(lambda x: float(w(x)) * float(self.pdf(x)), self.lo, top, cfg)
        except DivergenceError:
            return math.inf
        return base + r.value

    def _closed_partial_moment(self, p: float, t):
        return None

    def weighted_mean(self, w, cfg: IntegrationConfig = DEFAULT_CONFIG) -> float:
        """``mu_w = E[w(X)]``."""
        return float(self.partial_weighted_moment(w, self.hi, cfg))

    def conditional_weighted_mean(self, w, t: float, cfg: IntegrationConfig = DEFAULT_CONFIG) -> float:
        """``E[w(X) | X <= t]``."""
        F = float(self.cdf(t))
        if F <= 0:
            raise UndefinedAtPointError(f"conditional mean undefined: F({t})=0 for {self}")
        m = float(self.partial_weighted_moment(w, t, cfg))
        if not math.isfinite(m):
            raise DivergenceError(f"E[w(X) 1{{X<={t}}}] diverges for {self}")
        return m / F

    def probe_points(self, n: int = 64) -> np.ndarray:
        """``n`` distinct interior points of the support."""
        if self.bounded:
            return np.linspace(self.lo, self.hi, n + 2)[1:-1]
        top = float(self.quantile(0.999))
        return np.linspace(self.lo, top, n + 2)[1:-1]


def _check_prob(p):
    p = np.asarray(p, dtype=float)
    if np.any(~((p >= 0) & (p <= 1))):
        raise ParameterError("probabilities must lie in [0, 1]")
    return p


def _bisect_quantile(dist: Distribution, p, iterations: int = 200):
    p = np.atleast_1d(np.asarray(p, dtype=float))
    lo = np.full_like(p, dist.lo)
    if dist.bounded:
        hi = np.full_like(p, dist.hi)
    else:
        hi = np.full_like(p, dist.lo + 1.0)
        for _ in range(2000):
            short = np.asarray(dist.cdf(hi)) < p
            if not short.any():
                break
            hi = np.where(short, dist.lo + 2.0 * (hi - dist.lo), hi)
    # invariant: F(lo) < p <= F(hi), except at the lower endpoint
    at_lo = np.asarray(dist.cdf(lo)) >= p
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        ok = np.asarray(dist.cdf(mid)) >= p
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid)
    out = np.where(at_lo, dist.lo, hi)
    out = np.where(p >= 1.0, dist.hi, out)
    return out.reshape(np.shape(p)) if out.size > 1 else out[0]


# ---------------------------------------------------------------------------
# analytic families


@dataclass(frozen=True)
class Uniform(Distribution):
    a: float
    b: float

    def __post_init__(self):
        if not (0 <= self.a < self.b < math.inf):
            raise ParameterError(f"uniform needs 0 <= a < b < inf, got ({self.a}, {self.b})")

    @property
    def lo(self):
        return float(self.a)

    @property
    def hi(self):
        return float(self.b)

    @property
    def descriptor(self):
        return f"uniform({fmt_number(self.a)},{fmt_number(self.b)})"

    def _cdf(self, x):
        return (x - self.a) / (self.b - self.a)

    def _pdf(self, x):
        return np.full_like(x, 1.0 / (self.b - self.a))

    def _quantile(self, p):
        return self.a + p * (self.b - self.a)

    def _closed_mean(self):
        return 0.5 * (self.a + self.b)

    def _closed_power_integral(self, t, k, strict):
        return (t - self.a) ** (k + 1) / ((k + 1) * (self.b - self.a) ** k)

    def _closed_partial_moment(self, p, t):
        width = self.b - self.a
        if p == -1:
            if self.a == 0:
                return None
            return np.log(t / self.a) / width
        return (t ** (p + 1) - self.a ** (p + 1)) / ((p + 1) * width)


@dataclass(frozen=True)
class Power(Distribution):
    """``F(x) = x^a`` on ``(0, 1)``."""

    a: float

    def __post_init__(self):
        if not (0 < self.a < math.inf):
            raise ParameterError(f"power family needs a > 0, got {self.a}")

    lo = 0.0
    hi = 1.0

    @property
    def descriptor(self):
        return f"power({fmt_number(self.a)})"

    def _cdf(self, x):
        return x**self.a

    def _pdf(self, x):
        return self.a * x ** (self.a - 1)

    def _quantile(self, p):
        return p ** (1.0 / self.a)

    def _closed_mean(self):
        return self.a / (self.a + 1)

    def _closed_power_integral(self, t, k, strict):
        e = self.a * k + 1
        return t**e / e

    def _closed_partial_moment(self, p, t):
        if p + self.a <= 0:
            return None
        return self.a * t ** (p + self.a) / (p + self.a)


@dataclass(frozen=True)
class TypeIIIExtreme(Distribution):
    """``F(x) = exp(alpha (x - beta))`` restricted to ``[0, beta)``.

    The law keeps the mass ``exp(-alpha beta)`` that the untruncated family
    puts on negative values as an atom at zero, so the cdf formula holds on
    the whole support.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0 < self.alpha < math.inf and 0 < self.beta < math.inf):
            raise ParameterError(f"ev3 needs alpha > 0 and beta > 0, got ({self.alpha}, {self.beta})")

    lo = 0.0

    @property
    def hi(self):
        return float(self.beta)

    @property
    def descriptor(self):
        return f"ev3({fmt_number(self.alpha)},{fmt_number(self.beta)})"

    def _cdf(self, x):
        return np.exp(self.alpha * (x - self.beta))

    def _pdf(self, x):
        return self.alpha * np.exp(self.alpha * (x - self.beta))

    def _quantile(self, p):
        floor = math.exp(-self.alpha * self.beta)
        with np.errstate(divide="ignore"):
            q = self.beta + np.log(p) / self.alpha
        return np.where(p <= floor, 0.0, q)

    def _closed_mean(self):
        return self.beta + math.expm1(-self.alpha * self.beta) / self.alpha

    def _closed_power_integral(self, t, k, strict):
        ka = k * self.alpha
        return math.exp(ka * (t - self.beta)) * -math.expm1(-ka * t) / ka

    def _closed_partial_moment(self, p, t):
        if p == 0:
            return self._cdf(t)
        return None


@dataclass(frozen=True)
class Pareto(Distribution):
    """``F(x) = 1 - (b/x)^a`` on ``(b, inf)``."""

    a: float
    b: float

    def __post_init__(self):
        if not (0 < self.a < math.inf and 0 < self.b < math.inf):
            raise ParameterError(f"pareto needs a > 0 and b > 0, got ({self.a}, {self.b})")

    hi = math.inf

    @property
    def lo(self):
        return float(self.b)

    @property
    def descriptor(self):
        return f"pareto({fmt_number(self.a)},{fmt_number(self.b)})"

    def _cdf(self, x):
        return 1.0 - (self.b / x) ** self.a

    def _pdf(self, x):
        return self.a * self.b**self.a / x ** (self.a + 1)

    def _quantile(self, p):
        with np.errstate(divide="ignore"):
            return self.b * (1.0 - p) ** (-1.0 / self.a)

    def _closed_mean(self):
        return self.a * self.b / (self.a - 1) if self.a > 1 else math.inf

    def _closed_power_integral(self, t, k, strict):
        if not float(k).is_integer() or k < 0:
            return None
        k = int(k)
        if any(j * self.a == 1 for j in range(1, k + 1)):
            return None
        a, b = self.a, self.b
        terms = [math.comb(k, j) * (-1) ** j * b ** (j * a) * (t ** (1 - j * a) - b ** (1 - j * a)) / (1 - j * a)
                 for j in range(k + 1)]
        return _guarded_sum(terms, strict)


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float

    def __post_init__(self):
        if not (0 < self.rate < math.inf):
            raise ParameterError(f"exponential needs rate > 0, got {self.rate}")

    lo = 0.0
    hi = math.inf

    @property
    def descriptor(self):
        return f"exp({fmt_number(self.rate)})"

    def _cdf(self, x):
        return -np.expm1(-self.rate * x)

    def _pdf(self, x):
        return self.rate * np.exp(-self.rate * x)

    def _quantile(self, p):
        with np.errstate(divide="ignore"):
            return -np.log1p(-p) / self.rate

    def _closed_mean(self):
        return 1.0 / self.rate

    def _closed_power_integral(self, t, k, strict):
        if not float(k).is_integer() or k < 0:
            return None
        k = int(k)
        lam = self.rate
        u = lam * t
        if u < 0.5:
            return _one_minus_exp_power_integral(u, k) / lam
        terms = [t] + [math.comb(k, j) * (-1) ** j * -math.expm1(-j * u) / (j * lam) for j in range(1, k + 1)]
        return _guarded_sum(terms, strict)

    def _closed_partial_moment(self, p, t):
        if p <= -1:
            return None
        lam = self.rate
        return special.gamma(p + 1) * special.gammainc(p + 1, lam * t) / lam**p


def _guarded_sum(terms, strict: bool):
    """Sum of an alternating expansion, or ``None`` when rounding could eat the result."""
    total = math.fsum(terms)
    if strict:
        return total
    scale = math.fsum(abs(x) for x in terms)
    if len(terms) * 2.0**-52 * scale > _CANCELLATION_TOL * abs(total):
        return None
    return total


def _one_minus_exp_power_integral(u: float, k: int, terms: int = 60) -> float:
    """``int_0^u (1 - e^{-v})^k dv`` from the power series of the integrand."""
    if k == 0:
        return u
    base = np.zeros(terms)
    fact = 1.0
    for m in range(1, terms):
        fact *= m
        base[m] = (-1) ** (m + 1) / fact
    coef = base.copy()
    for _ in range(k - 1):
        coef = np.convolve(coef, base)[:terms]
    m = np.arange(terms)
    return float(np.sum(coef * u ** (m + 1) / (m + 1)))


# ---------------------------------------------------------------------------
# user-supplied and tabulated laws


class FunctionalDistribution(Distribution):
    """A law given directly by cdf and pdf callables."""

    def __init__(self, cdf: Callable, pdf: Callable, lo: float, hi: float, name: str = "custom",
                 mean: float | None = None):
        if not (0 <= lo < hi):
            raise ParameterError(f"support must satisfy 0 <= lo < hi, got [{lo}, {hi}]")
        self.lo = float(lo)
        self.hi = float(hi)
        self._cdf_fn = cdf
        self._pdf_fn = pdf
        self._name = name
        self._mean = mean

    @property
    def descriptor(self):
        return self._name

    def _cdf(self, x):
        return np.asarray(self._cdf_fn(x), dtype=float)

    def _pdf(self, x):
        return np.asarray(self._pdf_fn(x), dtype=float)

    def _closed_mean(self):
        return self._mean


class TabulatedDistribution(Distribution):
    """Tabulated cdf through ``(grid[i], values[i])``, pinned to 0 at ``lo``.

    Where the cdf is positive it is interpolated by a monotone cubic in
    ``(log(x - lo), log F)``, which is exact for power laws near ``lo``.  Below
    the first positive node a power law through that node is used, with the
    exponent taken from the log-log slope there (linear if that slope is flat).
    """

    def __init__(self, grid, values, lo: float | None = None):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise ParameterError("grid and values must be matching 1-d arrays with >= 2 points")
        if np.any(np.diff(grid) <= 0):
            raise ParameterError("grid must be strictly increasing")
        if np.any(np.diff(values) < -1e-12) or values[0] < 0 or values[-1] > 1 + 1e-12:
            raise ParameterError("tabulated cdf values must be nondecreasing within [0, 1]")
        lo = float(grid[0]) if lo is None else float(lo)
        if lo > grid[0]:
            raise ParameterError("lo must not exceed the first grid point")
        if lo < grid[0]:
            grid = np.concatenate([[lo], grid])
            values = np.concatenate([[0.0], values])
        self.grid = grid
        self.values = np.clip(values, 0.0, 1.0)
        self.lo = lo
        self.hi = float(grid[-1])
        pos = (self.grid > lo) & (self.values > 0)
        first = int(np.argmax(pos))
        self._loglog = None
        if np.all(pos[first:]) and pos.sum() >= 3:
            s_nodes = np.log(self.grid[first:] - lo)
            self._loglog = interpolate.PchipInterpolator(s_nodes, np.log(self.values[first:]))
            self._start = self.grid[first]
            self._start_value = self.values[first]
            # a flat start carries no power-law information; fall back to linear
            self._start_exponent = max(float(self._loglog(s_nodes[0], 1)), 0.0) or 1.0

    @property
    def descriptor(self):
        return f"tabulated({self.grid.size})"

    def _cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self._loglog is None:
            return np.interp(x, self.grid, self.values)
        u = np.clip(x, self._start, self.hi) - self.lo
        out = np.exp(self._loglog(np.log(u)))
        below = x < self._start
        if np.any(below):
            ratio = np.clip((x - self.lo) / (self._start - self.lo), 0.0, 1.0)
            out = np.where(below, self._start_value * ratio**self._start_exponent, out)
        return np.minimum(out, 1.0)

    def _pdf(self, x):
        x = np.asarray(x, dtype=float)
        if self._loglog is None:
            slopes = np.diff(self.values) / np.diff(self.grid)
            idx = np.clip(np.searchsorted(self.grid, x, side="right") - 1, 0, slopes.size - 1)
            return slopes[idx]
        u = np.maximum(np.clip(x, self._start, self.hi) - self.lo, 1e-300)
        s = np.log(u)
        dens = np.exp(self._loglog(s)) * self._loglog(s, 1) / u
        below = x < self._start
        if np.any(below):
            v = np.maximum(x - self.lo, 1e-300)
            low = self._start_exponent * self._cdf(x) / v
            dens = np.where(below, low, dens)
        return dens
