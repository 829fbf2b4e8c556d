"""Failure extropy and its dynamic, weighted, bivariate and conditional forms.

All measures integrate powers of the cdf:

* failure extropy            ``-1/2 int_0^sup F(x)^2 dx``
* dynamic failure extropy    ``-1/2 int_0^t (F(x)/F(t))^2 dx``
* weighted versions          the same functionals applied to the weighted law
* bivariate versions         ``1/4 int int K(x, y)^2 dx dy`` (positive)

Closed forms are used for the analytic families and anything built from them
by affine maps or powers of the cdf; everything else goes through adaptive
quadrature.  Unbounded supports make the non-dynamic measures ``-inf``
without integrating.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .distributions import Distribution, TabulatedDistribution
from .errors import (
    DivergenceError,
    InconsistentCurveError,
    NotApplicableError,
    OrderViolationError,
    SingularityError,
    UndefinedAtPointError,
)
from .quadrature import DEFAULT_CONFIG, IntegrationConfig, integrate, integrate2d
from .transforms import BivariateDistribution, MonotoneTransform, WeightFunction, weighted

__all__ = [
    "ExtropyValue",
    "DfeCurve",
    "extropy",
    "failure_extropy",
    "failure_extropy_bounds",
    "dynamic_failure_extropy",
    "dfe_bounds",
    "weighted_failure_extropy",
    "weighted_dfe",
    "weighted_dfe_lower_bound",
    "reversed_hazard_upper_bound",
    "transformed_failure_extropy",
    "bivariate_failure_extropy",
    "conditional_failure_extropy",
    "bivariate_dfe",
    "dfe_derivative",
    "dfe_ode_residual",
    "is_ddfe",
    "is_dwdfe",
    "dfe_grid",
    "dfe_curve",
    "recover_cdf_from_dfe",
    "reversed_hazard_from_dfe",
    "mean_decomposition_check",
]


@dataclass(frozen=True)
class ExtropyValue:
    """A measured value with how it was obtained.

    ``method`` is ``"closed-form"`` or ``"quadrature"``; ``err_estimate`` is the
    absolute error bound reported by the integrator (0 for closed forms).
    """

    value: float
    method: str
    err_estimate: float = 0.0

    def __float__(self):
        return float(self.value)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)


def extropy(dist: Distribution, cfg: IntegrationConfig = DEFAULT_CONFIG) -> ExtropyValue:
    """Density extropy ``-1/2 int f^2``, by quadrature only (reference value)."""
    r = integrate(lambda x: float(dist.pdf(x)) ** 2, dist.lo, dist.hi, cfg)
    return ExtropyValue(-0.5 * r.value, "quadrature", 0.5 * r.error)


def failure_extropy(dist: Distribution, cfg: IntegrationConfig = DEFAULT_CONFIG,
                    method: str = "auto") -> ExtropyValue:
    if not dist.bounded:
        return ExtropyValue(-math.inf, "closed-form")
    r = dist.integral_of_cdf_power(dist.hi, 2, cfg, method=method)
    return ExtropyValue(-0.5 * r.value, r.method, 0.5 * r.error)


def failure_extropy_bounds(dist: Distribution, cfg: IntegrationConfig = DEFAULT_CONFIG):
    """``(-(u - EX)/2, -(u - EX)^2/(2u))`` for support ``[0, u]``."""
    if not dist.bounded:
        raise NotApplicableError(f"failure extropy bounds need a bounded support; {dist} is unbounded")
    u = dist.hi
    gap = u - dist.mean
    return -0.5 * gap, -gap * gap / (2.0 * u)


def dynamic_failure_extropy(dist: Distribution, t: float, cfg: IntegrationConfig = DEFAULT_CONFIG,
                            method: str = "auto") -> ExtropyValue:
    t = float(t)
    if t == dist.lo:
        return ExtropyValue(0.0, "closed-form")
    if t == math.inf:
        return failure_extropy(dist, cfg, method)
    if t < dist.lo or dist.cdf(t) <= 0:
        raise UndefinedAtPointError(f"dynamic failure extropy undefined: F({t}) = 0 for {dist}")
    r = dist.integral_of_cdf_power(t, 2, cfg, normalize=True, method=method)
    return ExtropyValue(-0.5 * r.value, r.method, 0.5 * r.error)


def dfe_bounds(dist: Distribution, t: float, cfg: IntegrationConfig = DEFAULT_CONFIG,
               sharp_lower: bool = False):
    """Bracket ``(-int_0^t F / (2 F(t)^2), -m_I(t)^2 / (2t))`` around the dynamic measure.

    ``sharp_lower`` replaces the lower end by ``-m_I(t)/2``, which is tighter
    because ``F(t) <= 1`` and vanishes as ``t`` approaches the support's start.
    """
    F = float(dist.cdf(t))
    if F <= 0:
        raise UndefinedAtPointError(f"F({t}) = 0 for {dist}")
    area = dist.integral_of_cdf_power(t, 1, cfg).value
    mit = area / F
    lower = -0.5 * mit if sharp_lower else -area / (2.0 * F * F)
    return lower, -mit * mit / (2.0 * t)


def weighted_failure_extropy(dist: Distribution, w: WeightFunction,
                             cfg: IntegrationConfig = DEFAULT_CONFIG) -> ExtropyValue:
    return failure_extropy(weighted(dist, w, cfg), cfg)


def weighted_dfe(dist: Distribution, w: WeightFunction, t: float,
                 cfg: IntegrationConfig = DEFAULT_CONFIG) -> ExtropyValue:
    return dynamic_failure_extropy(weighted(dist, w, cfg), t, cfg)


def weighted_dfe_lower_bound(dist: Distribution, w: WeightFunction, t: float,
                             cfg: IntegrationConfig = DEFAULT_CONFIG) -> float:
    """``-1/(4 r_w(t))``; bounds the weighted dynamic measure from below when it decreases."""
    rate = float(weighted(dist, w, cfg).reversed_hazard(t))
    if rate <= 0:
        raise UndefinedAtPointError(f"weighted reversed hazard vanishes at t={t}")
    return -1.0 / (4.0 * rate)


def reversed_hazard_upper_bound(dist: Distribution, t: float,
                                cfg: IntegrationConfig = DEFAULT_CONFIG) -> float:
    """``-1/(4 E(t))``, an upper bound on ``r(t)`` for laws with decreasing dynamic measure."""
    e = dynamic_failure_extropy(dist, t, cfg).value
    if e == 0:
        raise UndefinedAtPointError(f"dynamic failure extropy vanishes at t={t}")
    return -1.0 / (4.0 * e)


def transformed_failure_extropy(y: MonotoneTransform, t: float | None = None,
                                cfg: IntegrationConfig = DEFAULT_CONFIG) -> ExtropyValue:
    """Failure extropy of ``psi(X)`` by change of variables back to ``X``.

    Increasing ``psi``: ``-1/2 int psi'(x) F(x)^2 dx``.  Decreasing ``psi``
    uses the survival function, since then ``P(psi(X) <= y) = 1 - F(psi^-1(y))``.
    With ``t`` the dynamic measure is returned.
    """
    x = y.base
    if t is None:
        if not y.bounded:
            return ExtropyValue(-math.inf, "closed-form")
        a, b, norm = x.lo, x.hi, 1.0
    else:
        if float(y.cdf(t)) <= 0:
            raise UndefinedAtPointError(f"F({t}) = 0 for {y}")
        if t <= y.lo:
            return ExtropyValue(0.0, "closed-form")
        s = float(y.psi_inv(min(t, y.hi)))
        norm = float(y.cdf(t))
        a, b = (x.lo, s) if y.increasing else (s, x.hi)

    if y.increasing:
        def integrand(u):
            return float(y.dpsi(u)) * (float(x.cdf(u)) / norm) ** 2
    else:
        def integrand(u):
            return abs(float(y.dpsi(u))) * ((1.0 - float(x.cdf(u))) / norm) ** 2

    r = integrate(integrand, a, b, cfg)
    tail = 0.0 if t is None or t <= y.hi else (t - y.hi) / norm**2
    return ExtropyValue(-0.5 * (r.value + tail), "quadrature", 0.5 * r.error)


# ---------------------------------------------------------------------------
# bivariate and conditional


def bivariate_failure_extropy(joint: BivariateDistribution, cfg: IntegrationConfig = DEFAULT_CONFIG,
                              method: str = "auto") -> float:
    """``1/4 int int K(x, y)^2``; factorises into the marginal product when independent."""
    X, Y = joint.x, joint.y
    if not (X.bounded and Y.bounded):
        raise DivergenceError("bivariate failure extropy diverges on an unbounded support")
    if joint.independent and method == "auto":
        return failure_extropy(X, cfg).value * failure_extropy(Y, cfg).value
    r = integrate2d(lambda a, b: joint.cdf(a, b) ** 2, (X.lo, X.hi), (Y.lo, Y.hi), cfg)
    return 0.25 * r.value


def conditional_failure_extropy(joint: BivariateDistribution, y: float,
                                cfg: IntegrationConfig = DEFAULT_CONFIG,
                                method: str = "auto") -> ExtropyValue:
    """Failure extropy of the cdf ``K(x, y)/G(y)``."""
    G = float(joint.y.cdf(y))
    if G <= 0:
        raise UndefinedAtPointError(f"G({y}) = 0, conditional law undefined")
    X = joint.x
    if not X.bounded:
        return ExtropyValue(-math.inf, "closed-form")
    if joint.independent and method == "auto":
        return failure_extropy(X, cfg)
    r = integrate(lambda a: joint.conditional_cdf(a, y) ** 2, X.lo, X.hi, cfg)
    return ExtropyValue(-0.5 * r.value, "quadrature", 0.5 * r.error)


def bivariate_dfe(joint: BivariateDistribution, t1: float, t2: float,
                  cfg: IntegrationConfig = DEFAULT_CONFIG, method: str = "auto") -> float:
    """``1/4 int_0^t1 int_0^t2 (K(x1, x2)/K(t1, t2))^2``."""
    X, Y = joint.x, joint.y
    if t1 == X.lo or t2 == Y.lo:
        return 0.0
    Kt = joint.cdf(t1, t2)
    if Kt <= 0:
        raise UndefinedAtPointError(f"K({t1}, {t2}) = 0, bivariate dynamic measure undefined")
    if joint.independent and method == "auto":
        return (dynamic_failure_extropy(X, t1, cfg).value
                * dynamic_failure_extropy(Y, t2, cfg).value)
    r = integrate2d(lambda a, b: (joint.cdf(a, b) / Kt) ** 2, (X.lo, t1), (Y.lo, t2), cfg)
    return 0.25 * r.value


# ---------------------------------------------------------------------------
# derivative identities and classes


def dfe_derivative(dist: Distribution, t: float, cfg: IntegrationConfig = DEFAULT_CONFIG) -> float:
    """Central difference of the dynamic measure, Richardson-extrapolated once."""
    h = max(1e-5, 1e-5 * abs(t))
    h = min(h, 0.25 * (t - dist.lo))
    if h <= 0:
        raise UndefinedAtPointError(f"t={t} is not interior to the support of {dist}")

    def central(step):
        up = dynamic_failure_extropy(dist, t + step, cfg).value
        down = dynamic_failure_extropy(dist, t - step, cfg).value
        return (up - down) / (2.0 * step)

    return (4.0 * central(h / 2) - central(h)) / 3.0


def dfe_ode_residual(dist: Distribution, t: float, cfg: IntegrationConfig = DEFAULT_CONFIG) -> float:
    """``E'(t) + 2 r(t) E(t) + 1/2``, zero for every absolutely continuous law."""
    e = dynamic_failure_extropy(dist, t, cfg).value
    return dfe_derivative(dist, t, cfg) + 2.0 * float(dist.reversed_hazard(t)) * e + 0.5


def is_ddfe(dist: Distribution, grid=None, cfg: IntegrationConfig = DEFAULT_CONFIG,
            tol: float = 1e-9) -> bool:
    """Whether the dynamic measure decreases on ``grid`` (default: :func:`dfe_grid`).

    Uses the ODE form ``E'(t) = -1/2 - 2 r(t) E(t)`` so no differencing is
    involved.
    """
    ts = dfe_grid(dist) if grid is None else np.asarray(grid, dtype=float)
    for t in ts:
        if float(dist.cdf(t)) <= 0 or t <= dist.lo:
            continue
        if t >= dist.hi:
            slope = -0.5  # F = 1 past the support
        else:
            e = dynamic_failure_extropy(dist, t, cfg).value
            slope = -0.5 - 2.0 * float(dist.reversed_hazard(t)) * e
        if slope > tol:
            return False
    return True


def is_dwdfe(dist: Distribution, w: WeightFunction, grid=None,
             cfg: IntegrationConfig = DEFAULT_CONFIG, tol: float = 1e-9) -> bool:
    return is_ddfe(weighted(dist, w, cfg), grid, cfg, tol)


# ---------------------------------------------------------------------------
# curves and reconstruction


@dataclass(frozen=True, eq=False)
class DfeCurve:
    """Dynamic failure extropy sampled on a strictly increasing grid."""

    grid: np.ndarray
    values: np.ndarray
    descriptor: str = ""

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size == 0:
            raise ValueError("grid and values must be non-empty 1-d arrays of equal length")
        if np.any(np.diff(g) <= 0):
            raise ValueError("curve grid must be strictly increasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.grid.size

    def to_csv(self, target=None) -> str:
        """Write ``t,value`` rows at 17 significant digits; returns the text."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "value"])
        for t, v in zip(self.grid, self.values):
            writer.writerow([format(t, ".17g"), format(v, ".17g")])
        text = buf.getvalue()
        if target is not None:
            if isinstance(target, (str, os.PathLike)):
                with open(target, "w", newline="") as fh:
                    fh.write(text)
            else:
                target.write(text)
        return text

    @classmethod
    def from_csv(cls, source, descriptor: str = "") -> "DfeCurve":
        if isinstance(source, (str, os.PathLike)):
            with open(source, newline="") as fh:
                rows = list(csv.reader(fh))
        else:
            rows = list(csv.reader(source))
        if not rows or [c.strip() for c in rows[0]] != ["t", "value"]:
            raise ValueError("curve CSV must start with the header 't,value'")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        return cls(data[:, 0], data[:, 1], descriptor)


def dfe_grid(dist: Distribution, n: int = 200, t_max: float | None = None) -> np.ndarray:
    """``n`` equally spaced times from ``lo + (top - lo)/1000`` to ``top``.

    ``top`` is the upper support end, or ``t_max`` (required for unbounded
    supports unless the 0.99 quantile is acceptable).
    """
    top = t_max if t_max is not None else (dist.hi if dist.bounded else float(dist.quantile(0.99)))
    if top <= dist.lo:
        raise ValueError("t_max must exceed the lower support end")
    first = dist.lo + (top - dist.lo) / 1000.0
    if n == 1:
        return np.array([first])
    return np.linspace(first, top, n)


def dfe_curve(dist: Distribution, grid=None, n: int = 200, t_max: float | None = None,
              weight: WeightFunction | None = None,
              cfg: IntegrationConfig = DEFAULT_CONFIG) -> DfeCurve:
    """Dynamic (optionally weighted) failure extropy along a grid."""
    target = weighted(dist, weight, cfg) if weight is not None else dist
    ts = dfe_grid(dist, n, t_max) if grid is None else np.asarray(grid, dtype=float)
    values = np.array([dynamic_failure_extropy(target, t, cfg).value for t in ts])
    return DfeCurve(ts, values, target.descriptor)


def reversed_hazard_from_dfe(curve: DfeCurve) -> np.ndarray:
    """``r(t) = -(1/2 + E'(t)) / (2 E(t))`` with ``E'`` from a cubic spline of the curve."""
    t, e = _usable_curve(curve)
    slope = CubicSpline(t, e)(t, 1)
    return -(0.5 + slope) / (2.0 * e)


def _usable_curve(curve: DfeCurve):
    t, e = curve.grid, curve.values
    if e[0] == 0.0:
        t, e = t[1:], e[1:]
    if t.size < 4:
        raise ValueError("need at least four nonzero curve points")
    if np.any(e >= 0):
        bad = t[np.argmax(e >= 0)]
        raise SingularityError(f"curve is not strictly negative at t={bad}")
    return t, e


def recover_cdf_from_dfe(curve: DfeCurve, anchor_t: float | None = None,
                         lo: float = 0.0) -> TabulatedDistribution:
    """Rebuild the cdf that produced a dynamic failure extropy curve.

    The ODE ``E' + 2 r E + 1/2 = 0`` gives ``r``; then
    ``F(t) = exp(-int_t^A r)`` with ``F(A) = 1`` at the anchor ``A``.  The
    derivative term integrates exactly, leaving

        log F(t) = 1/2 log(E(A)/E(t)) + 1/4 int_t^A du / E(u),

    and the remaining integral is taken in ``log(u - lo)`` where its integrand
    stays bounded.  For laws whose cdf is below 1 at the anchor the result is
    ``F(t)/F(A)``.
    """
    t, e = _usable_curve(curve)
    if anchor_t is not None:
        keep = t <= anchor_t + 1e-12 * max(1.0, abs(anchor_t))
        t, e = t[keep], e[keep]
        if t.size < 4 or not math.isclose(t[-1], anchor_t, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError("anchor_t must be a grid point with at least three points below it")
    if np.any(t <= lo):
        raise ValueError("curve grid must lie above lo")
    rates = reversed_hazard_from_dfe(DfeCurve(t, e))
    if np.any(rates < -1e-6 * max(1.0, float(np.max(np.abs(rates))))):
        bad = t[np.argmin(rates)]
        raise InconsistentCurveError(f"curve implies a negative reversed hazard near t={bad}")
    s = np.log(t - lo)
    g = (t - lo) / e
    anti = CubicSpline(s, g).antiderivative()
    inner = anti(s[-1]) - anti(s)
    log_f = 0.5 * np.log(e[-1] / e) + 0.25 * inner
    values = np.minimum(np.exp(log_f), 1.0)
    values = np.maximum.accumulate(values)
    return TabulatedDistribution(t, values, lo=lo)


# ---------------------------------------------------------------------------
# mean-value decomposition


def mean_decomposition_check(X: Distribution, Y: Distribution,
                             cfg: IntegrationConfig = DEFAULT_CONFIG) -> float:
    """Residual of the probabilistic mean-value decomposition of ``E_f(X)``.

    With ``R(x) = -1/2 int_x^{sup S_X} F`` one has ``E[R(X)] = E_f(X)`` and,
    for ``V`` with density ``(Gbar - Fbar)/(EY - EX)``,

        E_f(X) = E[R(Y)] - E[R'(V)] (EY - EX).

    Returns ``E_f(X) - (E[R(Y)] - E[R'(V)] (EY - EX))``.
    """
    if not (X.bounded and Y.bounded):
        raise NotApplicableError("decomposition needs bounded supports")
    mx, my = X.mean, Y.mean
    gap = my - mx
    if abs(gap) <= 1e-12 * max(1.0, abs(mx), abs(my)):
        raise NotApplicableError("decomposition needs unequal means")
    lo = min(X.lo, Y.lo)
    top = max(X.hi, Y.hi)
    probe = np.linspace(lo, top, 257)
    density = (np.asarray(X.cdf(probe)) - np.asarray(Y.cdf(probe))) / gap
    if np.any(density < -1e-12):
        raise OrderViolationError("(Gbar - Fbar)/(EY - EX) is negative; X and Y are not st-ordered")
    cum_top = X.integral_of_cdf_power(X.hi, 1, cfg).value

    def R(x):
        return -0.5 * (cum_top - X.integral_of_cdf_power(x, 1, cfg).value)

    breaks = sorted({X.lo, X.hi, Y.lo, Y.hi})
    expect_ry = R(Y.lo) * Y.atom + integrate(
        lambda y: R(y) * float(Y.pdf(y)), Y.lo, Y.hi, cfg, points=breaks).value
    expect_rv = integrate(
        lambda v: 0.5 * float(X.cdf(v)) * (float(X.cdf(v)) - float(Y.cdf(v))) / gap,
        lo, top, cfg, points=breaks).value
    fe = failure_extropy(X, cfg).value
    return fe - (expect_ry - expect_rv * gap)
