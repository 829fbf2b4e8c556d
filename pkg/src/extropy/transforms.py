"""Laws derived from a base law, weight functions, bivariate laws and descriptors.

Derived laws: affine images ``aX + b``, strictly monotone images ``psi(X)``,
the proportional reversed hazard model ``F^tau`` (``tau = n`` gives the law of
the sample maximum), order statistics, and weighted (length-biased) laws.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .distributions import (
    Distribution,
    Exponential,
    Pareto,
    Power,
    TypeIIIExtreme,
    Uniform,
    _as_output,
    fmt_number,
)
from .errors import (
    DegenerateWeightError,
    DivergenceError,
    InvalidTransformError,
    ParameterError,
)
from .quadrature import DEFAULT_CONFIG, IntegrationConfig

__all__ = [
    "Affine",
    "MonotoneTransform",
    "PowerTransformed",
    "OrderStatistic",
    "WeightFunction",
    "WeightedDistribution",
    "BivariateDistribution",
    "WEIGHTS",
    "get_weight",
    "power_weight",
    "transform_affine",
    "transform_monotone",
    "power_transformed",
    "weighted",
    "length_biased",
    "parse_distribution",
]


@dataclass(frozen=True, eq=False)
class Affine(Distribution):
    """Law of ``scale * X + shift``."""

    base: Distribution
    scale: float
    shift: float = 0.0

    def __post_init__(self):
        if not (0 < self.scale < math.inf):
            raise ParameterError(f"affine scale must be positive, got {self.scale}")
        if not (0 <= self.shift < math.inf):
            raise ParameterError(f"affine shift must be nonnegative, got {self.shift}")

    @property
    def lo(self):
        return self.scale * self.base.lo + self.shift

    @property
    def hi(self):
        return self.scale * self.base.hi + self.shift

    @property
    def descriptor(self):
        return f"affine({self.base.descriptor},{fmt_number(self.scale)},{fmt_number(self.shift)})"

    def _back(self, y):
        return (y - self.shift) / self.scale

    def _cdf(self, y):
        return np.asarray(self.base.cdf(self._back(y)))

    def _pdf(self, y):
        return np.asarray(self.base.pdf(self._back(y))) / self.scale

    def _quantile(self, p):
        return self.scale * np.asarray(self.base.quantile(p)) + self.shift

    def _closed_mean(self):
        return self.scale * self.base.mean + self.shift

    def _closed_power_integral(self, t, k, strict):
        inner = self.base._closed_power_integral(self._back(t), k, strict)
        return None if inner is None else self.scale * inner

    def _closed_partial_moment(self, p, t):
        if self.shift != 0:
            return None
        inner = self.base._closed_partial_moment(p, self._back(t))
        return None if inner is None else self.scale**p * inner


class MonotoneTransform(Distribution):
    """Law of ``psi(X)`` for a strictly monotone, differentiable ``psi``.

    The caller supplies ``psi``, its inverse and its derivative.  At
    construction ``psi`` is probed at 64 interior support points; a map that is
    not strictly monotone in the declared direction, or whose inverse does not
    undo it, is rejected.
    """

    def __init__(
        self,
        base: Distribution,
        psi: Callable,
        psi_inv: Callable,
        dpsi: Callable,
        increasing: bool = True,
        name: str = "psi",
    ):
        self.base = base
        self.psi = psi
        self.psi_inv = psi_inv
        self.dpsi = dpsi
        self.increasing = bool(increasing)
        self.name = name
        probe = base.probe_points(64)
        y = np.asarray(psi(probe), dtype=float)
        steps = np.diff(y)
        if self.increasing and not np.all(steps > 0):
            raise InvalidTransformError(f"{name} is not strictly increasing on the support of {base}")
        if not self.increasing and not np.all(steps < 0):
            raise InvalidTransformError(f"{name} is not strictly decreasing on the support of {base}")
        back = np.asarray(psi_inv(y), dtype=float)
        if not np.allclose(back, probe, rtol=1e-8, atol=1e-10):
            raise InvalidTransformError(f"supplied inverse does not undo {name}")
        ends = [float(psi(base.lo)), float(psi(base.hi))]
        self.lo, self.hi = min(ends), max(ends)
        if self.lo < 0:
            raise ParameterError(f"{name} maps the support of {base} below zero")

    @property
    def descriptor(self):
        return f"{self.name}({self.base.descriptor})"

    def _cdf(self, y):
        F = np.asarray(self.base.cdf(self.psi_inv(y)))
        return F if self.increasing else 1.0 - F

    def _pdf(self, y):
        x = self.psi_inv(y)
        return np.asarray(self.base.pdf(x)) / np.abs(np.asarray(self.dpsi(x), dtype=float))

    def _quantile(self, p):
        q = self.base.quantile(p if self.increasing else 1.0 - p)
        return np.asarray(self.psi(q), dtype=float)


@dataclass(frozen=True, eq=False)
class PowerTransformed(Distribution):
    """Proportional reversed hazard model: cdf ``F(x)^tau``."""

    base: Distribution
    tau: float

    def __post_init__(self):
        if not (0 < self.tau < math.inf):
            raise ParameterError(f"tau must be positive, got {self.tau}")

    @property
    def lo(self):
        return self.base.lo

    @property
    def hi(self):
        return self.base.hi

    @property
    def descriptor(self):
        return f"prhr({self.base.descriptor},{fmt_number(self.tau)})"

    def _cdf(self, x):
        return np.asarray(self.base.cdf(x)) ** self.tau

    def _pdf(self, x):
        F = np.asarray(self.base.cdf(x))
        return self.tau * F ** (self.tau - 1) * np.asarray(self.base.pdf(x))

    def _quantile(self, p):
        return np.asarray(self.base.quantile(p ** (1.0 / self.tau)))

    def _closed_power_integral(self, t, k, strict):
        return self.base._closed_power_integral(t, k * self.tau, strict)


@dataclass(frozen=True, eq=False)
class OrderStatistic(Distribution):
    """Law of the ``rank``-th smallest of ``size`` iid draws from ``base``."""

    base: Distribution
    rank: int
    size: int

    def __post_init__(self):
        if not (1 <= self.rank <= self.size):
            raise ParameterError(f"need 1 <= rank <= size, got ({self.rank}, {self.size})")

    @property
    def lo(self):
        return self.base.lo

    @property
    def hi(self):
        return self.base.hi

    @property
    def descriptor(self):
        return f"orderstat({self.base.descriptor},{self.rank},{self.size})"

    def _cdf(self, x):
        return special.betainc(self.rank, self.size - self.rank + 1, np.asarray(self.base.cdf(x)))

    def _pdf(self, x):
        r, m = self.rank, self.size
        F = np.asarray(self.base.cdf(x))
        dens = F ** (r - 1) * (1 - F) ** (m - r) / special.beta(r, m - r + 1)
        return dens * np.asarray(self.base.pdf(x))

    def _quantile(self, p):
        u = special.betaincinv(self.rank, self.size - self.rank + 1, p)
        return np.asarray(self.base.quantile(u))

    def _closed_power_integral(self, t, k, strict):
        if self.rank == self.size:
            return self.base._closed_power_integral(t, k * self.size, strict)
        return None


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class WeightFunction:
    """Nonnegative weight ``w(x)``.

    ``power`` is set when ``w(x) = x**power``; it unlocks closed-form weighted
    moments for the uniform, power and exponential families.
    """

    label: str
    func: Callable = field(compare=False)
    power: float | None = None

    def __call__(self, x):
        return _as_output(self.func(np.asarray(x, dtype=float)))


def power_weight(p: float, label: str | None = None) -> WeightFunction:
    if p == 0:
        return WeightFunction(label or "one", lambda x: np.ones_like(x), 0.0)
    return WeightFunction(label or f"x^{fmt_number(p)}", lambda x: x**p, float(p))


WEIGHTS = {
    "one": power_weight(0, "one"),
    "sqrt": power_weight(0.5, "sqrt"),
    "id": power_weight(1, "id"),
    "square": power_weight(2, "square"),
    "cube": power_weight(3, "cube"),
}
_WEIGHT_ALIASES = {"identity": "id", "x": "id", "constant-one": "one", "1": "one"}


def get_weight(label: str) -> WeightFunction:
    key = _WEIGHT_ALIASES.get(label, label)
    try:
        return WEIGHTS[key]
    except KeyError:
        raise ParameterError(f"unknown weight {label!r}; expected one of {sorted(WEIGHTS)}") from None


class WeightedDistribution(Distribution):
    """Weighted law with density ``w(x) f(x) / mu_w``.

    Its cdf is ``E[w(X) 1{X <= t}] / mu_w``; with ``w(x) = x`` this is the
    length-biased law.
    """

    def __init__(self, base: Distribution, weight: WeightFunction,
                 cfg: IntegrationConfig = DEFAULT_CONFIG):
        self.base = base
        self.weight = weight
        self.cfg = cfg
        self.lo = base.lo
        self.hi = base.hi
        if np.any(np.asarray(weight(base.probe_points(64))) < 0):
            raise ParameterError(f"weight {weight.label} is negative on the support of {base}")
        mu = base.weighted_mean(weight, cfg)
        if not math.isfinite(mu):
            raise DivergenceError(f"E[w(X)] diverges for weight {weight.label} under {base}")
        if mu <= 0:
            raise DegenerateWeightError(f"E[w(X)] = {mu} for weight {weight.label} under {base}")
        self.normalizer = mu

    @property
    def descriptor(self):
        return f"weighted({self.base.descriptor},{self.weight.label})"

    def _cdf(self, x):
        return np.asarray(self.base.partial_weighted_moment(self.weight, x, self.cfg)) / self.normalizer

    def _pdf(self, x):
        return np.asarray(self.weight(x)) * np.asarray(self.base.pdf(x)) / self.normalizer


# ---------------------------------------------------------------------------
# bivariate


class BivariateDistribution:
    """Joint law of ``(X, Y)`` through its cdf ``K(x, y)``.

    Without ``joint`` the coordinates are independent and ``K = F G``.  A
    user-supplied ``joint`` is probed on a 9x9 grid for monotonicity and the
    Frechet upper bound ``K <= min(F, G)``.
    """

    def __init__(self, x: Distribution, y: Distribution, joint: Callable | None = None,
                 name: str | None = None):
        self.x = x
        self.y = y
        self._joint = joint
        self.independent = joint is None
        self.name = name or (f"{x}*{y}" if joint is None else f"joint({x},{y})")
        if joint is not None:
            gx = x.probe_points(9)
            gy = y.probe_points(9)
            K = np.array([[float(joint(a, b)) for b in gy] for a in gx])
            F = np.asarray(x.cdf(gx))[:, None]
            G = np.asarray(y.cdf(gy))[None, :]
            if np.any(K > np.minimum(F, G) + 1e-12) or np.any(K < -1e-12):
                raise ParameterError("joint cdf violates 0 <= K <= min(F, G)")
            if np.any(np.diff(K, axis=0) < -1e-12) or np.any(np.diff(K, axis=1) < -1e-12):
                raise ParameterError("joint cdf is not nondecreasing in each argument")

    def __str__(self):
        return self.name

    def cdf(self, x, y) -> float:
        if self._joint is None:
            return float(self.x.cdf(x)) * float(self.y.cdf(y))
        fx = float(self.x.cdf(x))
        gy = float(self.y.cdf(y))
        if fx == 0.0 or gy == 0.0:
            return 0.0
        if fx == 1.0:
            return gy
        if gy == 1.0:
            return fx
        return float(self._joint(x, y))

    def conditional_cdf(self, x, y) -> float:
        """``K(x, y) / G(y)``, the cdf of ``X`` given ``Y <= y``."""
        return self.cdf(x, y) / float(self.y.cdf(y))

    @classmethod
    def independent_product(cls, x: Distribution, y: Distribution) -> "BivariateDistribution":
        return cls(x, y)


# ---------------------------------------------------------------------------
# constructors


def transform_affine(dist: Distribution, a: float, b: float = 0.0) -> Distribution:
    """Law of ``a X + b`` with ``a > 0`` and ``b >= 0``."""
    if a == 1 and b == 0:
        return dist
    return Affine(dist, float(a), float(b))


def transform_monotone(dist, psi, psi_inv, dpsi, direction="increasing", name="psi"):
    if direction not in ("increasing", "decreasing"):
        raise ParameterError(f"direction must be 'increasing' or 'decreasing', got {direction!r}")
    return MonotoneTransform(dist, psi, psi_inv, dpsi, direction == "increasing", name)


def power_transformed(dist: Distribution, tau: float) -> PowerTransformed:
    return PowerTransformed(dist, float(tau))


def weighted(dist: Distribution, w: WeightFunction | str,
             cfg: IntegrationConfig = DEFAULT_CONFIG) -> WeightedDistribution:
    if isinstance(w, str):
        w = get_weight(w)
    return WeightedDistribution(dist, w, cfg)


def length_biased(dist: Distribution, cfg: IntegrationConfig = DEFAULT_CONFIG) -> WeightedDistribution:
    return WeightedDistribution(dist, WEIGHTS["id"], cfg)


# ---------------------------------------------------------------------------
# descriptor parsing

_TOKEN = re.compile(r"\s*(?:([A-Za-z][\w\-\^.]*)|([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)|(.))")

_FAMILIES = {
    "uniform": (Uniform, 2),
    "power": (Power, 1),
    "ev3": (TypeIIIExtreme, 2),
    "pareto": (Pareto, 2),
    "exp": (Exponential, 1),
    "exponential": (Exponential, 1),
}


def parse_distribution(text: str) -> Distribution:
    """Parse a one-line descriptor such as ``uniform(0,4)`` or ``prhr(power(1),3)``.

    Recognised forms: ``uniform(a,b)``, ``power(a)``, ``ev3(alpha,beta)``,
    ``pareto(a,b)``, ``exp(rate)``, ``affine(D,scale,shift)``, ``prhr(D,tau)``,
    ``orderstat(D,rank,size)`` and ``weighted(D,label)``.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        name, number, punct = m.groups()
        if name is not None:
            tokens.append(("name", name))
        elif number is not None:
            tokens.append(("num", float(number)))
        elif punct is not None and not punct.isspace():
            tokens.append(("punct", punct))
        pos = m.end()
    parser = _Parser(tokens, text)
    dist = parser.distribution()
    if parser.i != len(tokens):
        raise ParameterError(f"trailing input in descriptor {text!r}")
    return dist


class _Parser:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.text = text
        self.i = 0

    def _fail(self, why):
        raise ParameterError(f"cannot parse distribution {self.text!r}: {why}")

    def _next(self, kind=None):
        if self.i >= len(self.tokens):
            self._fail("unexpected end of input")
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            self._fail(f"expected {kind}, found {tok[1]!r}")
        self.i += 1
        return tok

    def _expect(self, ch):
        tok = self._next("punct")
        if tok[1] != ch:
            self._fail(f"expected {ch!r}, found {tok[1]!r}")

    def _number(self):
        return self._next("num")[1]

    def distribution(self):
        name = self._next("name")[1].lower()
        self._expect("(")
        if name in _FAMILIES:
            cls, arity = _FAMILIES[name]
            args = [self._number()]
            for _ in range(arity - 1):
                self._expect(",")
                args.append(self._number())
            self._expect(")")
            return cls(*args)
        if name in ("affine", "prhr", "orderstat", "weighted"):
            base = self.distribution()
            self._expect(",")
            if name == "weighted":
                label = self._next()[1]
                self._expect(")")
                return weighted(base, fmt_number(label) if isinstance(label, float) else label)
            args = [self._number()]
            while self.tokens[self.i:self.i + 1] == [("punct", ",")]:
                self.i += 1
                args.append(self._number())
            self._expect(")")
            if name == "affine":
                if len(args) not in (1, 2):
                    self._fail("affine takes (D, scale[, shift])")
                return Affine(base, *args)
            if name == "prhr":
                if len(args) != 1:
                    self._fail("prhr takes (D, tau)")
                return PowerTransformed(base, args[0])
            if len(args) != 2 or not all(float(a).is_integer() for a in args):
                self._fail("orderstat takes (D, rank, size) with integer rank and size")
            return OrderStatistic(base, int(args[0]), int(args[1]))
        self._fail(f"unknown family {name!r}")
