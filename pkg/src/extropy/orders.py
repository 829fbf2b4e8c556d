"""Grid checks for stochastic orders and a falsification harness for implications between them.

A verdict is only ever a statement about the grid it was computed on: "yes"
means the defining inequality held at every grid point within tolerance, "no"
comes with the first point where it failed.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .distributions import Distribution, Exponential, Pareto, Power, TypeIIIExtreme, Uniform
from .errors import ExtropyError, ParameterError
from .measures import dynamic_failure_extropy, failure_extropy
from .quadrature import DEFAULT_CONFIG, IntegrationConfig
from .transforms import MonotoneTransform, OrderStatistic, PowerTransformed, transform_affine

__all__ = [
    "KINDS",
    "DEFAULT_CHAINS",
    "OrderVerdict",
    "HarnessReport",
    "PreservationReport",
    "check_order",
    "implication_harness",
    "random_family_pairs",
    "transform_preservation_check",
    "affine_preservation_check",
]

KINDS = ("st", "disp", "hr", "rh", "lr", "fe", "dfe")
DEFAULT_CHAINS = (("disp", "st"), ("st", "fe"), ("rh", "dfe"), ("lr", "st"))

_DENSITY_FLOOR = 1e-300
_DFE_CDF_FLOOR = 1e-6
_TAIL_QUANTILE = 0.999


@dataclass(frozen=True)
class OrderVerdict:
    kind: str
    holds: str  # "yes" | "no" | "inconclusive"
    witness: float | tuple | None = None
    grid: dict = field(default_factory=dict)
    note: str = ""

    def __bool__(self):
        return self.holds == "yes"

    def as_dict(self) -> dict:
        d = asdict(self)
        if isinstance(self.witness, tuple):
            d["witness"] = list(self.witness)
        return d


def _slack(tol, *vals):
    finite = [abs(v) for v in vals if math.isfinite(v)]
    return tol * max([1.0] + finite)


def _union_grid(X: Distribution, Y: Distribution, n: int) -> np.ndarray:
    lo = min(X.lo, Y.lo)
    tops = [d.hi if d.bounded else float(d.quantile(_TAIL_QUANTILE)) for d in (X, Y)]
    hi = max(tops)
    # half the points equally spaced, half at quantiles of each law so the grid stays
    # dense where the mass is (e.g. near the left end of a heavy-tailed support)
    pts = np.linspace(lo, hi, n - n // 2)
    m = n // 4
    tails = 2.0 ** -np.arange(8, 8 + m // 8)
    levels = np.concatenate([np.arange(1, m - tails.size + 1) / (m - tails.size + 1), tails])
    qs = np.concatenate([np.asarray(X.quantile(levels)), np.asarray(Y.quantile(levels))])
    extra = [e for e in (X.lo, Y.lo, X.hi, Y.hi) if math.isfinite(e)]
    out = np.unique(np.concatenate([pts, qs, extra]))
    return out[(out >= lo) & (out <= hi)]


def _rh_rate(d: Distribution, x: float) -> float:
    F = float(d.cdf(x))
    return math.inf if F <= 0 else float(d.pdf(x)) / F


def _hazard_rate(d: Distribution, x: float) -> float:
    S = float(d.sf(x))
    return math.inf if S <= 0 else float(d.pdf(x)) / S


def check_order(kind: str, X: Distribution, Y: Distribution, grid: int = 512, tol: float = 1e-9,
                cfg: IntegrationConfig = DEFAULT_CONFIG) -> OrderVerdict:
    """Check ``X <= Y`` in the order ``kind`` on a grid of ``grid`` points."""
    if kind not in KINDS:
        raise ParameterError(f"unknown order {kind!r}; expected one of {KINDS}")
    if grid < 2:
        raise ParameterError("grid must have at least 2 points")
    try:
        return _CHECKERS[kind](X, Y, grid, tol, cfg)
    except ExtropyError as exc:
        return OrderVerdict(kind, "inconclusive", None, {"points": grid}, f"{type(exc).__name__}: {exc}")


def _verdict(kind, failures, info):
    if failures is None:
        return OrderVerdict(kind, "yes", None, info)
    return OrderVerdict(kind, "no", failures, info)


def _check_st(X, Y, n, tol, cfg):
    xs = _union_grid(X, Y, n)
    F = np.asarray(X.cdf(xs))
    G = np.asarray(Y.cdf(xs))
    bad = np.nonzero(F < G - tol)[0]
    info = {"points": int(xs.size), "lo": float(xs[0]), "hi": float(xs[-1])}
    return _verdict("st", float(xs[bad[0]]) if bad.size else None, info)


def _check_disp(X, Y, n, tol, cfg):
    # uniform levels miss crossings in the extreme quantiles; add geometric levels at both ends
    tails = 2.0 ** -np.arange(10, 41)
    p = np.unique(np.concatenate([[0.0], np.arange(1, n + 1) / (n + 1), tails, 1.0 - tails[:20]]))
    qx = np.asarray(X.quantile(p), dtype=float)
    qy = np.asarray(Y.quantile(p), dtype=float)
    # F^-1(a) - F^-1(b) <= G^-1(a) - G^-1(b) for all b <= a  <=>  qy - qx nondecreasing
    d = qy - qx
    running = np.maximum.accumulate(d)
    scale = tol * np.maximum(1.0, np.maximum(np.abs(qx), np.abs(qy)))
    bad = np.nonzero(d < running - scale)[0]
    info = {"points": int(n), "quantile_levels": int(p.size)}
    if not bad.size:
        return OrderVerdict("disp", "yes", None, info)
    j = int(bad[0])
    i = int(np.argmax(d[: j + 1]))
    return OrderVerdict("disp", "no", (float(p[i]), float(p[j])), info)


def _rate_check(kind, rate, X, Y, n, tol, x_smaller):
    xs = _union_grid(X, Y, n)
    info = {"points": int(xs.size), "lo": float(xs[0]), "hi": float(xs[-1])}
    ends = {X.lo, Y.lo, X.hi, Y.hi}
    for x in xs:
        if x in ends:
            continue  # densities are one-sided at support ends
        rx, ry = rate(X, x), rate(Y, x)
        if math.isinf(rx) and math.isinf(ry):
            continue
        small, big = (rx, ry) if x_smaller else (ry, rx)
        if small > big + _slack(tol, rx, ry):
            return OrderVerdict(kind, "no", float(x), info)
    return OrderVerdict(kind, "yes", None, info)


def _check_rh(X, Y, n, tol, cfg):
    return _rate_check("rh", _rh_rate, X, Y, n, tol, x_smaller=True)


def _check_hr(X, Y, n, tol, cfg):
    return _rate_check("hr", _hazard_rate, X, Y, n, tol, x_smaller=False)


def _check_lr(X, Y, n, tol, cfg):
    xs = _union_grid(X, Y, n)
    info = {"points": int(xs.size), "lo": float(xs[0]), "hi": float(xs[-1]), "density_floor": _DENSITY_FLOOR}
    lo = min(X.lo, Y.lo)
    ratios, where = [], []
    for x in xs:
        if x == lo:
            ax = X.atom if X.lo == lo else 0.0
            ay = Y.atom if Y.lo == lo else 0.0
            if ax == 0.0 and ay == 0.0:
                continue  # no mass at the left end; densities there are conventions
            f, g = ax, ay
        else:
            f, g = float(X.pdf(x)), float(Y.pdf(x))
        if f <= _DENSITY_FLOOR and g <= _DENSITY_FLOOR:
            continue
        ratios.append(max(g, _DENSITY_FLOOR) / max(f, _DENSITY_FLOOR))
        where.append(x)
    for i in range(1, len(ratios)):
        if ratios[i] < ratios[i - 1] - _slack(tol, ratios[i], ratios[i - 1]):
            return OrderVerdict("lr", "no", float(where[i]), info)
    return OrderVerdict("lr", "yes", None, info)


def _check_fe(X, Y, n, tol, cfg):
    fx = failure_extropy(X, cfg).value
    fy = failure_extropy(Y, cfg).value
    info = {"fe_x": fx, "fe_y": fy}
    if fx == -math.inf or fx <= fy + _slack(tol, fx, fy):
        return OrderVerdict("fe", "yes", None, info)
    return OrderVerdict("fe", "no", fx - fy, info)


def _check_dfe(X, Y, n, tol, cfg):
    xs = _union_grid(X, Y, n)
    info = {"points": 0, "cdf_floor": _DFE_CDF_FLOOR}
    used = 0
    for t in xs:
        if float(X.cdf(t)) < _DFE_CDF_FLOOR or float(Y.cdf(t)) < _DFE_CDF_FLOOR:
            continue
        if t <= X.lo and t <= Y.lo:
            continue
        ex = dynamic_failure_extropy(X, t, cfg).value
        ey = dynamic_failure_extropy(Y, t, cfg).value
        used += 1
        if ex > ey + _slack(tol, ex, ey):
            info["points"] = used
            return OrderVerdict("dfe", "no", float(t), info)
    info["points"] = used
    if used == 0:
        return OrderVerdict("dfe", "inconclusive", None, info, "no grid time with both cdfs above the floor")
    return OrderVerdict("dfe", "yes", None, info)


_CHECKERS = {
    "st": _check_st,
    "disp": _check_disp,
    "hr": _check_hr,
    "rh": _check_rh,
    "lr": _check_lr,
    "fe": _check_fe,
    "dfe": _check_dfe,
}


# ---------------------------------------------------------------------------
# harness


@dataclass
class HarnessReport:
    pairs: list = field(default_factory=list)
    falsifications: list = field(default_factory=list)
    skipped: int = 0
    chains: tuple = DEFAULT_CHAINS
    grid: int = 512

    @property
    def falsification_count(self) -> int:
        return len(self.falsifications)

    def as_dict(self) -> dict:
        return {
            "grid": self.grid,
            "chains": [f"{a}=>{c}" for a, c in self.chains],
            "pair_count": len(self.pairs),
            "skipped": self.skipped,
            "falsification_count": self.falsification_count,
            "falsifications": self.falsifications,
            "pairs": self.pairs,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), **kw)


def implication_harness(pairs: Sequence, chains: Sequence = DEFAULT_CHAINS, grid: int = 512,
                        cfg: IntegrationConfig = DEFAULT_CONFIG) -> HarnessReport:
    """Look for pairs where an antecedent order holds and its consequent fails.

    Inconclusive antecedents or consequents are counted in ``skipped``.
    """
    report = HarnessReport(chains=tuple(tuple(c) for c in chains), grid=grid)
    for index, (X, Y) in enumerate(pairs):
        verdicts: dict[str, OrderVerdict] = {}

        def get(kind):
            if kind not in verdicts:
                verdicts[kind] = check_order(kind, X, Y, grid, cfg=cfg)
            return verdicts[kind]

        for a, c in report.chains:
            va = get(a)
            if va.holds == "inconclusive":
                report.skipped += 1
                continue
            if va.holds != "yes":
                continue
            vc = get(c)
            if vc.holds == "inconclusive":
                report.skipped += 1
            elif vc.holds == "no":
                report.falsifications.append({
                    "index": index,
                    "chain": f"{a}=>{c}",
                    "x": X.descriptor,
                    "y": Y.descriptor,
                    "witness": vc.as_dict()["witness"],
                })
        report.pairs.append({
            "index": index,
            "x": X.descriptor,
            "y": Y.descriptor,
            "verdicts": {k: {"holds": v.holds, "witness": v.as_dict()["witness"]}
                         for k, v in sorted(verdicts.items())},
        })
    return report


def _draw_unit(rng) -> Distribution:
    pick = rng.integers(5)
    if pick == 0:
        return Uniform(0.0, 1.0)
    if pick == 1:
        return Power(float(rng.uniform(0.2, 5.0)))
    if pick == 2:
        return TypeIIIExtreme(float(rng.uniform(0.2, 5.0)), 1.0)
    if pick == 3:
        return OrderStatistic(Uniform(0.0, 1.0), int(rng.integers(1, 5)), 4)
    inner = _draw_unit(rng) if rng.random() < 0.5 else Power(float(rng.uniform(0.2, 3.0)))
    if isinstance(inner, OrderStatistic):
        inner = Uniform(0.0, 1.0)
    return PowerTransformed(inner, float(rng.uniform(0.3, 4.0)))


def _draw_halfline(rng) -> Distribution:
    base = Exponential(float(rng.uniform(0.2, 3.0)))
    return base if rng.random() < 0.5 else PowerTransformed(base, int(rng.integers(2, 5)))


def _draw_pareto(rng, b) -> Distribution:
    base = Pareto(float(rng.uniform(1.2, 4.0)), b)
    return base if rng.random() < 0.5 else PowerTransformed(base, int(rng.integers(2, 4)))


def random_family_pairs(seed: int, count: int = 200, shared_support: bool = True) -> list:
    """Seeded random pairs of analytic laws.

    With ``shared_support`` both members of a pair live on the same support
    (``[0,1]``, ``[0,inf)`` or ``[b,inf)``), optionally rescaled by a common
    factor.  Otherwise members are drawn independently, supports and scales
    included.
    """
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        if shared_support:
            kind = rng.integers(3)
            if kind == 0:
                X, Y = _draw_unit(rng), _draw_unit(rng)
            elif kind == 1:
                X, Y = _draw_halfline(rng), _draw_halfline(rng)
            else:
                b = float(rng.uniform(0.5, 2.0))
                X, Y = _draw_pareto(rng, b), _draw_pareto(rng, b)
            if rng.random() < 0.5:
                u = float(rng.uniform(0.5, 3.0))
                X, Y = transform_affine(X, u), transform_affine(Y, u)
        else:
            draws = []
            for _ in range(2):
                kind = rng.integers(3)
                d = (_draw_unit(rng) if kind == 0 else _draw_halfline(rng) if kind == 1
                     else _draw_pareto(rng, float(rng.uniform(0.5, 2.0))))
                draws.append(transform_affine(d, float(rng.uniform(0.5, 3.0))))
            X, Y = draws
        pairs.append((X, Y))
    return pairs


# ---------------------------------------------------------------------------
# preservation under maps


@dataclass(frozen=True)
class PreservationReport:
    premises: tuple
    conclusion: OrderVerdict | None
    note: str = ""

    @property
    def holds(self) -> str:
        if self.conclusion is None:
            return "inconclusive"
        return self.conclusion.holds


def transform_preservation_check(X: Distribution, Y: Distribution, psi: Callable, psi_inv: Callable,
                                 dpsi: Callable, grid: int = 512, name: str = "xi",
                                 cfg: IntegrationConfig = DEFAULT_CONFIG) -> PreservationReport:
    """Given ``X <=_rh Y`` on the grid, check ``xi(X) <=_dfe xi(Y)`` for increasing ``xi``."""
    premise = check_order("rh", X, Y, grid, cfg=cfg)
    if premise.holds != "yes":
        return PreservationReport((premise,), None, "reversed hazard premise not established")
    TX = MonotoneTransform(X, psi, psi_inv, dpsi, True, name)
    TY = MonotoneTransform(Y, psi, psi_inv, dpsi, True, name)
    return PreservationReport((premise,), check_order("dfe", TX, TY, grid, cfg=cfg))


def affine_preservation_check(X: Distribution, Y: Distribution, a1: float, b1: float, a2: float,
                              b2: float, grid: int = 512,
                              cfg: IntegrationConfig = DEFAULT_CONFIG) -> PreservationReport:
    """Given ``X <=_dfe Y``, ``0 < a1 <= a2``, ``0 < b1 <= b2`` and ``E_f(X; t)``
    decreasing for ``t > b2``, check ``a1 X + b1 <=_dfe a2 Y + b2``."""
    if not (0 < a1 <= a2 and 0 < b1 <= b2):
        return PreservationReport((), None, "coefficients must satisfy 0 < a1 <= a2, 0 < b1 <= b2")
    premise = check_order("dfe", X, Y, grid, cfg=cfg)
    if premise.holds != "yes":
        return PreservationReport((premise,), None, "dfe premise not established")
    top = X.hi if X.bounded else float(X.quantile(_TAIL_QUANTILE))
    ts = np.linspace(max(b2, X.lo), top, grid)
    ts = ts[np.asarray(X.cdf(ts)) > 0]
    vals = np.array([dynamic_failure_extropy(X, t, cfg).value for t in ts])
    rising = np.nonzero(np.diff(vals) > _slack(1e-9, *vals))[0]
    monotone = OrderVerdict("ddfe", "no" if rising.size else "yes",
                            float(ts[rising[0] + 1]) if rising.size else None, {"points": int(ts.size)})
    if monotone.holds != "yes":
        return PreservationReport((premise, monotone), None, "E_f(X; t) not decreasing past b2")
    Z1 = transform_affine(X, a1, b1)
    Z2 = transform_affine(Y, a2, b2)
    return PreservationReport((premise, monotone), check_order("dfe", Z1, Z2, grid, cfg=cfg))
