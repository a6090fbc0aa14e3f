"""Empirical Lipschitz / reverse-Lipschitz constants and stability verdicts.

Pair sampling can only bound the true constants from one side: the largest
observed quotient ``c_hat`` never exceeds the Lipschitz constant ``c`` and
the smallest ``r_hat`` never falls below the reverse constant ``r``. Where an
exact derivative is available the grid extremes of ``|f'|`` are used as the
interval constants instead.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from lipdyn.errors import (
    DegenerateNeighborhood, DerivativeUnavailable, MaxIterExceeded, NotAContraction,
    NotAFixedPoint, NotAPeriodicOrbit,
)
from lipdyn.maps import BREAKPOINT_ETA, ScalarMap, VectorMap, compose_k
from lipdyn.orbit import FixedPointCandidate, cycle_residual

DEFAULT_MARGIN = 0.05
DEFAULT_RADIUS = 1e-2
FIXED_POINT_CHECK = 1e-8
UNIT_TOL = 1e-12


class Verdict(str, enum.Enum):
    SINK = "Sink"
    SOURCE = "Source"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class NeighborhoodSpec:
    center: Union[float, Sequence[float]]
    radius: float = DEFAULT_RADIUS
    pair_samples: int = 2000
    grid_n: int = 512
    rng_seed: int = 0

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.pair_samples < 1:
            raise ValueError("pair_samples must be >= 1")
        if self.grid_n < 2:
            raise ValueError("grid_n must be >= 2")

    @property
    def min_separation(self) -> float:
        # Closer pairs give quotients dominated by rounding of f, not by f.
        return 2 * self.radius / (self.grid_n - 1)


@dataclass(frozen=True)
class LipschitzEstimate:
    c_hat: float
    r_hat: float
    deriv_sup: Optional[float]
    deriv_inf: Optional[float]
    pairs_used: int


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    evidence: Optional[LipschitzEstimate]
    margin: float
    method: str
    c_value: float
    c_source: str
    r_value: float
    r_source: str
    details: dict = field(default_factory=dict)


def make_rng(seed) -> np.random.Generator:
    """Counter-based (Philox) generator; ``seed`` may be an int or SeedSequence."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def _evaluate(f: ScalarMap, xs) -> np.ndarray:
    return np.fromiter((f.eval(float(x)) for x in xs), dtype=float, count=len(xs))


def _check_radius(radius):
    if radius < 1e-14:
        raise DegenerateNeighborhood(f"neighborhood radius {radius:g} is below 1e-14")


def estimate_lipschitz(f: ScalarMap, nbhd: NeighborhoodSpec) -> LipschitzEstimate:
    """Max and min of ``|f(x) - f(y)| / |x - y|`` over sampled pairs.

    Pairs are drawn uniformly from ``[center - radius, center + radius]``
    and joined by every adjacent pair of a ``grid_n``-point grid. Random
    pairs closer than the grid spacing are dropped, so the pairs drawn for
    ``2N`` samples start with those drawn for ``N`` (same seed) and the
    estimates refine monotonically.
    """
    _check_radius(nbhd.radius)
    c = float(nbhd.center)
    lo, hi = c - nbhd.radius, c + nbhd.radius

    grid = np.linspace(lo, hi, nbhd.grid_n)
    fg = _evaluate(f, grid)
    q_grid = np.abs(np.diff(fg)) / np.diff(grid)

    pairs = make_rng(nbhd.rng_seed).uniform(lo, hi, size=(nbhd.pair_samples, 2))
    gap = np.abs(pairs[:, 0] - pairs[:, 1])
    pairs = pairs[gap >= nbhd.min_separation]
    fx, fy = _evaluate(f, pairs[:, 0]), _evaluate(f, pairs[:, 1])
    q_rand = np.abs(fx - fy) / np.abs(pairs[:, 0] - pairs[:, 1])

    q = np.concatenate([q_grid, q_rand])
    deriv_sup = deriv_inf = None
    if f.deriv is not None:
        mags = [abs(f.deriv(float(x))) for x in grid if not f.near_breakpoint(float(x))]
        if mags:
            deriv_sup, deriv_inf = max(mags), min(mags)
    return LipschitzEstimate(float(q.max()), float(q.min()), deriv_sup, deriv_inf, len(q))


def _one_sided(f: ScalarMap, p: float, radius: float, grid_n: int) -> dict:
    """Slope evidence on each side of ``p``: ranges of adjacent-grid quotients
    and one-sided difference quotients with a tiny step."""
    out = {}
    h = min(radius / 2, 1e-6 * max(1.0, abs(p)))
    fp = f.eval(p)
    for side, sign in (("left", -1.0), ("right", 1.0)):
        grid = np.linspace(p, p + sign * radius, grid_n // 2 + 1)
        fg = _evaluate(f, grid)
        q = np.abs(np.diff(fg)) / np.abs(np.diff(grid))
        out[f"{side}_slope"] = abs(f.eval(p + sign * h) - fp) / h
        out[f"{side}_slope_range"] = [float(q.min()), float(q.max())]
    return out


def _monotone(f: ScalarMap, nbhd: NeighborhoodSpec) -> bool:
    c = float(nbhd.center)
    d = np.diff(_evaluate(f, np.linspace(c - nbhd.radius, c + nbhd.radius, nbhd.grid_n)))
    return bool(np.all(d > 0) or np.all(d < 0))


def _verdict(c_value, r_value, margin) -> Verdict:
    if c_value <= 1 - margin:
        return Verdict.SINK
    if r_value >= 1 + margin:
        return Verdict.SOURCE
    return Verdict.INCONCLUSIVE


def classify_fixed_point(f: ScalarMap, p: float, nbhd: Optional[NeighborhoodSpec] = None,
                         margin: float = DEFAULT_MARGIN,
                         fp_tol: float = FIXED_POINT_CHECK) -> Classification:
    """Sink / Source / Inconclusive for a fixed point via local (reverse)
    Lipschitz constants.

    Sink needs a Lipschitz estimate ``<= 1 - margin``: the grid sup of
    ``|f'|`` when the derivative exists on the punctured neighborhood,
    otherwise ``c_hat``. Source needs a reverse estimate ``>= 1 + margin``:
    the grid inf of ``|f'|`` when ``f`` is also monotone on the
    neighborhood, otherwise ``r_hat`` (necessary but not sufficient
    evidence, since ``r_hat`` only bounds ``r`` from above). A fixed point
    sitting on a breakpoint is judged from pair quotients alone.
    """
    p = float(p)
    if nbhd is None:
        nbhd = NeighborhoodSpec(center=p)
    elif nbhd.center != p:
        nbhd = dataclasses.replace(nbhd, center=p)
    residual = abs(f.eval(p) - p)
    if not residual <= fp_tol:
        raise NotAFixedPoint(f"|f(p) - p| = {residual:.3g} exceeds {fp_tol:g} at p={p!r}")

    est = estimate_lipschitz(f, nbhd)
    at_breakpoint = f.near_breakpoint(p)
    monotone = _monotone(f, nbhd)

    if not at_breakpoint and est.deriv_sup is not None:
        c_value, c_source = est.deriv_sup, "deriv_sup"
    else:
        c_value, c_source = est.c_hat, "c_hat"
    if not at_breakpoint and est.deriv_inf is not None and monotone:
        r_value, r_source = est.deriv_inf, "deriv_inf"
    else:
        r_value, r_source = est.r_hat, "r_hat"

    details = {"residual": residual, "at_breakpoint": at_breakpoint, "monotone": monotone}
    details.update(_one_sided(f, p, nbhd.radius, nbhd.grid_n))
    return Classification(_verdict(c_value, r_value, margin), est, margin, "lipschitz_test",
                          c_value, c_source, r_value, r_source, details)


def classify_fixed_point_smooth(f: ScalarMap, p: float) -> Classification:
    """Classical test on ``|f'(p)|``; the cross-check for the Lipschitz test."""
    if f.deriv is None:
        raise DerivativeUnavailable(f"{f.label} has no derivative")
    if f.near_breakpoint(p):
        raise DerivativeUnavailable(f"p={p!r} is within {BREAKPOINT_ETA:g} of a breakpoint")
    slope = abs(f.deriv(p))
    if abs(slope - 1) <= UNIT_TOL:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.SINK if slope < 1 else Verdict.SOURCE
    return Classification(verdict, None, 0.0, "smooth_oracle", slope, "|f'(p)|", slope, "|f'(p)|",
                          {"derivative": f.deriv(p)})


def cycle_multiplier(f: ScalarMap, cycle) -> float:
    prod = 1.0
    for y in cycle:
        prod *= f.deriv(y)
    return prod


def classify_periodic_orbit(f: ScalarMap, cycle, nbhd_radius: float = DEFAULT_RADIUS,
                            margin: float = DEFAULT_MARGIN, pair_samples: int = 2000,
                            rng_seed: int = 0) -> Classification:
    """Classify a k-cycle as a fixed point of ``f^k`` at ``cycle[0]``.

    When ``f'`` exists along the cycle, ``details`` also carries the
    multiplier ``f'(y_1)...f'(y_k)`` and the classical verdict from it.
    """
    cycle = [float(y) for y in cycle]
    if not cycle:
        raise NotAPeriodicOrbit("empty cycle")
    residual = cycle_residual(f, cycle)
    if not residual <= FIXED_POINT_CHECK:
        raise NotAPeriodicOrbit(f"cycle residual {residual:.3g} exceeds {FIXED_POINT_CHECK:g}")

    k = len(cycle)
    g = compose_k(f, k)
    nbhd = NeighborhoodSpec(cycle[0], nbhd_radius, pair_samples=pair_samples, rng_seed=rng_seed)
    result = classify_fixed_point(g, cycle[0], nbhd, margin)

    details = dict(result.details, period=k, cycle_residual=residual)
    if f.deriv is not None and not any(f.near_breakpoint(y) for y in cycle):
        mult = cycle_multiplier(f, cycle)
        details["multiplier"] = mult
        m = abs(mult)
        details["oracle_verdict"] = (
            Verdict.INCONCLUSIVE if abs(m - 1) <= UNIT_TOL
            else Verdict.SINK if m < 1 else Verdict.SOURCE
        ).value
    return dataclasses.replace(result, details=details)


def contraction_fixed_point(f: ScalarMap, x0: float, tol: float = 1e-12,
                            max_iter: int = 1000) -> FixedPointCandidate:
    """Banach iteration ``x <- f(x)`` with an a-posteriori stopping rule.

    With ``c_hat`` the largest observed step ratio, iteration stops once
    ``|x_(n+1) - x_n| <= tol * (1 - c_hat) / c_hat``, which bounds the
    distance to the fixed point by ``tol``. Any step ratio ``>= 1`` means
    the map is not a contraction along this orbit.
    """
    x = float(x0)
    x_new = f.eval(x)
    d_prev = abs(x_new - x)
    c_hat = 0.0
    for it in range(1, max_iter + 1):
        if d_prev == 0:
            return FixedPointCandidate(x_new, abs(f.eval(x_new) - x_new), (x_new, x_new), it)
        x, x_new = x_new, f.eval(x_new)
        d = abs(x_new - x)
        if not math.isfinite(d):
            raise NotAContraction(f"iterate became non-finite at step {it}", it, math.inf)
        if d <= 4 * math.ulp(x_new):
            # rounding floor reached; further ratios are noise
            return FixedPointCandidate(x_new, abs(f.eval(x_new) - x_new), (x_new, x_new), it)
        q = d / d_prev
        if q >= 1:
            raise NotAContraction(f"step ratio {q:.6g} >= 1 at step {it}", it, q)
        c_hat = max(c_hat, q)
        if c_hat == 0 or d <= tol * (1 - c_hat) / c_hat:
            bound = c_hat / (1 - c_hat) * d
            return FixedPointCandidate(x_new, abs(f.eval(x_new) - x_new),
                                       (x_new - bound, x_new + bound), it)
        d_prev = d
    raise MaxIterExceeded(f"no convergence within {max_iter} iterations")


def _ball_pairs(rng, center: np.ndarray, radius: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    m = center.size
    g = rng.standard_normal((n, 2, m))
    g /= np.linalg.norm(g, axis=2, keepdims=True)
    r = radius * rng.uniform(size=(n, 2, 1)) ** (1.0 / m)
    pts = center + r * g
    return pts[:, 0], pts[:, 1]


def _vector_quotients(vmap: VectorMap, center, radius, n, min_sep, rng):
    v, w = _ball_pairs(rng, center, radius, n)
    dist = np.linalg.norm(v - w, axis=1)
    keep = dist >= min_sep
    v, w, dist = v[keep], w[keep], dist[keep]
    fv = np.array([vmap(x) for x in v]).reshape(v.shape)
    fw = np.array([vmap(x) for x in w]).reshape(w.shape)
    return np.linalg.norm(fv - fw, axis=1) / dist


def classify_fixed_point_vector(vmap: VectorMap, p, nbhd: Optional[NeighborhoodSpec] = None,
                                margin: float = DEFAULT_MARGIN) -> Classification:
    """Euclidean-norm version of :func:`classify_fixed_point`.

    A Sink verdict additionally requires a second, four times denser pass
    (independent stream from the same seed) to stay below ``1 - margin``.
    """
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.size != vmap.dimension:
        raise ValueError(f"point has dimension {p.size}, map has {vmap.dimension}")
    if nbhd is None:
        nbhd = NeighborhoodSpec(center=tuple(p))
    _check_radius(nbhd.radius)
    residual = vmap.norm(vmap(p) - p)
    if not residual <= FIXED_POINT_CHECK:
        raise NotAFixedPoint(f"||f(p) - p|| = {residual:.3g} exceeds {FIXED_POINT_CHECK:g}")

    main_seed, confirm_seed = np.random.SeedSequence(nbhd.rng_seed).spawn(2)
    q = _vector_quotients(vmap, p, nbhd.radius, nbhd.pair_samples, nbhd.min_separation,
                          make_rng(main_seed))
    est = LipschitzEstimate(float(q.max()), float(q.min()), None, None, len(q))
    verdict = _verdict(est.c_hat, est.r_hat, margin)
    details = {"residual": residual}
    if verdict is Verdict.SINK:
        q2 = _vector_quotients(vmap, p, nbhd.radius, 4 * nbhd.pair_samples, nbhd.min_separation,
                               make_rng(confirm_seed))
        details["confirm_c_hat"] = float(q2.max())
        if q2.max() > 1 - margin:
            verdict = Verdict.INCONCLUSIVE
    return Classification(verdict, est, margin, "lipschitz_test", est.c_hat, "c_hat",
                          est.r_hat, "r_hat", details)
