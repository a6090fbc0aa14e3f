"""Evaluatable scalar and vector maps.

A :class:`ScalarMap` bundles ``eval``, an optional exact derivative and the
set of points where the derivative may not exist. Built-in families cover
the piecewise example map, the tent family ``a*|x| + b``, the logistic
family and affine maps; anything else comes from the map language through
:func:`from_dsl`.
"""

from __future__ import annotations

import bisect
import warnings
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Optional

import numpy as np

from lipdyn.dsl import MapDefinition, evaluate
from lipdyn.errors import MissingParameter, UnknownFamily

BREAKPOINT_ETA = 1e-9

FAMILY_PARAMETERS = {
    "logistic": ("a",),
    "tent_ab": ("a", "b"),
    "piecewise_example": (),
    "affine": ("c", "d"),
}


@dataclass(frozen=True)
class ScalarMap:
    eval: Callable[[float], float]
    deriv: Optional[Callable[[float], float]] = None
    breakpoints: tuple[float, ...] = ()
    label: str = "f"
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        bps = tuple(sorted(set(float(b) for b in self.breakpoints)))
        object.__setattr__(self, "breakpoints", bps)

    def __call__(self, x: float) -> float:
        return self.eval(x)

    def near_breakpoint(self, x: float, eta: float = BREAKPOINT_ETA) -> bool:
        """True if ``x`` lies within ``eta`` of a known breakpoint."""
        bps = self.breakpoints
        if not bps:
            return False
        i = bisect.bisect_left(bps, x)
        return any(abs(bps[j] - x) <= eta for j in (i - 1, i) if 0 <= j < len(bps))


@dataclass(frozen=True)
class ComposedMap(ScalarMap):
    """``base`` applied ``k`` times.

    Breakpoint preimages are not enumerated; ``near_breakpoint`` instead
    checks whether any intermediate iterate lands near a breakpoint of the
    base map.
    """

    base: Optional[ScalarMap] = None
    k: int = 1

    def near_breakpoint(self, x: float, eta: float = BREAKPOINT_ETA) -> bool:
        for _ in range(self.k):
            if self.base.near_breakpoint(x, eta):
                return True
            x = self.base.eval(x)
        return False


@dataclass(frozen=True)
class ParamFamily:
    name: str
    params: dict = field(default_factory=dict)


def _require(family: ParamFamily) -> dict:
    if family.name not in FAMILY_PARAMETERS:
        raise UnknownFamily(f"unknown map family {family.name!r}; "
                            f"known: {', '.join(sorted(FAMILY_PARAMETERS))}")
    missing = [p for p in FAMILY_PARAMETERS[family.name] if p not in family.params]
    if missing:
        raise MissingParameter(f"family {family.name!r} needs parameter(s): {', '.join(missing)}")
    return {k: float(v) for k, v in family.params.items()}


def _piecewise_example(x):
    if x < 0:
        return 2 * x
    if x < 1:
        return x**2
    return 0.5 * x + 0.5


def _piecewise_example_deriv(x):
    if x < 0:
        return 2.0
    if x < 1:
        return 2 * x
    return 0.5


def builtin(family: ParamFamily) -> ScalarMap:
    """Construct one of the built-in families with its exact derivative.

    >>> builtin(ParamFamily("logistic", {"a": 3.0})).eval(0.5)
    0.75
    """
    p = _require(family)
    name = family.name
    if name == "logistic":
        a = p["a"]
        notes = ()
        if not 0 < a < 4:
            notes = ("outside 0 < a < 4",)
            warnings.warn(f"logistic parameter a={a} is outside 0 < a < 4", stacklevel=2)
        return ScalarMap(
            eval=lambda x: (a * x) * (1 - x),
            deriv=lambda x: a * (1 - 2 * x),
            label=f"logistic(a={a!r})",
            notes=notes,
        )
    if name == "tent_ab":
        a, b = p["a"], p["b"]
        # slope at the kink itself follows the x >= 0 side, like the DSL's abs rule
        return ScalarMap(
            eval=lambda x: a * abs(x) + b,
            deriv=lambda x: -a if x < 0 else a,
            breakpoints=(0.0,) if a != 0 else (),
            label=f"tent_ab(a={a!r}, b={b!r})",
        )
    if name == "piecewise_example":
        return ScalarMap(
            eval=_piecewise_example,
            deriv=_piecewise_example_deriv,
            breakpoints=(0.0, 1.0),
            label="piecewise_example",
        )
    c, d = p["c"], p["d"]
    return ScalarMap(eval=lambda x: c * x + d, deriv=lambda x: c, label=f"affine(c={c!r}, d={d!r})")


def logistic(a: float) -> ScalarMap:
    return builtin(ParamFamily("logistic", {"a": a}))


def tent_ab(a: float, b: float) -> ScalarMap:
    return builtin(ParamFamily("tent_ab", {"a": a, "b": b}))


def piecewise_example() -> ScalarMap:
    return builtin(ParamFamily("piecewise_example"))


def affine(c: float, d: float) -> ScalarMap:
    return builtin(ParamFamily("affine", {"c": c, "d": d}))


def from_dsl(mapdef: MapDefinition) -> ScalarMap:
    """Wrap a parsed map definition; eval and deriv walk the expression trees."""
    deriv = partial(evaluate, mapdef.derivative) if mapdef.derivative is not None else None
    return ScalarMap(
        eval=partial(evaluate, mapdef.body),
        deriv=deriv,
        breakpoints=mapdef.breakpoints,
        label=mapdef.name,
    )


def compose_k(f: ScalarMap, k: int) -> ScalarMap:
    """The k-fold iterate of *f*; its derivative is the chain-rule product."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    def g(x):
        for _ in range(k):
            x = f.eval(x)
        return x

    dg = None
    if f.deriv is not None:
        def dg(x):
            prod = 1.0
            for _ in range(k):
                prod *= f.deriv(x)
                x = f.eval(x)
            return prod

    return ComposedMap(eval=g, deriv=dg, label=f"{f.label}^{k}", notes=f.notes, base=f, k=k)


@dataclass(frozen=True)
class VectorMap:
    dimension: int
    eval: Callable[[np.ndarray], np.ndarray]
    label: str = "f"
    diagonal: Optional[tuple[float, ...]] = None

    def __call__(self, v):
        return self.eval(np.asarray(v, dtype=float))

    @staticmethod
    def norm(v) -> float:
        return float(np.linalg.norm(v))


def linear_vector_map(diagonal) -> VectorMap:
    """``v -> diag(d) v``. Its Euclidean Lipschitz constant is ``max|d_i|``
    and its reverse Lipschitz constant ``min|d_i|``."""
    d = np.asarray(diagonal, dtype=float)
    if d.ndim != 1 or d.size < 1:
        raise ValueError("diagonal must be a non-empty 1-D sequence")
    return VectorMap(
        dimension=d.size,
        eval=lambda v: d * v,
        label="diag(" + ", ".join(f"{x:g}" for x in d) + ")",
        diagonal=tuple(float(x) for x in d),
    )


def lipschitz_bounds(vmap: VectorMap) -> tuple[float, float]:
    """Exact (Lipschitz, reverse Lipschitz) constants of a diagonal map."""
    if vmap.diagonal is None:
        raise ValueError("exact constants are only known for diagonal linear maps")
    mags = [abs(x) for x in vmap.diagonal]
    return max(mags), min(mags)
