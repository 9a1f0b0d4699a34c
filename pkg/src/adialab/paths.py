"""Interpolation path models between the two projector Hamiltonians.

Four path families are supported, all expressed as 2x2 Hermitian matrices in
the reduced basis:

* ``Linear``     -- plain (1-s, s) blend of the endpoint Hamiltonians.
* ``Driving``    -- linear blend plus an s(1-s)-windowed coupling term that
  swaps population between the initial and solution states mid-evolution.
* ``General``    -- blend with user-chosen weight functions f(s), g(s).
* ``Shifted``    -- the general blend minus min(f, g) times the identity,
  which pins the ground-state energy at zero when the overlap vanishes.

Weight functions carry the boundary conditions f(0)=g(1)=1, f(1)=g(0)=0 so
every model starts at the initial Hamiltonian and ends at the final one.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .core import Hermitian2, Overlap
from .errors import DomainError

_BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class PolynomialX:
    """f(s) = 1 - s + x*s*(1-s) and g(s) = s + x*s*(1-s).

    A single curvature parameter ``x``; x = 0 reduces both weights to the
    linear blend.  Any real x is accepted, negative values included.
    """

    x: float


@dataclass(frozen=True)
class PiecewiseLinear:
    """Piecewise-linear weight pair sampled at shared breakpoints.

    ``points`` holds (s, f, g) triples with s strictly increasing from 0 to
    1.  Endpoint values must satisfy the boundary conditions to 1e-12.
    """

    points: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        pts = tuple((float(s), float(f), float(g)) for s, f, g in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise DomainError("piecewise spec needs at least 2 points")
        svals = [p[0] for p in pts]
        if any(b <= a for a, b in zip(svals, svals[1:])):
            raise DomainError("piecewise breakpoints must be strictly increasing")
        if svals[0] != 0.0 or svals[-1] != 1.0:
            raise DomainError("piecewise spec must start at s=0 and end at s=1")
        _, f0, g0 = pts[0]
        _, f1, g1 = pts[-1]
        if (
            abs(f0 - 1.0) > _BOUNDARY_TOL
            or abs(g0) > _BOUNDARY_TOL
            or abs(f1) > _BOUNDARY_TOL
            or abs(g1 - 1.0) > _BOUNDARY_TOL
        ):
            raise DomainError("weight functions must satisfy f(0)=g(1)=1, f(1)=g(0)=0")


InterpolantSpec = Union[PolynomialX, PiecewiseLinear]


@dataclass(frozen=True)
class Linear:
    pass


@dataclass(frozen=True)
class Driving:
    pass


@dataclass(frozen=True)
class General:
    spec: InterpolantSpec


@dataclass(frozen=True)
class Shifted:
    spec: InterpolantSpec


PathModel = Union[Linear, Driving, General, Shifted]


def _check_s(s: float) -> None:
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"path parameter s={s!r} outside [0, 1]")


def eval_interpolants(spec: InterpolantSpec, s: float) -> tuple[float, float]:
    """Evaluate the weight pair (f(s), g(s)) of a spec."""
    _check_s(s)
    if isinstance(spec, PolynomialX):
        window = spec.x * s * (1.0 - s)
        return 1.0 - s + window, s + window
    pts = spec.points
    svals = [p[0] for p in pts]
    i = bisect_right(svals, s) - 1
    if i >= len(pts) - 1:
        return pts[-1][1], pts[-1][2]
    s0, f0, g0 = pts[i]
    s1, f1, g1 = pts[i + 1]
    w = (s - s0) / (s1 - s0)
    return f0 + w * (f1 - f0), g0 + w * (g1 - g0)


def _interpolant_slopes(spec: InterpolantSpec, s: float) -> tuple[float, float, bool]:
    """Right-hand slopes (f', g') at s plus a breakpoint-kink flag."""
    if isinstance(spec, PolynomialX):
        bend = spec.x * (1.0 - 2.0 * s)
        return -1.0 + bend, 1.0 + bend, False
    pts = spec.points
    svals = [p[0] for p in pts]
    i = bisect_right(svals, s) - 1
    if i >= len(pts) - 1:
        i = len(pts) - 2  # s = 1: use the final segment
    s0, f0, g0 = pts[i]
    s1, f1, g1 = pts[i + 1]
    ds = s1 - s0
    kink = s == s0 and 0 < i < len(pts) - 1
    return (f1 - f0) / ds, (g1 - g0) / ds, kink


# --- matrix assembly -------------------------------------------------------
#
# In the reduced basis the initial Hamiltonian is diag(0, 1) and the final
# one is [[b^2, -a b], [-conj(a) b, |a|^2]].  The general blend f*Hi + g*Hf
# therefore has entries (g b^2, -g a b, f + g |a|^2); the driving model adds
# the coupling s(1-s) * [[2 Re a, b], [b, 0]].


def _general_entries(f: float, g: float, o: Overlap) -> tuple[float, complex, float]:
    m = abs(o.a) ** 2
    return g * o.b * o.b, -g * o.a * o.b, f + g * m


def _linear_entries(o: Overlap, s: float) -> tuple[float, complex, float]:
    return _general_entries(1.0 - s, s, o)


def _driving_entries(o: Overlap, s: float) -> tuple[float, complex, float]:
    bb = o.b * o.b
    window = s * (1.0 - s)
    h11 = s * bb + 2.0 * window * o.a.real
    h12 = s * o.b * (1.0 - s - o.a)
    h22 = 1.0 - s * bb
    return h11, h12, h22


def _shift(f: float, g: float) -> float:
    # Algebraically min(f, g); written this way so the matrix matches the
    # shifted-model definition entry for entry.
    return 0.5 * (f + g - abs(f - g))


def _entries(model: PathModel, o: Overlap, s: float) -> tuple[float, complex, float]:
    if isinstance(model, Linear):
        return _linear_entries(o, s)
    if isinstance(model, Driving):
        return _driving_entries(o, s)
    if isinstance(model, General):
        f, g = eval_interpolants(model.spec, s)
        return _general_entries(f, g, o)
    if isinstance(model, Shifted):
        f, g = eval_interpolants(model.spec, s)
        h11, h12, h22 = _general_entries(f, g, o)
        h = _shift(f, g)
        return h11 - h, h12, h22 - h
    raise TypeError(f"unknown path model {model!r}")


def entry_function(model: PathModel, o: Overlap) -> Callable[[float], tuple[float, complex, float]]:
    """Specialized closure returning (h11, h12, h22) at a given s.

    Hoists the model dispatch out of inner loops (ODE stepping, grid scans);
    the closure assumes 0 <= s <= 1.
    """
    if isinstance(model, Linear):
        return lambda s: _linear_entries(o, s)
    if isinstance(model, Driving):
        return lambda s: _driving_entries(o, s)
    if isinstance(model, General):
        spec = model.spec

        def general(s: float) -> tuple[float, complex, float]:
            f, g = eval_interpolants(spec, s)
            return _general_entries(f, g, o)

        return general
    if isinstance(model, Shifted):
        spec = model.spec

        def shifted(s: float) -> tuple[float, complex, float]:
            f, g = eval_interpolants(spec, s)
            h11, h12, h22 = _general_entries(f, g, o)
            h = _shift(f, g)
            return h11 - h, h12, h22 - h

        return shifted
    raise TypeError(f"unknown path model {model!r}")


def assemble(model: PathModel, o: Overlap, s: float) -> Hermitian2:
    """The instantaneous Hamiltonian of a path model at parameter s."""
    _check_s(s)
    h11, h12, h22 = _entries(model, o, s)
    return Hermitian2(h11, h22, h12)


def assemble_derivative(model: PathModel, o: Overlap, s: float) -> tuple[Hermitian2, bool]:
    """Entrywise analytic d/ds of :func:`assemble` at s.

    Returns the matrix together with a kink flag.  At a piecewise breakpoint,
    or where the shifted model's |f-g| term changes sign, the right-hand
    derivative is reported and the flag is set.
    """
    _check_s(s)
    m = abs(o.a) ** 2
    bb = o.b * o.b
    if isinstance(model, Linear):
        return Hermitian2(bb, -1.0 + m, -o.a * o.b), False
    if isinstance(model, Driving):
        d11 = bb + 2.0 * (1.0 - 2.0 * s) * o.a.real
        d12 = o.b * (1.0 - 2.0 * s - o.a)
        return Hermitian2(d11, -bb, d12), False
    if isinstance(model, General):
        df, dg, kink = _interpolant_slopes(model.spec, s)
        return Hermitian2(dg * bb, df + dg * m, -dg * o.a * o.b), kink
    if isinstance(model, Shifted):
        f, g = eval_interpolants(model.spec, s)
        df, dg, kink = _interpolant_slopes(model.spec, s)
        diff = f - g
        if diff > 0.0:
            sign = 1.0
        elif diff < 0.0:
            sign = -1.0
        else:
            # Right-hand limit of sign(f - g) follows the slope difference.
            slope_diff = df - dg
            sign = math.copysign(1.0, slope_diff) if slope_diff != 0.0 else 0.0
            kink = kink or slope_diff != 0.0
        dh = 0.5 * (df + dg - sign * (df - dg))
        return Hermitian2(dg * bb - dh, df + dg * m - dh, -dg * o.a * o.b), kink
    raise TypeError(f"unknown path model {model!r}")


def driving_budget(o: Overlap, grid: Sequence[float]) -> float:
    """Peak operator norm of the windowed coupling term over an s-grid.

    The coupling matrix is [[2 Re a, b], [b, 0]] with spectral norm
    |Re a| + hypot(Re a, b); the window s(1-s) is maximized over the grid.
    """
    if len(grid) == 0:
        raise DomainError("driving_budget requires a non-empty grid")
    norm = abs(o.a.real) + math.hypot(o.a.real, o.b)
    peak_window = max(s * (1.0 - s) for s in grid)
    return peak_window * norm
