"""Spectral analysis of the path models.

The grid scan computes every quantity with the generic eigensolver oracle;
the closed-form eigenvalue expressions are treated as claims under test and
checked against that oracle by :func:`validate_closed_forms`, never used as
the source of truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core import Hermitian2, Overlap, eigensystem
from .errors import DomainError, NumericError
from .paths import (
    Driving,
    General,
    Linear,
    PathModel,
    Shifted,
    _shift,
    assemble_derivative,
    entry_function,
    eval_interpolants,
)

DEFAULT_N_POINTS = 1001

# Profiles whose refined minimum gap dips below this are treated as true
# level crossings; separates exact zeros from small-but-positive gaps at the
# overlap magnitudes exercised here.
PROFILE_DEGENERACY_TOL = 1e-9

# Below this gap the eigenvector pair is arbitrary, so the sandwiched rate
# is meaningless and recorded as zero.
POINT_DEGENERACY_TOL = 1e-14

_RADICAND_TOL = 1e-12
_GOLDEN_S_TOL = 1e-12
_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SpectralPoint:
    s: float
    e0: float
    e1: float
    gap: float
    ground_energy: float
    rate: float


@dataclass(frozen=True)
class SpectralProfile:
    """Grid scan of a path model plus refined extrema.

    ``delta_min`` / ``s_star`` are golden-section refinements inside the
    bracketing grid cells, so ``delta_min`` may sit slightly below the
    smallest on-grid gap.  ``delta_max`` is the largest evolving-rate matrix
    element over the grid; ``peak_ground_energy`` is the refined maximum of
    the ground level.
    """

    points: tuple[SpectralPoint, ...]
    delta_min: float
    s_star: float
    delta_max: float
    peak_ground_energy: float
    s_peak: float
    degenerate: bool


def _sqrt_clamped(radicand: float) -> float:
    if radicand < -_RADICAND_TOL:
        raise NumericError(f"negative radicand {radicand} in closed-form spectrum")
    return math.sqrt(radicand) if radicand > 0.0 else 0.0


def closed_form_spectrum(model: PathModel, o: Overlap, s: float) -> tuple[float, float]:
    """Ground and first-excited eigenvalues from the published closed forms.

    These are the expressions under test; see :func:`validate_closed_forms`
    for the comparison against the eigensolver oracle.
    """
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"path parameter s={s!r} outside [0, 1]")
    if isinstance(model, Driving):
        re_a = o.a.real
        im_a = o.a.imag
        window = s * (1.0 - s)
        mean = 1.0 + 2.0 * window * re_a
        radicand = 1.0 - 4.0 * window * (re_a + o.b * o.b + window * im_a * im_a - window)
        spread = _sqrt_clamped(radicand)
        return 0.5 * (mean - spread), 0.5 * (mean + spread)
    if isinstance(model, Linear):
        f, g = 1.0 - s, s
    elif isinstance(model, (General, Shifted)):
        f, g = eval_interpolants(model.spec, s)
    else:
        raise TypeError(f"unknown path model {model!r}")
    m = abs(o.a) ** 2
    spread = _sqrt_clamped((f - g) ** 2 + 4.0 * f * g * m)
    e0 = 0.5 * (f + g - spread)
    e1 = 0.5 * (f + g + spread)
    if isinstance(model, Shifted):
        h = _shift(f, g)
        return e0 - h, e1 - h
    return e0, e1


def _oracle_levels(entries: Callable[[float], tuple[float, complex, float]], s: float) -> tuple[float, float]:
    h11, h12, h22 = entries(s)
    mean = 0.5 * (h11 + h22)
    disc = math.hypot(0.5 * (h11 - h22), abs(h12))
    return mean - disc, mean + disc


def _local_extrema_cells(values: list[float], minimize: bool) -> list[int]:
    """Indices of strict local extrema (plus the global one) worth refining."""
    n = len(values)
    sign = 1.0 if minimize else -1.0
    vals = [sign * v for v in values]
    best = min(range(n), key=lambda i: (vals[i], i))
    hits = {best}
    for i in range(n):
        left_ok = i == 0 or vals[i] <= vals[i - 1]
        right_ok = i == n - 1 or vals[i] <= vals[i + 1]
        strict = (i > 0 and vals[i] < vals[i - 1]) or (i < n - 1 and vals[i] < vals[i + 1])
        if left_ok and right_ok and strict:
            hits.add(i)
    ordered = sorted(hits, key=lambda i: (vals[i], i))
    return ordered[:32]


def _golden_minimize(fn: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    """Derivative-free minimum of fn on [lo, hi]; returns (s, fn(s))."""
    evaluations = [(fn(lo), lo), (fn(hi), hi)]
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    f1 = fn(x1)
    f2 = fn(x2)
    evaluations.append((f1, x1))
    evaluations.append((f2, x2))
    while hi - lo > _GOLDEN_S_TOL:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_GOLDEN * (hi - lo)
            f1 = fn(x1)
            evaluations.append((f1, x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_GOLDEN * (hi - lo)
            f2 = fn(x2)
            evaluations.append((f2, x2))
    best_f, best_x = min(evaluations, key=lambda t: (t[0], t[1]))
    return best_x, best_f


def _refined_extremum(
    fn: Callable[[float], float],
    svals: list[float],
    grid_values: list[float],
    minimize: bool,
) -> tuple[float, float]:
    """Global extremum of fn over [0, 1]: grid values plus refined cells."""
    sign = 1.0 if minimize else -1.0
    target = fn if minimize else (lambda s: -fn(s))
    candidates = [(sign * v, s) for v, s in zip(grid_values, svals)]
    n = len(svals)
    for i in _local_extrema_cells(grid_values, minimize):
        lo = svals[max(i - 1, 0)]
        hi = svals[min(i + 1, n - 1)]
        s_best, v_best = _golden_minimize(target, lo, hi)
        candidates.append((v_best, s_best))
    value, s = min(candidates, key=lambda t: (t[0], t[1]))
    return sign * value, s


def scan(model: PathModel, o: Overlap, n_points: int = DEFAULT_N_POINTS) -> SpectralProfile:
    """Uniform-grid spectral scan with refined minimum gap and peak energy.

    Every point is computed with the eigensolver oracle; the evolving rate is
    the derivative matrix sandwiched between the oracle eigenvectors, zeroed
    (and flagged through ``degenerate``) wherever the levels touch.
    """
    if n_points < 2:
        raise DomainError("scan requires n_points >= 2")
    entries = entry_function(model, o)
    span = n_points - 1
    svals = [i / span for i in range(n_points)]

    points: list[SpectralPoint] = []
    gaps: list[float] = []
    grounds: list[float] = []
    delta_max = 0.0
    for s in svals:
        h11, h12, h22 = entries(s)
        eig = eigensystem(Hermitian2(h11, h22, h12))
        if eig.gap <= POINT_DEGENERACY_TOL:
            rate = 0.0
        else:
            deriv, _ = assemble_derivative(model, o, s)
            rate = abs(eig.v1.inner(deriv.apply(eig.v0)))
        if rate > delta_max:
            delta_max = rate
        points.append(SpectralPoint(s, eig.e0, eig.e1, eig.gap, eig.e0, rate))
        gaps.append(eig.gap)
        grounds.append(eig.e0)

    def gap_at(s: float) -> float:
        lo, hi = _oracle_levels(entries, s)
        return hi - lo

    def ground_at(s: float) -> float:
        return _oracle_levels(entries, s)[0]

    delta_min, s_star = _refined_extremum(gap_at, svals, gaps, minimize=True)
    peak_energy, s_peak = _refined_extremum(ground_at, svals, grounds, minimize=False)

    return SpectralProfile(
        points=tuple(points),
        delta_min=delta_min,
        s_star=s_star,
        delta_max=delta_max,
        peak_ground_energy=peak_energy,
        s_peak=s_peak,
        degenerate=delta_min <= PROFILE_DEGENERACY_TOL,
    )


def validate_closed_forms(model: PathModel, o: Overlap, n_points: int = DEFAULT_N_POINTS) -> float:
    """Max absolute eigenvalue discrepancy, closed form vs oracle, over a grid."""
    if n_points < 2:
        raise DomainError("validate_closed_forms requires n_points >= 2")
    entries = entry_function(model, o)
    span = n_points - 1
    worst = 0.0
    for i in range(n_points):
        s = i / span
        c0, c1 = closed_form_spectrum(model, o, s)
        h11, h12, h22 = entries(s)
        eig = eigensystem(Hermitian2(h11, h22, h12))
        worst = max(worst, abs(c0 - eig.e0), abs(c1 - eig.e1))
    return worst


def peak_ground_energy(model: PathModel, o: Overlap, n_points: int = DEFAULT_N_POINTS) -> tuple[float, float]:
    """Refined maximum of the ground level and its location."""
    if n_points < 2:
        raise DomainError("peak_ground_energy requires n_points >= 2")
    entries = entry_function(model, o)
    span = n_points - 1
    svals = [i / span for i in range(n_points)]

    def ground_at(s: float) -> float:
        return _oracle_levels(entries, s)[0]

    grounds = [ground_at(s) for s in svals]
    return _refined_extremum(ground_at, svals, grounds, minimize=False)
