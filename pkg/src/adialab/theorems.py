"""Numerical certification of the two failure results at zero overlap.

First result: for any continuous weight pair obeying the boundary
conditions, the difference f(s) - g(s) moves from +1 to -1 and must cross
zero, which closes the spectral gap of the general blend when the overlap
vanishes.  The checker finds that crossing by bisection (only continuity is
guaranteed, so no derivative-based method is used) and confirms the gap and
the unbounded runtime verdict.

Second result: subtracting min(f, g) times the identity keeps the ground
energy at zero, yet the same crossing still closes the gap, so the shifted
model fails as well.

Both checks run as fuzzing campaigns over randomly generated admissible
piecewise-linear weight pairs.  The campaigns certify the statements
numerically on sampled interpolants at fixed tolerances; they are not
symbolic proofs.  Note the statements require continuity of the weights,
which the spec types enforce by construction (discontinuous weight pairs
are not expressible).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Overlap, eigensystem, make_overlap
from .errors import DomainError, NumericError
from .paths import (
    General,
    InterpolantSpec,
    PiecewiseLinear,
    Shifted,
    assemble,
    eval_interpolants,
)
from .schedule import DEFAULT_EPSILON, runtime_global
from .spectra import scan

F_ROOT_TOL = 1e-12
GAP_AT_ROOT_TOL = 1e-10
MAX_BISECTION_ITERATIONS = 60

# Campaign grids resolve every generated breakpoint (minimum separation
# 0.02) while keeping thousand-trial runs fast.
CAMPAIGN_N_POINTS = 301

# Random admissible weights: interior values above 1 are allowed on purpose;
# the statements need only continuity plus the boundary conditions.
_VALUE_HI = 1.5
_MIN_BREAK_SEPARATION = 0.02
_MAX_INTERIOR_BREAKS = 6


@dataclass(frozen=True)
class CrossingReport:
    s_root: float
    f_minus_g_at_root: float
    gap_at_root: float
    bisection_iterations: int


@dataclass(frozen=True)
class VariantReport:
    """Zero-overlap check of the energy-shifted model for one weight pair."""

    h_at_0: float
    h_at_1: float
    max_ground_energy: float
    delta_min: float
    crossing: CrossingReport
    unbounded: bool


@dataclass(frozen=True)
class CrossingTrial:
    index: int
    crossing: CrossingReport
    unbounded: bool


def find_gap_crossing(spec: InterpolantSpec) -> CrossingReport:
    """Locate a zero of f(s) - g(s) by bisection and report the gap there.

    The boundary conditions pin f(0)-g(0) = 1 and f(1)-g(1) = -1, so a sign
    change is certified and bisection always converges.  The gap is then
    evaluated through the eigensolver oracle on the general blend at zero
    overlap, where it equals |f - g|.
    """

    def balance(s: float) -> float:
        f, g = eval_interpolants(spec, s)
        return f - g

    lo, hi = 0.0, 1.0
    f_lo = balance(lo)
    f_hi = balance(hi)
    if not (f_lo > 0.0 > f_hi):
        raise DomainError("weight pair violates the boundary conditions")

    root = None
    value = None
    iterations = 0
    for iterations in range(1, MAX_BISECTION_ITERATIONS + 1):
        mid = 0.5 * (lo + hi)
        f_mid = balance(mid)
        if abs(f_mid) <= F_ROOT_TOL:
            root, value = mid, f_mid
            break
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
    if root is None:
        raise NumericError(
            f"bisection did not reach |f-g| <= {F_ROOT_TOL} in "
            f"{MAX_BISECTION_ITERATIONS} iterations"
        )

    zero = make_overlap(0.0, 0.0)
    gap = eigensystem(assemble(General(spec), zero, root)).gap
    return CrossingReport(root, value, gap, iterations)


def verify_variant(
    spec: InterpolantSpec,
    n_points: int = CAMPAIGN_N_POINTS,
    overlap: Overlap | None = None,
) -> VariantReport:
    """Check the shifted model at zero overlap for one weight pair.

    Confirms the shift vanishes at both endpoints, the ground energy stays at
    zero across the scan, the crossing closes the gap, and the global runtime
    verdict is unbounded.  Only the zero-overlap hypothesis is accepted here;
    for nonzero overlaps use a plain spectral scan of the shifted model.
    """
    if overlap is not None and abs(overlap.a) != 0.0:
        raise DomainError(
            "the shifted-model check applies at zero overlap only; "
            "scan a Shifted model in spectra for nonzero overlaps"
        )
    zero = make_overlap(0.0, 0.0)

    f0, g0 = eval_interpolants(spec, 0.0)
    f1, g1 = eval_interpolants(spec, 1.0)
    h_at_0 = 0.5 * (f0 + g0 - abs(f0 - g0))
    h_at_1 = 0.5 * (f1 + g1 - abs(f1 - g1))

    crossing = find_gap_crossing(spec)
    profile = scan(Shifted(spec), zero, n_points)
    verdict = runtime_global(profile, DEFAULT_EPSILON)

    return VariantReport(
        h_at_0=h_at_0,
        h_at_1=h_at_1,
        max_ground_energy=profile.peak_ground_energy,
        delta_min=min(profile.delta_min, crossing.gap_at_root),
        crossing=crossing,
        unbounded=not verdict.finite,
    )


def random_interpolant(rng: np.random.Generator) -> PiecewiseLinear:
    """Random admissible piecewise-linear weight pair.

    Interior breakpoints are kept at least 0.02 apart so segment slopes stay
    bounded and bisection lands within tolerance of an exact crossing.
    """
    k = int(rng.integers(1, _MAX_INTERIOR_BREAKS + 1))
    while True:
        positions = np.sort(rng.uniform(0.0, 1.0, size=k))
        edges = np.concatenate(([0.0], positions, [1.0]))
        if np.min(np.diff(edges)) >= _MIN_BREAK_SEPARATION:
            break
    f_vals = rng.uniform(0.0, _VALUE_HI, size=k)
    g_vals = rng.uniform(0.0, _VALUE_HI, size=k)
    points = [(0.0, 1.0, 0.0)]
    points.extend((float(s), float(f), float(g)) for s, f, g in zip(positions, f_vals, g_vals))
    points.append((1.0, 0.0, 1.0))
    return PiecewiseLinear(tuple(points))


def _case_rng(seed: int, index: int) -> np.random.Generator:
    # Seed-per-case derivation keeps campaigns reproducible regardless of
    # execution order or worker count.
    return np.random.default_rng([seed, index])


def _crossing_case(seed: int, index: int, n_points: int) -> CrossingTrial:
    spec = random_interpolant(_case_rng(seed, index))
    crossing = find_gap_crossing(spec)
    profile = scan(General(spec), make_overlap(0.0, 0.0), n_points)
    verdict = runtime_global(profile, DEFAULT_EPSILON)
    return CrossingTrial(index, crossing, not verdict.finite)


def _variant_case(seed: int, index: int, n_points: int) -> VariantReport:
    spec = random_interpolant(_case_rng(seed, index))
    return verify_variant(spec, n_points)


def run_crossing_campaign(
    trials: int,
    seed: int,
    n_points: int = CAMPAIGN_N_POINTS,
    workers: int = 1,
) -> list[CrossingTrial]:
    """Fuzz the gap-crossing statement over random admissible weight pairs."""
    return _run_campaign(_crossing_case, trials, seed, n_points, workers)


def run_variant_campaign(
    trials: int,
    seed: int,
    n_points: int = CAMPAIGN_N_POINTS,
    workers: int = 1,
) -> list[VariantReport]:
    """Fuzz the shifted-model statement over random admissible weight pairs."""
    return _run_campaign(_variant_case, trials, seed, n_points, workers)


def _run_campaign(case_fn, trials: int, seed: int, n_points: int, workers: int) -> list:
    if trials < 1:
        raise DomainError("campaigns need at least one trial")
    if seed < 0 or seed > 2**64 - 1:
        raise DomainError("campaign seed must fit in 64 unsigned bits")
    if workers < 1:
        raise DomainError("workers must be a positive integer")
    indices = range(trials)
    if workers == 1:
        return [case_fn(seed, i, n_points) for i in indices]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: case_fn(seed, i, n_points), indices))


def campaign_verdict(reports: Sequence[CrossingTrial] | Sequence[VariantReport]) -> bool:
    """True when every trial satisfies the certified tolerances."""
    for rep in reports:
        if isinstance(rep, CrossingTrial):
            ok = rep.crossing.gap_at_root <= GAP_AT_ROOT_TOL and rep.unbounded
        else:
            ok = (
                rep.h_at_0 == 0.0
                and rep.h_at_1 == 0.0
                and rep.max_ground_energy <= 1e-12
                and rep.delta_min <= GAP_AT_ROOT_TOL
                and rep.unbounded
            )
        if not ok:
            return False
    return True
