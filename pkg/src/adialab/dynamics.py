"""Time-dependent Schrodinger integration of the reduced two-level system.

The state obeys i * dpsi/dt = H(t/T) * psi over t in [0, T], starting from
the initial-Hamiltonian ground state |1>.  Stepping is classic fourth-order
Runge-Kutta with step-halving error control: each accepted step keeps the
two-half-step solution, whose error is estimated from the difference against
the single full step.

Success is measured as fidelity against the solution state a|1> + b|2>,
which is exactly the final Hamiltonian's ground state, so no eigenvector
phase convention enters the measurement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Overlap, StateVector2, beta_state
from .errors import DomainError, ResourceLimitError
from .paths import PathModel, entry_function

DEFAULT_STEP_TOL = 1e-10  # allowed local error per unit time
DEFAULT_MAX_STEPS = 10_000_000
DEFAULT_T_CEILING = float(2**20)
TRAJECTORY_SAMPLES = 201

_SAFETY = 0.9
_MIN_SHRINK = 0.2
_MAX_GROW = 5.0


@dataclass(frozen=True)
class EvolutionResult:
    final_state: StateVector2
    fidelity: float
    total_time: float
    norm_drift: float
    trajectory: tuple[tuple[float, StateVector2], ...] | None = None


def _rk4_step(entries, c1, c2, t, h, inv_total):
    """One fourth-order step of psi' = -i H(t / T) psi."""
    h11, h12, h22 = entries(t * inv_total)
    k1a = -1j * (h11 * c1 + h12 * c2)
    k1b = -1j * (h12.conjugate() * c1 + h22 * c2)

    half = 0.5 * h
    h11, h12, h22 = entries((t + half) * inv_total)
    y1 = c1 + half * k1a
    y2 = c2 + half * k1b
    k2a = -1j * (h11 * y1 + h12 * y2)
    k2b = -1j * (h12.conjugate() * y1 + h22 * y2)

    y1 = c1 + half * k2a
    y2 = c2 + half * k2b
    k3a = -1j * (h11 * y1 + h12 * y2)
    k3b = -1j * (h12.conjugate() * y1 + h22 * y2)

    h11, h12, h22 = entries((t + h) * inv_total)
    y1 = c1 + h * k3a
    y2 = c2 + h * k3b
    k4a = -1j * (h11 * y1 + h12 * y2)
    k4b = -1j * (h12.conjugate() * y1 + h22 * y2)

    sixth = h / 6.0
    return (
        c1 + sixth * (k1a + 2.0 * (k2a + k3a) + k4a),
        c2 + sixth * (k1b + 2.0 * (k2b + k3b) + k4b),
    )


def _fidelity(o: Overlap, c1: complex, c2: complex) -> float:
    target = beta_state(o)
    amp = target.c1.conjugate() * c1 + target.c2.conjugate() * c2
    fid = amp.real * amp.real + amp.imag * amp.imag
    return min(max(fid, 0.0), 1.0)


def evolve(
    model: PathModel,
    o: Overlap,
    total_time: float,
    step_tol: float = DEFAULT_STEP_TOL,
    max_steps: int = DEFAULT_MAX_STEPS,
    sample_trajectory: bool = False,
    initial_state: StateVector2 | None = None,
) -> EvolutionResult:
    """Integrate the reduced dynamics over [0, total_time].

    ``step_tol`` is the allowed local error per unit time.  ``initial_state``
    defaults to |1>; overriding it exists chiefly to probe gauge robustness.
    Exceeding ``max_steps`` raises ResourceLimitError whose ``partial``
    attribute carries (time reached, state).
    """
    if total_time <= 0.0:
        raise DomainError("evolution time must be positive")
    if step_tol <= 0.0:
        raise DomainError("step tolerance must be positive")

    entries = entry_function(model, o)
    inv_total = 1.0 / total_time
    if initial_state is None:
        c1, c2 = complex(1.0), complex(0.0)
    else:
        c1, c2 = complex(initial_state.c1), complex(initial_state.c2)

    sample_times: list[float] = []
    trajectory: list[tuple[float, StateVector2]] | None = None
    if sample_trajectory:
        sample_times = [total_time * k / (TRAJECTORY_SAMPLES - 1) for k in range(TRAJECTORY_SAMPLES)]
        trajectory = [(0.0, StateVector2(c1, c2))]
        next_sample = 1
    else:
        next_sample = 0

    t = 0.0
    h = min(0.01, total_time)
    time_floor = 1e-14 * total_time  # remainder below resolvable step size
    attempts = 0
    while total_time - t > time_floor:
        trial_h = min(h, total_time - t)
        if sample_trajectory and next_sample < TRAJECTORY_SAMPLES:
            gap_to_sample = sample_times[next_sample] - t
            if gap_to_sample > time_floor:
                trial_h = min(trial_h, gap_to_sample)
        attempts += 1
        if attempts > max_steps:
            raise ResourceLimitError(
                f"integration exceeded {max_steps} step attempts at t={t}",
                partial=(t, StateVector2(c1, c2)),
            )

        full1, full2 = _rk4_step(entries, c1, c2, t, trial_h, inv_total)
        half = 0.5 * trial_h
        m1, m2 = _rk4_step(entries, c1, c2, t, half, inv_total)
        n1, n2 = _rk4_step(entries, m1, m2, t + half, half, inv_total)
        err = max(abs(n1 - full1), abs(n2 - full2)) / 15.0
        allowed = step_tol * trial_h
        if err <= allowed:
            c1, c2 = n1, n2
            t += trial_h
            if sample_trajectory:
                while next_sample < TRAJECTORY_SAMPLES and t >= sample_times[next_sample] - time_floor:
                    trajectory.append((sample_times[next_sample], StateVector2(c1, c2)))
                    next_sample += 1
        if err > 0.0:
            factor = _SAFETY * (allowed / err) ** 0.25
            h = trial_h * min(max(factor, _MIN_SHRINK), _MAX_GROW)
        else:
            h = trial_h * _MAX_GROW

    if sample_trajectory:
        while next_sample < TRAJECTORY_SAMPLES:
            trajectory.append((sample_times[next_sample], StateVector2(c1, c2)))
            next_sample += 1

    norm_sq = abs(c1) ** 2 + abs(c2) ** 2
    return EvolutionResult(
        final_state=StateVector2(c1, c2),
        fidelity=_fidelity(o, c1, c2),
        total_time=total_time,
        norm_drift=abs(norm_sq - 1.0),
        trajectory=tuple(trajectory) if trajectory is not None else None,
    )


def evolve_fixed_steps(model: PathModel, o: Overlap, total_time: float, n_steps: int) -> EvolutionResult:
    """Uniform-step integration; exposes the raw fourth-order convergence."""
    if total_time <= 0.0:
        raise DomainError("evolution time must be positive")
    if n_steps < 1:
        raise DomainError("n_steps must be >= 1")
    entries = entry_function(model, o)
    inv_total = 1.0 / total_time
    h = total_time / n_steps
    c1, c2 = complex(1.0), complex(0.0)
    for k in range(n_steps):
        c1, c2 = _rk4_step(entries, c1, c2, k * h, h, inv_total)
    norm_sq = abs(c1) ** 2 + abs(c2) ** 2
    return EvolutionResult(
        final_state=StateVector2(c1, c2),
        fidelity=_fidelity(o, c1, c2),
        total_time=total_time,
        norm_drift=abs(norm_sq - 1.0),
    )


def find_constant_time(
    model: PathModel,
    o: Overlap,
    target_fidelity: float,
    step_tol: float = DEFAULT_STEP_TOL,
    t_ceiling: float = DEFAULT_T_CEILING,
) -> float | None:
    """Smallest evolution time reaching the target fidelity, or None.

    Doubling search upward from T = 1 until the target is met, then bisection
    of the bracketing interval to three significant figures.  Returns None
    (unreachable) when the target is still unmet at ``t_ceiling``; that is
    the expected outcome for paths with a level crossing.
    """
    if not 0.0 < target_fidelity < 1.0:
        raise DomainError("target fidelity must lie in (0, 1)")

    def reached(t: float) -> bool:
        return evolve(model, o, t, step_tol=step_tol).fidelity >= target_fidelity

    t_hi = 1.0
    if reached(t_hi):
        return t_hi
    while True:
        t_hi *= 2.0
        if t_hi > t_ceiling:
            return None
        if reached(t_hi):
            break

    t_lo = 0.5 * t_hi
    while (t_hi - t_lo) > 1e-3 * t_hi:
        mid = 0.5 * (t_lo + t_hi)
        if reached(mid):
            t_hi = mid
        else:
            t_lo = mid
    return t_hi
