"""Reduced two-dimensional representation of the search problem.

Both endpoint Hamiltonians are rank-one projectors, so all dynamics live in
the plane spanned by the initial state |1> and the orthogonalized remainder
|2> of the solution state.  This module holds the value types for that plane
plus a self-contained Hermitian 2x2 eigensolver that the rest of the package
uses as its ground-truth oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NumericError

# |a| may overshoot 1 by decimal-to-binary rounding of user input.
OVERLAP_CLAMP_TOL = 1e-12

# Below this gap the eigenvector pair is arbitrary and gets flagged.
DEGENERACY_TOL = 1e-14


@dataclass(frozen=True)
class Overlap:
    """Inner product between the initial and solution states.

    ``a`` is the complex overlap, ``b = sqrt(1 - |a|^2)`` the weight of the
    solution state outside the initial state.  Always build through
    :func:`make_overlap` so the invariants hold.
    """

    a: complex
    b: float

    @property
    def magnitude(self) -> float:
        return abs(self.a)


@dataclass(frozen=True)
class StateVector2:
    """Amplitudes on the reduced basis {|1>, |2>}."""

    c1: complex
    c2: complex

    def norm_sq(self) -> float:
        return (
            self.c1.real * self.c1.real
            + self.c1.imag * self.c1.imag
            + self.c2.real * self.c2.real
            + self.c2.imag * self.c2.imag
        )

    def inner(self, other: "StateVector2") -> complex:
        """<self|other> with the conjugate on self."""
        return self.c1.conjugate() * other.c1 + self.c2.conjugate() * other.c2


@dataclass(frozen=True)
class Hermitian2:
    """2x2 Hermitian matrix; only the upper triangle is stored.

    The (2,1) entry is implicitly ``conj(h12)``, so Hermiticity is
    structural rather than a runtime check.
    """

    h11: float
    h22: float
    h12: complex

    def apply(self, v: StateVector2) -> StateVector2:
        return StateVector2(
            self.h11 * v.c1 + self.h12 * v.c2,
            self.h12.conjugate() * v.c1 + self.h22 * v.c2,
        )

    def is_finite(self) -> bool:
        return (
            math.isfinite(self.h11)
            and math.isfinite(self.h22)
            and math.isfinite(self.h12.real)
            and math.isfinite(self.h12.imag)
        )


@dataclass(frozen=True)
class EigenSystem2:
    """Ordered eigenpairs of a Hermitian2: e0 <= e1, orthonormal v0, v1."""

    e0: float
    e1: float
    v0: StateVector2
    v1: StateVector2
    degenerate: bool = False

    @property
    def gap(self) -> float:
        return self.e1 - self.e0


def make_overlap(re: float, im: float) -> Overlap:
    """Build an Overlap from the real/imaginary parts of the inner product.

    Magnitudes overrunning 1 by at most ``OVERLAP_CLAMP_TOL`` (squared) are
    clamped back onto the unit circle; anything beyond is a domain error.
    """
    mag_sq = re * re + im * im
    if not math.isfinite(mag_sq):
        raise DomainError("overlap components must be finite")
    if mag_sq > 1.0 + OVERLAP_CLAMP_TOL:
        raise DomainError("overlap magnitude exceeds 1")
    if mag_sq > 1.0:
        scale = 1.0 / math.sqrt(mag_sq)
        return Overlap(complex(re * scale, im * scale), 0.0)
    return Overlap(complex(re, im), math.sqrt(1.0 - mag_sq))


def beta_state(o: Overlap) -> StateVector2:
    """The solution state a|1> + b|2>; unit norm by the Overlap invariant."""
    return StateVector2(o.a, complex(o.b))


def eigensystem(h: Hermitian2) -> EigenSystem2:
    """Full eigendecomposition of a Hermitian2.

    Eigenvalues come from the stable quadratic formula (mean of the trace
    plus/minus the discriminant via ``hypot``).  Eigenvectors are built from
    whichever cofactor column avoids cancellation, then normalized with the
    largest-magnitude component made real and non-negative so results are
    deterministic and comparable across a parameter grid.
    """
    if not h.is_finite():
        raise NumericError("eigensystem requires finite matrix entries")

    mean = 0.5 * (h.h11 + h.h22)
    half_diff = 0.5 * (h.h11 - h.h22)
    off = abs(h.h12)
    disc = math.hypot(half_diff, off)
    e0 = mean - disc
    e1 = mean + disc
    degenerate = (e1 - e0) <= DEGENERACY_TOL

    if disc <= 0.0:
        # Exactly proportional to the identity: any orthonormal pair works.
        return EigenSystem2(e0, e1, StateVector2(1.0, 0.0), StateVector2(0.0, 1.0), True)

    # Cofactor construction: both branches are cancellation-free and give an
    # exactly orthogonal pair before normalization.
    if half_diff >= 0.0:
        big = half_diff + disc
        v1_raw = (complex(big), h.h12.conjugate())
        v0_raw = (h.h12, complex(-big))
    else:
        big = disc - half_diff
        v0_raw = (complex(-big), h.h12.conjugate())
        v1_raw = (h.h12, complex(big))

    v0 = _normalized_with_phase(v0_raw)
    v1 = _normalized_with_phase(v1_raw)
    if v0 is None or v1 is None:
        return EigenSystem2(e0, e1, StateVector2(1.0, 0.0), StateVector2(0.0, 1.0), True)
    return EigenSystem2(e0, e1, v0, v1, degenerate)


def _normalized_with_phase(raw: tuple[complex, complex]) -> StateVector2 | None:
    c1, c2 = raw
    n1 = abs(c1)
    n2 = abs(c2)
    norm = math.hypot(n1, n2)
    if norm == 0.0:
        return None
    c1 /= norm
    c2 /= norm
    # Phase convention: largest-magnitude component real and non-negative.
    if n1 >= n2:
        phase = c1 / abs(c1)
    else:
        phase = c2 / abs(c2)
    conj_phase = phase.conjugate()
    return StateVector2(c1 * conj_phase, c2 * conj_phase)
