"""The unit 3-sphere as SU(2), cyclic group actions on it, and the induced
quotient distances on lens spaces.

A point (alpha, beta) in C^2 with |alpha|^2 + |beta|^2 = 1 corresponds to the
special unitary matrix [[alpha, -beta], [conj(beta), conj(alpha)]]. The order-n
cyclic action omega . (alpha, beta) = (omega alpha, omega^m beta) with
omega = exp(2 pi i / n) is free when gcd(n, m) = 1, and the orbit space is the
lens space L(n;m). All types here are immutable values and all operations are
pure functions.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "JoinCoordinates",
    "LensSpace",
    "SpherePoint",
    "eigenvalue_distance",
    "from_join",
    "group_action",
    "lens_distance",
    "sphere_distance",
    "to_join",
]

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class LensSpace:
    """The lens space L(n;m): group order n and twist parameter m.

    Requires gcd(n, m) = 1 and 1 <= m < n for n >= 2. n = 1 (with m = 1) is
    admitted as the 3-sphere itself, a useful Monte Carlo sanity case.
    """

    n: int
    m: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"group order must be >= 1, got n={self.n}")
        if self.n == 1:
            if self.m != 1:
                raise ValueError(f"n=1 requires m=1, got m={self.m}")
        elif not 1 <= self.m < self.n:
            raise ValueError(f"twist must satisfy 1 <= m < n, got m={self.m}, n={self.n}")
        if math.gcd(self.n, self.m) != 1:
            raise ValueError(
                f"the action is not free: gcd({self.n}, {self.m}) != 1"
            )

    def homogeneous(self) -> bool:
        """True iff the quotient metric is homogeneous (m = 1 or m = n - 1)."""
        return self.m == 1 or self.m == self.n - 1

    def volume(self) -> float:
        """Riemannian volume 2 pi^2 / n of the quotient."""
        return 2.0 * math.pi**2 / self.n


@dataclass(frozen=True)
class SpherePoint:
    """A point of S^3 in C^2 coordinates, normalized on construction."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        a = complex(self.alpha)
        b = complex(self.beta)
        norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if norm < 1e-150:
            raise ValueError("cannot normalize a (numerically) zero point")
        object.__setattr__(self, "alpha", a / norm)
        object.__setattr__(self, "beta", b / norm)

    @classmethod
    def from_cartesian(cls, x: float, y: float, z: float, w: float) -> "SpherePoint":
        return cls(complex(x, y), complex(z, w))

    @property
    def cartesian(self) -> tuple[float, float, float, float]:
        """(x, y, z, w) = (Re alpha, Im alpha, Re beta, Im beta)."""
        return (self.alpha.real, self.alpha.imag, self.beta.real, self.beta.imag)

    def su2(self) -> np.ndarray:
        """The corresponding SU(2) matrix [[alpha, -beta], [conj beta, conj alpha]]."""
        return np.array(
            [[self.alpha, -self.beta], [self.beta.conjugate(), self.alpha.conjugate()]]
        )


@dataclass(frozen=True)
class JoinCoordinates:
    """Join chart (theta1, theta2, eta) on S^3.

    alpha = e^(i theta1) cos(eta), beta = e^(i theta2) sin(eta), with
    theta1, theta2 in [-pi, pi) and eta in [0, pi/2]. The chart is injective
    for eta strictly inside (0, pi/2).
    """

    theta1: float
    theta2: float
    eta: float

    def __post_init__(self) -> None:
        if not -math.pi <= self.theta1 < math.pi:
            raise ValueError(f"theta1 must lie in [-pi, pi), got {self.theta1}")
        if not -math.pi <= self.theta2 < math.pi:
            raise ValueError(f"theta2 must lie in [-pi, pi), got {self.theta2}")
        if not 0.0 <= self.eta <= math.pi / 2:
            raise ValueError(f"eta must lie in [0, pi/2], got {self.eta}")


def from_join(c: JoinCoordinates) -> SpherePoint:
    """Point (e^(i theta1) cos eta, e^(i theta2) sin eta) of the join chart."""
    return SpherePoint(
        cmath.exp(1j * c.theta1) * math.cos(c.eta),
        cmath.exp(1j * c.theta2) * math.sin(c.eta),
    )


def _principal_angle(z: complex) -> float:
    # phase in [-pi, pi): cmath.phase returns (-pi, pi], fold the +pi endpoint
    phi = cmath.phase(z)
    return -math.pi if phi == math.pi else phi


def to_join(p: SpherePoint) -> JoinCoordinates:
    """Join coordinates of a point.

    At the chart-degenerate circles (eta = 0 or pi/2) the undetermined angle
    is set to 0 by convention.
    """
    ra = abs(p.alpha)
    rb = abs(p.beta)
    eta = math.atan2(rb, ra)
    theta1 = _principal_angle(p.alpha) if ra > 0.0 else 0.0
    theta2 = _principal_angle(p.beta) if rb > 0.0 else 0.0
    return JoinCoordinates(theta1, theta2, eta)


def sphere_distance(p: SpherePoint, q: SpherePoint) -> float:
    """Geodesic distance on S^3: arccos of the 4-dimensional dot product.

    The dot product is clamped to [-1, 1] before arccos to absorb rounding
    at (near-)identical or antipodal points; representation-identical points
    are exactly 0 apart (arccos alone would be ~sqrt(eps)-conditioned there).
    """
    if p.alpha == q.alpha and p.beta == q.beta:
        return 0.0
    dot = (
        p.alpha.real * q.alpha.real
        + p.alpha.imag * q.alpha.imag
        + p.beta.real * q.beta.real
        + p.beta.imag * q.beta.imag
    )
    return math.acos(min(1.0, max(-1.0, dot)))


def eigenvalue_distance(p: SpherePoint, q: SpherePoint) -> float:
    """Bi-invariant SU(2) distance |log lambda_1|, lambda_1 an eigenvalue of A B*.

    The principal logarithm (imaginary part in (-pi, pi]) is used. The
    eigenvalues of A B* are a conjugate pair e^(+-i theta), so either one
    gives the same value, and it coincides with sphere_distance.
    """
    m = p.su2() @ q.su2().conj().T
    lam = np.linalg.eigvals(m)[0]
    return abs(cmath.log(lam))


def group_action(space: LensSpace, k: int, p: SpherePoint) -> SpherePoint:
    """The k-th power of the generator acting on p: (w^k alpha, w^(km) beta).

    Exponents are reduced mod n, so k = 0 and k = n act as the exact identity.
    """
    n = space.n
    j = k % n
    wa = cmath.exp(2j * math.pi * j / n)
    wb = cmath.exp(2j * math.pi * ((j * space.m) % n) / n)
    return SpherePoint(wa * p.alpha, wb * p.beta)


def lens_distance(
    space: LensSpace, p: SpherePoint, q: SpherePoint, double_loop: bool = False
) -> float:
    """Quotient distance between the orbits of p and q in L(n;m).

    Default is the single-loop orbit minimum min_k d(w^k . p, q), which equals
    the double minimum over (j, k) because the action is by isometries. The
    O(n^2) literal double loop is kept behind ``double_loop`` for fidelity
    testing.
    """
    n = space.n
    if double_loop:
        return min(
            sphere_distance(group_action(space, j, p), group_action(space, k, q))
            for j in range(1, n + 1)
            for k in range(1, n + 1)
        )
    return min(
        sphere_distance(group_action(space, k, p), q) for k in range(1, n + 1)
    )
