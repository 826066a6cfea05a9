"""Closed-form distance statistics on the homogeneous lens spaces L(n;1).

The k-th moment of distance between two independent uniform points,

    I(n, k) = (2n/pi) * int_0^(pi/n) sec^2(t) int_t^(pi/2) u^k cos(u) sin(u) du dt,

is computed by four independent routes (a two-term recurrence, its explicit
finite-sum solution, a hypergeometric closed form, and adaptive quadrature of
the defining integral), together with the moment-generating function, the
distance pdf/cdf/quantile, and ball volumes / sphere areas. Distances on
L(n;1) are bounded by the diameter pi/2; the formulas live on [0, pi/2] with
a single branch point at the injectivity radius pi/n.

Numerical notes. The recurrence multiplies the previous value by k(k-1)/4
while the moments themselves shrink relative to (pi/2)^k, so forward
iteration in doubles loses roughly k!/2^k of precision (about 2e-4 absolute
at n=5, k=20); the explicit finite sum cancels identically. Both methods
therefore run internally in 50-digit arithmetic and return doubles, and both
are capped at k = 25. The closed form and the quadrature are numerically
benign and carry no cap.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy import integrate

from .specfun import cos_integral, euler_gamma, hyp_1f2, sin_integral

__all__ = [
    "DistributionSpec",
    "K_MAX_ITERATIVE",
    "METHODS",
    "MomentResult",
    "ball_volume",
    "cdf",
    "cdf_grid",
    "mgf",
    "moment",
    "moment_asymptotic",
    "moment_closed_form",
    "moment_finite_sum",
    "moment_large_n_limit",
    "moment_negative_one",
    "moment_quadrature",
    "moment_recurrence",
    "pdf",
    "quantile",
    "sphere_area",
]

DIAMETER = math.pi / 2

# Iterative methods (recurrence, finite sum) are capped here; see module notes.
K_MAX_ITERATIVE = 25

# Working precision for the iterative methods: the recurrence amplifies
# initial rounding by ~k!/2^k (<= 1.4e10 at k=25), so 50 digits leave the
# double-precision result exact to the last bit.
_MP_DPS = 50

_EPS = sys.float_info.epsilon

METHODS = ("recurrence", "finite_sum", "closed_form", "quadrature")

_ALL_METHODS = METHODS + ("asymptotic", "large_n_limit")


@dataclass(frozen=True)
class MomentResult:
    """A moment value I(n, k) with the method that produced it and an error bound."""

    n: int
    k: int
    value: float
    method: str
    abs_error_bound: float

    def __post_init__(self) -> None:
        if self.method not in _ALL_METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.k >= 0:
            bound = DIAMETER**self.k
            if not -1e-9 <= self.value <= bound * (1.0 + 1e-9):
                raise ValueError(
                    f"moment I({self.n},{self.k}) = {self.value} violates "
                    f"0 <= I <= (pi/2)^k = {bound}"
                )


def _check_n(n: int, minimum: int = 2) -> None:
    if n != int(n) or n < minimum:
        raise ValueError(f"n must be an integer >= {minimum}, got {n}")


def _check_iterative_k(k: int) -> None:
    if not 0 <= k <= K_MAX_ITERATIVE:
        raise ValueError(
            f"iterative methods support 0 <= k <= {K_MAX_ITERATIVE}, got k={k}; "
            f"use closed_form or quadrature for larger k"
        )


def _float_bound(value: float) -> float:
    # bound for a value whose internal computation is exact to >> double
    # precision: a few ulps of the final rounding
    return 8.0 * _EPS * max(abs(value), 1.0)


def moment_recurrence(n: int, k: int) -> MomentResult:
    """I(n, k) by forward iteration of the two-term reduction recurrence.

    Bases are I(n,0) = 1 and I(n,1) = pi/2n + (n-2)/4 tan(pi/n) (n >= 3),
    then for k >= 2

        I(n,k) = -k(k-1)/4 I(n,k-2) + (pi/n)^k/(k+1)
                 + n/(2 pi) [(pi/2)^k - (pi/n)^k] tan(pi/n).

    For n = 2 the n -> 2 limits are used instead: I(2,1) = 1/pi + pi/4 and
    I(2,k) = -k(k-1)/4 I(2,k-2) + (pi/2)^k/(k+1) + (k/pi)(pi/2)^(k-1).
    """
    _check_n(n)
    _check_iterative_k(k)
    with mp.workdps(_MP_DPS):
        pi = mp.pi
        if n == 2:
            vals = [mp.mpf(1), 1 / pi + pi / 4]
            for j in range(2, k + 1):
                vals.append(
                    -mp.mpf(j * (j - 1)) / 4 * vals[j - 2]
                    + (pi / 2) ** j / (j + 1)
                    + mp.mpf(j) / pi * (pi / 2) ** (j - 1)
                )
        else:
            tan = mp.tan(pi / n)
            vals = [mp.mpf(1), pi / (2 * n) + mp.mpf(n - 2) / 4 * tan]
            for j in range(2, k + 1):
                vals.append(
                    -mp.mpf(j * (j - 1)) / 4 * vals[j - 2]
                    + (pi / n) ** j / (j + 1)
                    + mp.mpf(n) / (2 * pi) * ((pi / 2) ** j - (pi / n) ** j) * tan
                )
        value = float(vals[k])
    return MomentResult(n, k, value, "recurrence", _float_bound(value))


def moment_finite_sum(n: int, k: int) -> MomentResult:
    """I(n, k) by the explicit alternating finite-sum solution of the recurrence.

    For even k = 2m,

        I = (-1)^m (2m)!/2^(2m) [ 1
            + sum_{j<m} (-1)^(j+1) (2pi/n)^(2j+2) / (2j+3)!
            + n/(2 pi) tan(pi/n) sum_{j<m} (-1)^(j+1)
              (pi^(2j+2) - (2pi/n)^(2j+2)) / (2j+2)! ].

    The odd branch k = 2m-1 solves the same first-order system for
    z_m = I(n, 2m-1) with arbitrary initial value z_0 = 1 (its coefficient
    vanishes), giving

        I = (-1)^(m-1) (2m-1)!/2^(2m-1) sum_{j<m} (-1)^j
            [ (2pi/n)^(2j+1) / (2j+2)!
              + n/(2 pi) tan(pi/n) (pi^(2j+1) - (2pi/n)^(2j+1)) / (2j+1)! ].

    Only defined for n >= 3 (the printed form assumes tan(pi/n) finite).
    """
    _check_n(n, minimum=3)
    _check_iterative_k(k)
    with mp.workdps(_MP_DPS):
        pi = mp.pi
        tan = mp.tan(pi / n)
        w = 2 * pi / n
        if k % 2 == 0:
            m = k // 2
            s1 = mp.mpf(1) + mp.fsum(
                (-1) ** (j + 1) * w ** (2 * j + 2) / mp.factorial(2 * j + 3)
                for j in range(m)
            )
            s2 = mp.fsum(
                (-1) ** (j + 1)
                * (pi ** (2 * j + 2) - w ** (2 * j + 2))
                / mp.factorial(2 * j + 2)
                for j in range(m)
            )
            total = (
                (-1) ** m
                * mp.factorial(2 * m)
                / mp.mpf(2) ** (2 * m)
                * (s1 + n / (2 * pi) * tan * s2)
            )
        else:
            m = (k + 1) // 2
            s = mp.fsum(
                (-1) ** j
                * (
                    w ** (2 * j + 1) / mp.factorial(2 * j + 2)
                    + n
                    / (2 * pi)
                    * tan
                    * (pi ** (2 * j + 1) - w ** (2 * j + 1))
                    / mp.factorial(2 * j + 1)
                )
                for j in range(m)
            )
            total = (-1) ** (m - 1) * mp.factorial(2 * m - 1) / mp.mpf(2) ** (2 * m - 1) * s
        value = float(total)
    return MomentResult(n, k, value, "finite_sum", _float_bound(value))


def moment_closed_form(n: int, k: int) -> MomentResult:
    """I(n, k) by the hypergeometric closed form.

    For n >= 3,

        I = 1/((k+1)(k+2)) [ 4/(k+3) (pi/n)^(k+2) 1F2(1; (k+4)/2, (k+5)/2; -pi^2/n^2)
            + tan(pi/n) ( n (pi/2)^(k+1) 1F2(1; (k+3)/2, (k+4)/2; -pi^2/4)
                          - 2 (pi/n)^(k+1) 1F2(1; (k+3)/2, (k+4)/2; -pi^2/n^2) ) ].

    For n = 2 the limit of this expression as n -> 2:

        I = (pi/2)^k/(k+1) [ 2 1F2(1; (k+3)/2, (k+4)/2; -pi^2/4)
            + pi^2/((k+2)(k+3)) ( 1F2(1; (k+4)/2, (k+5)/2; -pi^2/4)
                                  - 4/(k+4) 1F2(2; (k+5)/2, (k+6)/2; -pi^2/4) ) ].
    """
    _check_n(n)
    if k < 0:
        raise ValueError(f"closed form requires k >= 0, got {k}")
    pi = math.pi
    if n == 2:
        z = -pi * pi / 4
        fa = hyp_1f2(1.0, (k + 3) / 2, (k + 4) / 2, z)
        fb = hyp_1f2(1.0, (k + 4) / 2, (k + 5) / 2, z)
        fc = hyp_1f2(2.0, (k + 5) / 2, (k + 6) / 2, z)
        pre = (pi / 2) ** k / (k + 1)
        inner = pi * pi / ((k + 2) * (k + 3))
        value = pre * (2 * fa + inner * (fb - 4 / (k + 4) * fc))
        scale = pre * (2 * abs(fa) + inner * (abs(fb) + 4 / (k + 4) * abs(fc)))
    else:
        tan = math.tan(pi / n)
        zn = -(pi * pi) / (n * n)
        z4 = -pi * pi / 4
        f1 = hyp_1f2(1.0, (k + 4) / 2, (k + 5) / 2, zn)
        f2 = hyp_1f2(1.0, (k + 3) / 2, (k + 4) / 2, z4)
        f3 = hyp_1f2(1.0, (k + 3) / 2, (k + 4) / 2, zn)
        t1 = 4 / (k + 3) * (pi / n) ** (k + 2) * f1
        t2 = tan * n * (pi / 2) ** (k + 1) * f2
        t3 = -tan * 2 * (pi / n) ** (k + 1) * f3
        value = (t1 + t2 + t3) / ((k + 1) * (k + 2))
        scale = (abs(t1) + abs(t2) + abs(t3)) / ((k + 1) * (k + 2))
    # the series are summed to ~1e-16 relative; the only loss is the final
    # cancellation between the accumulated terms
    bound = 64.0 * _EPS * max(scale, abs(value), 1.0)
    return MomentResult(n, k, value, "closed_form", bound)


_QUAD_TOL = 1e-13
_QUAD_BOUND = 1e-11


def moment_quadrature(n: int, k: int) -> MomentResult:
    """I(n, k) by adaptive Gauss-Kronrod quadrature of the defining integral.

    This is the independent oracle for the other three methods: it evaluates

        (2n/pi) int_0^(pi/n) sec^2(t) int_t^(pi/2) u^k cos(u) sin(u) du dt

    directly (nested adaptive quadrature). k = -1 is admitted for n >= 3.
    For n = 2 the integral is improper (sec^2 blows up at pi/2 against a
    vanishing inner integral); integrating by parts in t (d tan = sec^2 dt,
    the boundary terms vanish) turns it into the proper equivalent

        (4/pi) int_0^(pi/2) u^k sin^2(u) du,

    which is what is integrated for n = 2 (k >= 0 only).

    Raises:
        RuntimeError: If the requested 1e-11 absolute error is not reached.
    """
    _check_n(n)
    if k < -1:
        raise ValueError(f"quadrature requires k >= -1, got {k}")
    if n == 2:
        if k < 0:
            raise ValueError("n = 2 requires k >= 0 (the k = -1 integral is improper)")
        raw, err = integrate.quad(
            lambda u: u**k * math.sin(u) ** 2,
            0.0,
            math.pi / 2,
            epsabs=_QUAD_TOL,
            epsrel=_QUAD_TOL,
            limit=200,
        )
        value = 4.0 / math.pi * raw
        bound = 4.0 / math.pi * err + _float_bound(value)
    else:
        raw, err = integrate.dblquad(
            lambda u, t: u**k * math.cos(u) * math.sin(u) / math.cos(t) ** 2,
            0.0,
            math.pi / n,
            lambda t: t,
            lambda t: math.pi / 2,
            epsabs=_QUAD_TOL,
            epsrel=_QUAD_TOL,
        )
        value = 2.0 * n / math.pi * raw
        bound = 2.0 * n / math.pi * err + _float_bound(value)
    if not math.isfinite(value) or bound > _QUAD_BOUND * max(1.0, abs(value)):
        raise RuntimeError(
            f"quadrature for I({n},{k}) did not reach the requested tolerance "
            f"(estimate {value}, error bound {bound})"
        )
    return MomentResult(n, k, value, "quadrature", bound)


def moment_negative_one(n: int) -> MomentResult:
    """The k = -1 moment E[1/d] on L(n;1), n >= 3:

        I(n,-1) = n/pi [ gamma - Ci(2pi/n) + log(2pi/n)
                         + (Si(pi) - Si(2pi/n)) tan(pi/n) ].
    """
    _check_n(n, minimum=3)
    x = 2 * math.pi / n
    tan = math.tan(math.pi / n)
    parts = (
        euler_gamma(),
        -cos_integral(x),
        math.log(x),
        (sin_integral(math.pi) - sin_integral(x)) * tan,
    )
    value = n / math.pi * math.fsum(parts)
    bound = 16.0 * _EPS * n / math.pi * sum(abs(p) for p in parts) + _float_bound(value)
    return MomentResult(n, -1, value, "closed_form", bound)


def moment_asymptotic(n: int, k: int) -> float:
    """Leading k -> infinity growth of I(n, k).

    (n/k^2) (pi/2)^(k+1) tan(pi/n) for n >= 3, and (2/k) (pi/2)^k for n = 2.
    """
    _check_n(n)
    if k < 1:
        raise ValueError(f"asymptotic form requires k >= 1, got {k}")
    if n == 2:
        return 2.0 / k * DIAMETER**k
    return n / (k * k) * DIAMETER ** (k + 1) * math.tan(math.pi / n)


def moment_large_n_limit(k: int) -> float:
    """lim_{n -> inf} I(n, k) = pi/((k+2)(k+1)) (pi/2)^(k+1) 1F2(1; (k+3)/2, (k+4)/2; -pi^2/4)."""
    if k < 0:
        raise ValueError(f"large-n limit requires k >= 0, got {k}")
    pi = math.pi
    return (
        pi
        / ((k + 2) * (k + 1))
        * (pi / 2) ** (k + 1)
        * hyp_1f2(1.0, (k + 3) / 2, (k + 4) / 2, -pi * pi / 4)
    )


def moment(n: int, k: int, method: str = "closed_form") -> MomentResult:
    """Dispatch I(n, k) to one of the four evaluation methods."""
    if method == "recurrence":
        return moment_recurrence(n, k)
    if method == "finite_sum":
        return moment_finite_sum(n, k)
    if method == "closed_form":
        return moment_closed_form(n, k)
    if method == "quadrature":
        return moment_quadrature(n, k)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def _expm1_over_t(x: float, t: float) -> float:
    # (exp(t x) - 1)/t, with the removable singularity at t = 0 handled by
    # the 4-term Taylor expansion x (1 + tx/2 + (tx)^2/6 + (tx)^3/24)
    if abs(t) < 1e-6:
        tx = t * x
        return x * (1.0 + tx / 2.0 * (1.0 + tx / 3.0 * (1.0 + tx / 4.0)))
    return math.expm1(t * x) / t


def mgf(n: int, t: float) -> float:
    """Moment-generating function M_n(t) = E[e^(t d)] on L(n;1).

    M_n(t) = 2n/(pi (4 + t^2)) ( 2(e^(t pi/n) - 1)/t
                                 + tan(pi/n) (e^(t pi/2) - e^(t pi/n)) )

    for n >= 3, and the n -> 2 limit

    M_2(t) = 4/(pi (4 + t^2)) ( 2(e^(t pi/2) - 1)/t + t e^(t pi/2) ).
    """
    _check_n(n)
    pi = math.pi
    if n == 2:
        return (
            4.0
            / (pi * (4.0 + t * t))
            * (2.0 * _expm1_over_t(pi / 2, t) + t * math.exp(t * pi / 2))
        )
    return (
        2.0
        * n
        / (pi * (4.0 + t * t))
        * (
            2.0 * _expm1_over_t(pi / n, t)
            + math.tan(pi / n) * (math.exp(t * pi / 2) - math.exp(t * pi / n))
        )
    )


def _check_domain(x: float, what: str) -> None:
    if not 0.0 <= x <= DIAMETER:
        raise ValueError(f"{what} must lie in [0, pi/2], got {x}")


def pdf(n: int, x: float) -> float:
    """Probability density of distance on L(n;1).

    f_2(x) = (4/pi) sin^2 x, and for n >= 3

        f_n(x) = (2n/pi) ( sin^2 x
                 + Theta(x - pi/n) (-sin^2 x + sin x cos x tan(pi/n)) ),

    with Theta(0) = 0; f_n is continuous across the breakpoint pi/n either way.
    """
    _check_n(n)
    _check_domain(x, "distance")
    s = math.sin(x)
    if n == 2:
        return 4.0 / math.pi * s * s
    if x > math.pi / n:
        return 2.0 * n / math.pi * s * math.cos(x) * math.tan(math.pi / n)
    return 2.0 * n / math.pi * s * s


def cdf(n: int, x: float) -> float:
    """Cumulative distribution of distance on L(n;1).

    F_2(x) = (2/pi)(x - sin x cos x), and for n >= 3

        F_n(x) = (n/pi) ( x - sin x cos x + Theta(x - pi/n)
                 (pi/n - x + sin x cos x - cos^2 x tan(pi/n)) ).
    """
    _check_n(n)
    _check_domain(x, "distance")
    sc = math.sin(x) * math.cos(x)
    if n == 2:
        return 2.0 / math.pi * (x - sc)
    base = x - sc
    if x > math.pi / n:
        base += math.pi / n - x + sc - math.cos(x) ** 2 * math.tan(math.pi / n)
    return n / math.pi * base


def cdf_grid(n: int, xs) -> np.ndarray:
    """Vectorized F_n over an array of distances in [0, pi/2].

    Same formula as ``cdf``; the test suite pins the two pointwise equal.
    """
    _check_n(n)
    x = np.asarray(xs, dtype=np.float64)
    if x.size and (x.min() < 0.0 or x.max() > DIAMETER + 1e-12):
        raise ValueError("distances must lie in [0, pi/2]")
    x = np.minimum(x, DIAMETER)
    sc = np.sin(x) * np.cos(x)
    if n == 2:
        return 2.0 / math.pi * (x - sc)
    extra = np.where(
        x > math.pi / n,
        math.pi / n - x + sc - np.cos(x) ** 2 * math.tan(math.pi / n),
        0.0,
    )
    return n / math.pi * (x - sc + extra)


def quantile(n: int, p: float) -> float:
    """Inverse cdf: the x in [0, pi/2] with |F_n(x) - p| <= 1e-12.

    F_n is strictly increasing, so plain bisection converges; endpoints are
    returned exactly.
    """
    _check_n(n)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return DIAMETER
    lo, hi = 0.0, DIAMETER
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = cdf(n, mid)
        if abs(fm - p) <= 1e-12:
            return mid
        if fm < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ball_volume(n: int, r: float) -> float:
    """Volume of a ball of radius r in L(n;1).

    2 pi (r - sin r cos r) up to the injectivity radius pi/n, and
    2 pi^2/n - 2 pi cos^2 r tan(pi/n) beyond it (never reached for n = 2,
    whose injectivity radius equals the diameter).
    """
    _check_n(n)
    _check_domain(r, "radius")
    if r <= math.pi / n:
        return 2.0 * math.pi * (r - math.sin(r) * math.cos(r))
    return 2.0 * math.pi**2 / n - 2.0 * math.pi * math.cos(r) ** 2 * math.tan(math.pi / n)


def sphere_area(n: int, r: float) -> float:
    """Surface area of the geodesic sphere of radius r in L(n;1).

    4 pi sin^2 r up to the injectivity radius pi/n, then
    4 pi sin r cos r tan(pi/n).
    """
    _check_n(n)
    _check_domain(r, "radius")
    if r <= math.pi / n:
        return 4.0 * math.pi * math.sin(r) ** 2
    return 4.0 * math.pi * math.sin(r) * math.cos(r) * math.tan(math.pi / n)


@dataclass(frozen=True)
class DistributionSpec:
    """The distance distribution family index: L(n;1) for a fixed n >= 2."""

    n: int

    def __post_init__(self) -> None:
        _check_n(self.n)

    def moment(self, k: int, method: str = "closed_form") -> MomentResult:
        return moment(self.n, k, method)

    def mgf(self, t: float) -> float:
        return mgf(self.n, t)

    def pdf(self, x: float) -> float:
        return pdf(self.n, x)

    def cdf(self, x: float) -> float:
        return cdf(self.n, x)

    def quantile(self, p: float) -> float:
        return quantile(self.n, p)

    def ball_volume(self, r: float) -> float:
        return ball_volume(self.n, r)

    def sphere_area(self, r: float) -> float:
        return sphere_area(self.n, r)
