"""Minimal special-function kernel: Pochhammer symbols, the generalized
hypergeometric series pFq with p <= q, and the sine/cosine integrals.

Everything is evaluated by direct series summation in double precision. All
arguments arising in this package are small (|z| <= pi^2/4 for the
hypergeometric series, |x| <= pi for Si/Ci), where the series converge in a
few dozen terms with no need for asymptotic expansions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "EULER_GAMMA",
    "HypergeometricParams",
    "cos_integral",
    "euler_gamma",
    "hyp_1f2",
    "hyp_pfq",
    "pochhammer",
    "sin_integral",
]

# Euler-Mascheroni constant, correctly rounded to double precision.
EULER_GAMMA = 0.5772156649015329

# Series controls: a term is negligible when its magnitude falls below
# _SERIES_RTOL relative to the accumulated sum, twice in a row.
_SERIES_RTOL = 1e-16
_SERIES_MAX_TERMS = 10_000


def euler_gamma() -> float:
    """The Euler-Mascheroni constant gamma = 0.5772156649015329."""
    return EULER_GAMMA


def pochhammer(a: float, j: int) -> float:
    """Rising factorial (a)_j = a (a+1) ... (a+j-1), with (a)_0 = 1."""
    if j < 0:
        raise ValueError(f"pochhammer order must be nonnegative, got {j}")
    out = 1.0
    for i in range(j):
        out *= a + i
    return out


def _is_nonpositive_integer(b: float) -> bool:
    return b <= 0.0 and b == math.floor(b)


@dataclass(frozen=True)
class HypergeometricParams:
    """Parameters (a_1..a_p; b_1..b_q; z) of a generalized hypergeometric series.

    Requires p <= q, which makes the series entire in z, and no b_i equal to
    a nonpositive integer (the series is undefined there).
    """

    upper: tuple[float, ...]
    lower: tuple[float, ...]
    argument: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "upper", tuple(float(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(float(b) for b in self.lower))
        object.__setattr__(self, "argument", float(self.argument))
        if len(self.upper) > len(self.lower):
            raise ValueError(
                f"need p <= q for an entire series, got p={len(self.upper)}, "
                f"q={len(self.lower)}"
            )
        for b in self.lower:
            if _is_nonpositive_integer(b):
                raise ValueError(f"lower parameter {b} is a nonpositive integer")


def hyp_pfq(params: HypergeometricParams) -> float:
    """Sum the series pFq(a_1..a_p; b_1..b_q; z).

        sum_j  (a_1)_j ... (a_p)_j / ((b_1)_j ... (b_q)_j) * z^j / j!

    Accumulation stops once the current term is below 1e-16 of the running
    sum for two consecutive terms; a cap of 10,000 terms guards against the
    (out-of-scope) slowly convergent regimes.

    Raises:
        RuntimeError: If the term cap is reached before convergence.
    """
    z = params.argument
    total = 1.0
    term = 1.0
    small_streak = 0
    for j in range(_SERIES_MAX_TERMS):
        ratio = z / (j + 1)
        for a in params.upper:
            ratio *= a + j
        for b in params.lower:
            ratio /= b + j
        term *= ratio
        total += term
        if not math.isfinite(total):
            raise RuntimeError(
                f"hypergeometric series overflowed at term {j} "
                f"(upper={params.upper}, lower={params.lower}, z={z})"
            )
        if abs(term) <= _SERIES_RTOL * max(abs(total), 1e-300):
            small_streak += 1
            if small_streak >= 2:
                return total
        else:
            small_streak = 0
    raise RuntimeError(
        f"hypergeometric series did not converge within {_SERIES_MAX_TERMS} "
        f"terms (upper={params.upper}, lower={params.lower}, z={z})"
    )


def hyp_1f2(a: float, b1: float, b2: float, z: float) -> float:
    """Convenience wrapper for the 1F2(a; b1, b2; z) series."""
    return hyp_pfq(HypergeometricParams((a,), (b1, b2), z))


def sin_integral(x: float) -> float:
    """Sine integral Si(x) = int_0^x sin(t)/t dt.

    Evaluated by the everywhere-convergent Maclaurin series

        Si(x) = sum_j (-1)^j x^(2j+1) / ((2j+1) (2j+1)!),

    which is accurate in double precision for the |x| <= pi range used here
    (and remains usable up to |x| ~ 10).
    """
    total = 0.0
    term = x  # x^(2j+1)/(2j+1)! at j=0
    for j in range(200):
        total += term / (2 * j + 1)
        term *= -x * x / ((2 * j + 2) * (2 * j + 3))
        if abs(term) <= _SERIES_RTOL * max(abs(total), 1e-300):
            return total
    raise RuntimeError(f"Si series did not converge for x={x}")


def cos_integral(x: float) -> float:
    """Cosine integral Ci(x) = gamma + ln(x) + int_0^x (cos(t) - 1)/t dt, x > 0.

    The integral term is summed as sum_{j>=1} (-1)^j x^(2j) / ((2j) (2j)!).
    """
    if x <= 0.0:
        raise ValueError(f"cos_integral requires x > 0, got {x}")
    total = 0.0
    term = -x * x / 2.0  # (-1)^j x^(2j)/(2j)! at j=1
    for j in range(1, 200):
        total += term / (2 * j)
        term *= -x * x / ((2 * j + 1) * (2 * j + 2))
        if abs(term) <= _SERIES_RTOL * max(abs(total), 1e-300):
            return EULER_GAMMA + math.log(x) + total
    raise RuntimeError(f"Ci series did not converge for x={x}")
