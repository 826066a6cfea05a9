"""Monte Carlo engine: Haar sampling on SU(2), orbit-minimum distance samples
on arbitrary L(n;m), estimators with standard errors, histograms, and
Kolmogorov-Smirnov comparison against the analytic cdf.

Reproducibility
---------------
Results are a pure function of (seed, sample_count): sample i always consumes
raw words [i*w, (i+1)*w) of the counter-based Philox4x64 stream keyed by the
seed (w = 4 words per Haar point), mapped to Gaussians by inverse Box-Muller
with fixed consumption. Worker parallelism only partitions the index range
into fixed-size blocks, so the ordered sample list is byte-identical for
every worker count. Philox is a frozen algorithm in NumPy (its raw stream is
stable across releases), which pins the output bit-for-bit within a release
of this package.

The production sampling path draws Haar points by normalizing 4 Gaussians
(the first column of the Algorithm-1 matrix is exactly that); ``rand_su2``
implements the full literal algorithm (2x2 complex Gaussian, Gram-Schmidt,
determinant fix) and the two generators are KS-compared in the test suite.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

from .geometry import LensSpace, SpherePoint

__all__ = [
    "DistanceHistogram",
    "EstimateResult",
    "GENERAL_ORBIT",
    "HOMOGENEOUS_FAST",
    "KsResult",
    "SampleConfig",
    "build_histogram",
    "fixed_point_distances",
    "haar_points",
    "kolmogorov_critical",
    "ks_statistic",
    "ks_two_sample",
    "rand_sphere_point",
    "rand_su2",
    "sample_distances",
]

GENERAL_ORBIT = "general_orbit"
HOMOGENEOUS_FAST = "homogeneous_fast"
_ALGORITHMS = (GENERAL_ORBIT, HOMOGENEOUS_FAST)

# samples per scheduling block; blocks are the unit of worker parallelism
_BLOCK = 1 << 17

_TWO53 = float(1 << 53)


@dataclass(frozen=True)
class SampleConfig:
    """Configuration of one distance-sampling run."""

    space: LensSpace
    sample_count: int
    seed: int
    workers: int = 1
    algorithm: str = GENERAL_ORBIT

    def __post_init__(self) -> None:
        if self.sample_count < 1:
            raise ValueError(f"sample_count must be >= 1, got {self.sample_count}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.algorithm not in _ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {self.algorithm!r}; expected one of {_ALGORITHMS}"
            )
        if self.algorithm == HOMOGENEOUS_FAST and not self.space.homogeneous():
            raise ValueError(
                f"homogeneous_fast requires a homogeneous space, "
                f"got L({self.space.n};{self.space.m})"
            )


@dataclass(frozen=True)
class EstimateResult:
    """Mean distance estimate with its standard error."""

    mean: float
    std_error: float
    sample_count: int
    elapsed_seconds: float


@dataclass(frozen=True, eq=False)
class DistanceHistogram:
    """Binned empirical distances; counts sum to the sample total."""

    bin_edges: np.ndarray
    counts: np.ndarray
    total: int
    config: SampleConfig | None = None

    def densities(self) -> np.ndarray:
        """Per-bin probability density (count / (total * bin width))."""
        widths = np.diff(self.bin_edges)
        return self.counts / (self.total * widths)


@dataclass(frozen=True)
class KsResult:
    """A Kolmogorov-Smirnov statistic with its decision threshold."""

    statistic: float
    threshold: float
    alpha: float
    sample_count: int
    passed: bool


# ---------------------------------------------------------------------------
# Haar sampling


def _gaussians_from_words(words: np.ndarray) -> np.ndarray:
    """Standard normals from raw 64-bit words, two words -> two normals.

    Uniforms are ((w >> 11) + 0.5) * 2^-53, strictly inside (0, 1), then the
    trigonometric Box-Muller transform. Fixed consumption keeps sample i's
    normals a function of its own words alone. The radius satisfies
    r^2 = -2 log(u) >= 2^-53, so a Haar point's norm is bounded away from
    zero structurally and no singular-redraw branch is needed here.
    """
    u = ((words >> np.uint64(11)).astype(np.float64) + 0.5) / _TWO53
    u = u.reshape(-1, 2)
    r = np.sqrt(-2.0 * np.log(u[:, 0]))
    theta = (2.0 * math.pi) * u[:, 1]
    out = np.empty(u.shape[0] * 2)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out


def _haar_block(
    seed: int, first_sample: int, count: int, points_per_sample: int
) -> tuple[np.ndarray, np.ndarray]:
    """(alpha, beta) arrays for Haar points of samples [first, first+count).

    Each point consumes 4 words; sample i's words start at absolute word
    index i * 4 * points_per_sample (Philox counter = word index / 4).
    """
    wps = 4 * points_per_sample
    bit_gen = Philox(key=seed, counter=first_sample * (wps // 4))
    words = bit_gen.random_raw(count * wps)
    z = _gaussians_from_words(words).reshape(count * points_per_sample, 4)
    alpha = z[:, 0] + 1j * z[:, 1]
    beta = z[:, 2] + 1j * z[:, 3]
    norm = np.sqrt(
        alpha.real**2 + alpha.imag**2 + beta.real**2 + beta.imag**2
    )
    return alpha / norm, beta / norm


def haar_points(count: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """(alpha, beta) arrays of ``count`` Haar-uniform points on S^3 = SU(2)."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    return _haar_block(seed, 0, count, 1)


def rand_su2(stream: Generator) -> SpherePoint:
    """One Haar-random SU(2) element by the literal matrix algorithm.

    Draws two real 2x2 Gaussian matrices A, B, forms C = A + iB,
    orthonormalizes the columns of C by Gram-Schmidt, rescales the last
    column by 1/det so the determinant is 1, and reads the point off the
    first column. Redraws on a numerically singular C (probability ~0).
    """
    while True:
        a = stream.standard_normal((2, 2))
        b = stream.standard_normal((2, 2))
        c = a + 1j * b
        n1 = math.sqrt(abs(c[0, 0]) ** 2 + abs(c[1, 0]) ** 2)
        if n1 < 1e-150:
            continue
        q1 = c[:, 0] / n1
        v = c[:, 1] - (np.conj(q1) @ c[:, 1]) * q1
        n2 = math.sqrt(abs(v[0]) ** 2 + abs(v[1]) ** 2)
        if n2 < 1e-150:
            continue
        q2 = v / n2
        det = q1[0] * q2[1] - q1[1] * q2[0]
        q2 = q2 / det
        # Q = [[alpha, -beta], [conj(beta), conj(alpha)]]:
        # first column is (alpha, conj(beta))
        return SpherePoint(q1[0], np.conj(q1[1]))


def rand_sphere_point(stream: Generator) -> SpherePoint:
    """One Haar point by the cheap route: normalize a 4-dimensional Gaussian."""
    while True:
        z = stream.standard_normal(4)
        if z @ z >= 1e-300:
            return SpherePoint(complex(z[0], z[1]), complex(z[2], z[3]))


# ---------------------------------------------------------------------------
# Distance kernels (vectorized over samples)


def _roots_of_unity(n: int) -> np.ndarray:
    return np.exp(2j * math.pi * np.arange(n) / n)


def _min_orbit_arccos(best_dot: np.ndarray) -> np.ndarray:
    return np.arccos(np.clip(best_dot, -1.0, 1.0))


def _distances_fast(space: LensSpace, alpha: np.ndarray) -> np.ndarray:
    # min_k d(w^k . A, I): the dot with the identity is Re(w^k alpha)
    roots = _roots_of_unity(space.n)
    best = np.full(alpha.shape, -2.0)
    for k in range(space.n):
        np.maximum(best, (roots[k] * alpha).real, out=best)
    return _min_orbit_arccos(best)


def _distances_general(
    space: LensSpace,
    a_alpha: np.ndarray,
    a_beta: np.ndarray,
    b_alpha: np.ndarray,
    b_beta: np.ndarray,
) -> np.ndarray:
    # single-loop orbit minimum: min_s d(w^s . A, B)
    n, m = space.n, space.m
    roots = _roots_of_unity(n)
    a = a_alpha * np.conj(b_alpha)
    b = a_beta * np.conj(b_beta)
    best = np.full(a.shape, -2.0)
    for s in range(n):
        np.maximum(best, (roots[s] * a).real + (roots[(s * m) % n] * b).real, out=best)
    return _min_orbit_arccos(best)


def _distances_double_loop(
    space: LensSpace,
    a_alpha: np.ndarray,
    a_beta: np.ndarray,
    b_alpha: np.ndarray,
    b_beta: np.ndarray,
) -> np.ndarray:
    # the paper-literal O(n^2) grid min over d(w^j . A, w^k . B); the mod-n
    # root table makes the k = n column the exact identity, so the grid
    # contains the single-loop candidates bitwise
    n, m = space.n, space.m
    roots = _roots_of_unity(n)
    best = np.full(a_alpha.shape, -2.0)
    for j in range(1, n + 1):
        pa = roots[j % n] * a_alpha
        pb = roots[(j * m) % n] * a_beta
        for k in range(1, n + 1):
            qa = roots[k % n] * b_alpha
            qb = roots[(k * m) % n] * b_beta
            dot = (pa * np.conj(qa)).real + (pb * np.conj(qb)).real
            np.maximum(best, dot, out=best)
    return _min_orbit_arccos(best)


# ---------------------------------------------------------------------------
# Sampling runs


def _run_blocks(total: int, workers: int, block_fn) -> np.ndarray:
    out = np.empty(total)

    def run(block: int) -> None:
        lo = block * _BLOCK
        hi = min(total, lo + _BLOCK)
        out[lo:hi] = block_fn(lo, hi - lo)

    blocks = range((total + _BLOCK - 1) // _BLOCK)
    if workers == 1 or len(blocks) == 1:
        for block in blocks:
            run(block)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, blocks))
    return out


def _estimate(samples: np.ndarray, elapsed: float) -> EstimateResult:
    # fsum reductions are exact, hence independent of accumulation order
    count = samples.size
    mean = math.fsum(samples.tolist()) / count
    if count >= 2:
        dev = samples - mean
        var = math.fsum((dev * dev).tolist()) / (count - 1)
        std_error = math.sqrt(var / count)
    else:
        std_error = math.nan
    return EstimateResult(mean, std_error, count, elapsed)


def sample_distances(
    config: SampleConfig, literal_double_loop: bool = False
) -> tuple[np.ndarray, EstimateResult]:
    """Distance samples between random point pairs (or orbits) of L(n;m).

    general_orbit draws two Haar points per sample and returns the
    orbit-minimum distance (single-loop; pass ``literal_double_loop`` for the
    paper-literal O(n^2) grid, equal sample by sample). homogeneous_fast
    draws one Haar point A per sample and returns min_k d(w^k . A, I), valid
    on homogeneous spaces where A B* is again Haar.

    Returns the ordered sample array (a pure function of seed and
    sample_count) and the mean/standard-error estimate.
    """
    if literal_double_loop and config.algorithm != GENERAL_ORBIT:
        raise ValueError("literal_double_loop applies to the general_orbit algorithm")
    start = time.perf_counter()
    space = config.space

    if config.algorithm == HOMOGENEOUS_FAST:

        def block_fn(lo: int, count: int) -> np.ndarray:
            alpha, _ = _haar_block(config.seed, lo, count, 1)
            return _distances_fast(space, alpha)

    else:
        kernel = _distances_double_loop if literal_double_loop else _distances_general

        def block_fn(lo: int, count: int) -> np.ndarray:
            alpha, beta = _haar_block(config.seed, lo, count, 2)
            return kernel(
                space, alpha[0::2], beta[0::2], alpha[1::2], beta[1::2]
            )

    samples = _run_blocks(config.sample_count, config.workers, block_fn)
    return samples, _estimate(samples, time.perf_counter() - start)


def fixed_point_distances(
    space: LensSpace, phi: float, count: int, seed: int, workers: int = 1
) -> np.ndarray:
    """Distances from ``count`` Haar-random points to one fixed point.

    The fixed point is the image of the rotation matrix
    [[cos phi, -sin phi], [sin phi, cos phi]], i.e. alpha = cos phi,
    beta = sin phi.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    q = SpherePoint(complex(math.cos(phi)), complex(math.sin(phi)))

    def block_fn(lo: int, n_samples: int) -> np.ndarray:
        alpha, beta = _haar_block(seed, lo, n_samples, 1)
        return _distances_general(space, alpha, beta, q.alpha, q.beta)

    return _run_blocks(count, workers, block_fn)


# ---------------------------------------------------------------------------
# Histograms and goodness of fit


def build_histogram(
    samples: np.ndarray, bins: int, config: SampleConfig | None = None
) -> DistanceHistogram:
    """Equal-width histogram over [0, max(pi/2, observed max)].

    The upper edge extends past pi/2 when a sample exceeds it (possible on
    non-homogeneous spaces); counts are never clipped.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise ValueError("cannot histogram an empty sample list")
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    top = max(math.pi / 2, float(samples.max()))
    edges = np.linspace(0.0, top, bins + 1)
    counts, _ = np.histogram(samples, bins=edges)
    return DistanceHistogram(edges, counts, int(samples.size), config)


def kolmogorov_critical(alpha: float) -> float:
    """c(alpha) with P(sup|ECDF - F| > c/sqrt(N)) -> alpha, from the
    asymptotic Kolmogorov distribution: c = sqrt(-ln(alpha/2)/2), so
    c(0.01) ~ 1.628."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return math.sqrt(-0.5 * math.log(alpha / 2.0))


def _ecdf_sup_distance(samples: np.ndarray, cdf_values: np.ndarray) -> float:
    count = samples.size
    steps = np.arange(1, count + 1) / count
    return float(
        max(np.max(steps - cdf_values), np.max(cdf_values - (steps - 1.0 / count)))
    )


def ks_statistic(
    samples: np.ndarray, space: LensSpace, alpha: float = 0.01
) -> KsResult:
    """One-sample KS statistic of distance samples against the analytic F_n.

    Requires a homogeneous space with n >= 2 (no analytic cdf exists
    otherwise). Passes iff D <= c(alpha)/sqrt(N).
    """
    from .analytic import cdf_grid

    if not space.homogeneous() or space.n < 2:
        raise ValueError(
            f"analytic cdf requires a homogeneous space with n >= 2, "
            f"got L({space.n};{space.m})"
        )
    samples = np.sort(np.asarray(samples, dtype=np.float64))
    if samples.size == 0:
        raise ValueError("cannot test an empty sample list")
    d = _ecdf_sup_distance(samples, cdf_grid(space.n, samples))
    threshold = kolmogorov_critical(alpha) / math.sqrt(samples.size)
    return KsResult(d, threshold, alpha, int(samples.size), d <= threshold)


def ks_two_sample(x: np.ndarray, y: np.ndarray, alpha: float = 0.01) -> KsResult:
    """Two-sample KS statistic; passes (same distribution) iff
    D <= c(alpha) sqrt((n1+n2)/(n1 n2))."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    y = np.sort(np.asarray(y, dtype=np.float64))
    if x.size == 0 or y.size == 0:
        raise ValueError("cannot test empty sample lists")
    grid = np.concatenate([x, y])
    cx = np.searchsorted(x, grid, side="right") / x.size
    cy = np.searchsorted(y, grid, side="right") / y.size
    d = float(np.max(np.abs(cx - cy)))
    threshold = kolmogorov_critical(alpha) * math.sqrt(
        (x.size + y.size) / (x.size * y.size)
    )
    return KsResult(d, threshold, alpha, int(x.size + y.size), d <= threshold)
