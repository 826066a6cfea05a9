import math

import numpy as np
import pytest

from lenslab.geometry import (
    JoinCoordinates,
    LensSpace,
    SpherePoint,
    eigenvalue_distance,
    from_join,
    group_action,
    lens_distance,
    sphere_distance,
    to_join,
)


def random_point(rng):
    z = rng.standard_normal(4)
    return SpherePoint(complex(z[0], z[1]), complex(z[2], z[3]))


# ---------------------------------------------------------------------------
# LensSpace


def test_lens_space_validation():
    LensSpace(5, 2)
    LensSpace(2, 1)
    LensSpace(1, 1)
    with pytest.raises(ValueError):
        LensSpace(0, 1)
    with pytest.raises(ValueError):
        LensSpace(1, 2)
    with pytest.raises(ValueError):
        LensSpace(5, 5)
    with pytest.raises(ValueError):
        LensSpace(5, 0)
    with pytest.raises(ValueError):
        LensSpace(6, 3)  # gcd 3


@pytest.mark.parametrize(
    "n,m,expected",
    [(2, 1, True), (5, 1, True), (5, 4, True), (5, 2, False), (7, 3, False), (1, 1, True)],
)
def test_homogeneous(n, m, expected):
    assert LensSpace(n, m).homogeneous() is expected


def test_volume():
    assert LensSpace(5, 2).volume() == pytest.approx(2 * math.pi**2 / 5, abs=0)
    assert LensSpace(1, 1).volume() == pytest.approx(2 * math.pi**2, abs=0)


# ---------------------------------------------------------------------------
# SpherePoint / join coordinates


def test_sphere_point_normalizes():
    p = SpherePoint(3 + 4j, 0)
    assert abs(p.alpha) == pytest.approx(1.0, abs=1e-12)
    assert p.beta == 0


def test_sphere_point_rejects_zero():
    with pytest.raises(ValueError):
        SpherePoint(0, 0)


def test_join_coordinate_ranges():
    with pytest.raises(ValueError):
        JoinCoordinates(math.pi, 0.0, 0.1)
    with pytest.raises(ValueError):
        JoinCoordinates(0.0, -4.0, 0.1)
    with pytest.raises(ValueError):
        JoinCoordinates(0.0, 0.0, math.pi)


def test_from_join_kills_beta_at_eta_zero():
    p = from_join(JoinCoordinates(0.0, 0.0, 0.0))
    assert p.cartesian == pytest.approx((1.0, 0.0, 0.0, 0.0), abs=1e-15)


def test_from_join_kills_alpha_at_eta_half_pi():
    p = from_join(JoinCoordinates(0.0, 0.0, math.pi / 2))
    assert p.cartesian == pytest.approx((0.0, 0.0, 1.0, 0.0), abs=1e-15)


def test_join_round_trip_interior_point():
    c = JoinCoordinates(math.pi / 3, -math.pi / 4, math.pi / 6)
    c2 = to_join(from_join(c))
    assert (c2.theta1, c2.theta2, c2.eta) == pytest.approx(
        (c.theta1, c.theta2, c.eta), abs=1e-12
    )


def test_to_join_degenerate_conventions():
    c = to_join(SpherePoint(1, 0))
    assert (c.theta1, c.theta2, c.eta) == (0.0, 0.0, 0.0)
    c = to_join(SpherePoint.from_cartesian(0, 0, 0, 1))  # beta = i
    assert (c.theta1, c.theta2, c.eta) == pytest.approx(
        (0.0, math.pi / 2, math.pi / 2), abs=1e-15
    )


def test_join_round_trip_random_points():
    rng = np.random.default_rng(7)
    for _ in range(500):
        p = random_point(rng)
        q = from_join(to_join(p))
        assert q.cartesian == pytest.approx(p.cartesian, abs=1e-12)


# ---------------------------------------------------------------------------
# Distances


def test_sphere_distance_identical():
    rng = np.random.default_rng(8)
    p = random_point(rng)
    assert sphere_distance(p, p) == 0.0


def test_sphere_distance_antipodes_and_orthogonal():
    e = SpherePoint(1, 0)
    assert sphere_distance(e, SpherePoint(-1, 0)) == pytest.approx(math.pi, abs=0)
    assert sphere_distance(e, SpherePoint(0, 1)) == pytest.approx(math.pi / 2, abs=0)


def test_eigenvalue_distance_identity():
    rng = np.random.default_rng(9)
    p = random_point(rng)
    assert eigenvalue_distance(p, p) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("phi", [0.0, 0.3, 1.2, math.pi / 2, 2.5, math.pi])
def test_eigenvalue_distance_rotation_angle(phi):
    # A rotates by phi in the alpha-plane (join theta1 = phi, eta = 0)
    a = SpherePoint(complex(math.cos(phi), math.sin(phi)), 0)
    assert eigenvalue_distance(a, SpherePoint(1, 0)) == pytest.approx(phi, abs=1e-12)


def test_eigenvalue_distance_matches_sphere_distance():
    rng = np.random.default_rng(10)
    for _ in range(1000):
        p, q = random_point(rng), random_point(rng)
        assert eigenvalue_distance(p, q) == pytest.approx(
            sphere_distance(p, q), abs=1e-10
        )


# ---------------------------------------------------------------------------
# Group action


def test_group_action_identity_powers():
    rng = np.random.default_rng(11)
    space = LensSpace(5, 2)
    p = random_point(rng)
    for k in (0, 5, 10, -5):
        q = group_action(space, k, p)
        assert q.alpha == p.alpha and q.beta == p.beta


def test_group_action_example_l52():
    q = group_action(LensSpace(5, 2), 1, SpherePoint(1, 0))
    assert q.cartesian == pytest.approx(
        (math.cos(2 * math.pi / 5), math.sin(2 * math.pi / 5), 0.0, 0.0), abs=1e-15
    )


def test_group_action_is_isometry():
    rng = np.random.default_rng(12)
    space = LensSpace(7, 3)
    for _ in range(200):
        p, q = random_point(rng), random_point(rng)
        d = sphere_distance(p, q)
        for k in range(7):
            dk = sphere_distance(group_action(space, k, p), group_action(space, k, q))
            assert dk == pytest.approx(d, abs=1e-12)


# ---------------------------------------------------------------------------
# Lens distance


def test_lens_distance_zero_on_orbit():
    rng = np.random.default_rng(13)
    space = LensSpace(5, 2)
    for _ in range(50):
        p = random_point(rng)
        q = group_action(space, rng.integers(0, 5), p)
        assert lens_distance(space, p, q) == 0.0


def test_lens_distance_injectivity_radius_boundary():
    # join (pi/n, 0, 0) sits exactly between the orbit copies of (1,0,0,0)
    for n in (3, 5, 8):
        space = LensSpace(n, 1)
        p = from_join(JoinCoordinates(math.pi / n, 0.0, 0.0))
        assert lens_distance(space, p, SpherePoint(1, 0)) == pytest.approx(
            math.pi / n, abs=1e-12
        )


def test_lens_distance_single_equals_double_loop():
    rng = np.random.default_rng(14)
    space = LensSpace(5, 2)
    for _ in range(1000):
        p, q = random_point(rng), random_point(rng)
        single = lens_distance(space, p, q)
        double = lens_distance(space, p, q, double_loop=True)
        assert double == pytest.approx(single, abs=1e-11)


def test_lens_distance_pseudometric():
    rng = np.random.default_rng(15)
    space = LensSpace(7, 2)
    for _ in range(300):
        p, q, r = (random_point(rng) for _ in range(3))
        dpq = lens_distance(space, p, q)
        dqp = lens_distance(space, q, p)
        assert dqp == pytest.approx(dpq, abs=1e-10)
        assert lens_distance(space, p, r) <= dpq + lens_distance(space, q, r) + 1e-10


def test_lens_distance_bounded_by_sphere_distance():
    rng = np.random.default_rng(16)
    space = LensSpace(6, 1)
    for _ in range(300):
        p, q = random_point(rng), random_point(rng)
        assert lens_distance(space, p, q) <= sphere_distance(p, q) + 1e-15


def test_lens_distance_diameter_bound_scalar():
    rng = np.random.default_rng(17)
    for n in (2, 3, 5):
        space = LensSpace(n, 1)
        for _ in range(300):
            p, q = random_point(rng), random_point(rng)
            assert lens_distance(space, p, q) <= math.pi / 2 + 1e-12


def test_lens_distance_diameter_bound_bulk():
    # 1e5 random pairs per the stated property, via the vectorized engine
    # (whose kernel is the same orbit-minimum reduction)
    from lenslab.montecarlo import GENERAL_ORBIT, SampleConfig, sample_distances

    for n in (2, 5):
        cfg = SampleConfig(LensSpace(n, 1), 100_000, 2024, algorithm=GENERAL_ORBIT)
        samples, _ = sample_distances(cfg)
        assert samples.max() <= math.pi / 2 + 1e-12
