import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from photonbox.core import PhysicalConstants, derive_box_config
from photonbox.errors import InsideHorizon, NonPositiveInput, RegimeViolation
from photonbox.relativity import (
    PhotonBounce,
    Trajectory,
    coordinate_time,
    delta_t_version1,
    delta_t_version1_quadrature,
    delta_t_version2,
    delta_t_version2_quadrature,
    dt_dtau,
    momentum_difference,
    oscillation_trajectory,
    photon_mean_force,
    redshifted_momentum,
    schwarzschild_phi,
    static_trajectory,
    version1_trajectory,
)

FLAT = PhysicalConstants(M_g=0.0)


@pytest.fixture(scope="module")
def bounce(earth):
    return PhotonBounce(Omega0=3e15, B=1.0, r0=earth.r0)


def test_phi_flat_space():
    assert schwarzschild_phi(1.0, FLAT) == 1.0


def test_phi_horizon_limit(earth):
    rs = earth.schwarzschild_radius
    assert 0.0 < schwarzschild_phi(rs * (1 + 1e-9), earth) < 1e-8
    with pytest.raises(InsideHorizon):
        schwarzschild_phi(rs, earth)
    with pytest.raises(InsideHorizon):
        schwarzschild_phi(0.5 * rs, earth)


def test_phi_at_earth_surface(earth):
    assert float(f"{1.0 - schwarzschild_phi(earth.r0, earth):.1e}") == 1.4e-9


@pytest.mark.parametrize("order", ["exact", "grav_only", "grav_plus_sr"])
def test_static_rate_is_inverse_sqrt_phi(earth, order):
    phi = schwarzschild_phi(earth.r0, earth)
    assert dt_dtau(earth.r0, 0.0, earth, order) == phi**-0.5


def test_flat_space_special_relativity():
    c = FLAT.c
    exact = dt_dtau(1.0, c / 1000, FLAT, "exact")
    # with v = dr/dtau (proper velocity) the exact rate is sqrt(1 + v^2/c^2)
    assert exact == pytest.approx(math.sqrt(1 + 1e-6), rel=1e-15)
    # the coordinate-velocity form 1/sqrt(1 - v^2/c^2) differs only at O(v^4/c^4)
    assert exact == pytest.approx(1 / math.sqrt(1 - 1e-6), rel=1e-12)
    assert dt_dtau(1.0, c / 1000, FLAT, "grav_plus_sr") == pytest.approx(1 + 0.5e-6, rel=1e-15)


def test_earth_static_rate_binomial_oracle(earth):
    x = earth.weak_field_ratio
    oracle = 1 + x / 2 + 3 * x * x / 8
    assert dt_dtau(earth.r0, 0.0, earth) == pytest.approx(oracle, abs=1e-12)
    assert dt_dtau(earth.r0, 0.0, earth) - 1 == pytest.approx(7.0e-10, rel=0.01)


@given(h=st.floats(-1e3, 1e3), beta=st.floats(1e-8, 1e-3))
def test_order_hierarchy(earth, h, beta):
    r = earth.r0 + h
    v = beta * earth.c
    exact = dt_dtau(r, v, earth, "exact")
    plus = dt_dtau(r, v, earth, "grav_plus_sr")
    grav = dt_dtau(r, v, earth, "grav_only")
    # truncating sqrt(1 + x) at first order overestimates it; allow rounding
    slack = 4 * math.ulp(1.0)
    assert plus >= exact - slack and exact >= grav - slack and grav >= 1.0


def test_unknown_order(earth):
    with pytest.raises(ValueError):
        dt_dtau(earth.r0, 0.0, earth, "newtonian")


def test_flat_static_coordinate_time_is_exact():
    assert coordinate_time(static_trajectory(1.0, 1.0), FLAT).total == 1.0


@given(tau=st.floats(1e-3, 1e3))
def test_static_clock_runs_slow(earth, tau):
    ct = coordinate_time(static_trajectory(earth.r0, tau), earth)
    assert ct.dilation > 0.0
    assert ct.static == pytest.approx(tau * (1 / math.sqrt(1 - earth.weak_field_ratio) - 1), rel=1e-12)


def test_quadrature_tolerance_range(earth):
    traj = static_trajectory(earth.r0, 1.0)
    for bad in (1e-15, 1e-5):
        with pytest.raises(ValueError):
            coordinate_time(traj, earth, quadrature_tol=bad)


def test_trajectory_regime_checks(earth):
    fast = Trajectory(earth.r0, lambda t: 0.0, lambda t: 0.01 * earth.c, (0.0, 1.0))
    with pytest.raises(RegimeViolation):
        coordinate_time(fast, earth)
    rs = earth.schwarzschild_radius
    inside = Trajectory(0.5 * rs, lambda t: 0.0, lambda t: 0.0, (0.0, 1.0))
    with pytest.raises(InsideHorizon):
        coordinate_time(inside, earth)


def test_exact_and_truncated_orders_agree(earth, box):
    traj = oscillation_trajectory(box, earth, -box.amplitude, 3e-13, box.T)
    exact = coordinate_time(traj, earth, "exact", 1e-12)
    plus = coordinate_time(traj, earth, "grav_plus_sr", 1e-12)
    assert abs(exact.total - plus.total) / traj.tau_end < 1e-12
    assert abs(exact.kinematic - plus.kinematic) <= 1e-9 * abs(plus.kinematic)


def test_version1_quadrature_matches_closed_form(earth, box, spec):
    ct = coordinate_time(version1_trajectory(box, earth, spec.dz), earth, quadrature_tol=1e-12)
    static = box.T / 4 * earth.weak_field_ratio / (
        math.sqrt(1 - earth.weak_field_ratio) * (1 + math.sqrt(1 - earth.weak_field_ratio))
    )
    assert ct.static == pytest.approx(static, rel=1e-12)
    closed = delta_t_version1(box.amplitude + spec.dz, box, earth)
    assert ct.gravitational == pytest.approx(closed, rel=1e-6)


def test_version2_quadrature_matches_closed_form(earth, box, spec):
    quad = delta_t_version2_quadrature(spec.dp, box, earth)
    assert quad.total == pytest.approx(delta_t_version2(spec.dp, box, earth), rel=1e-6)


def test_version1_spread_quadrature(earth, box, spec):
    quad = delta_t_version1_quadrature(spec.dz, box, earth)
    assert quad.gravitational == pytest.approx(delta_t_version1(spec.dz, box, earth), rel=1e-6)


def test_special_relativistic_share_is_tiny(earth, box, spec):
    quad = delta_t_version1_quadrature(spec.dz, box, earth)
    ratio = quad.kinematic / quad.gravitational
    # the quarter-period average of sin^2 supplies pi/4; the ratio is pi m / (4 M)
    assert ratio == pytest.approx(math.pi * box.m / (4 * box.M), rel=1e-6)
    assert ratio < math.pi * box.m / box.M


def test_delta_t_version1_hand_value():
    c = PhysicalConstants(c=3e8)
    cfg = derive_box_config(1.0, 1e-12, 4 * math.pi**2, c, g=9.81)
    assert delta_t_version1(1e-6, cfg, c) == pytest.approx(1.735e-23, rel=1e-3)
    assert delta_t_version1(0.0, cfg, c) == 0.0
    assert delta_t_version1(2e-6, cfg, c) == 2 * delta_t_version1(1e-6, cfg, c)


def test_delta_t_version2_structure(earth, box, spec):
    mw = box.M * box.omega
    assert delta_t_version2(0.0, box, earth) == 0.0
    assert delta_t_version2(spec.dp, box, earth) == pytest.approx(
        2 * delta_t_version1(spec.dp / mw, box, earth), rel=1e-15
    )


def test_bounce_validation(earth):
    with pytest.raises(NonPositiveInput):
        PhotonBounce(0.0, 1.0, earth.r0)
    with pytest.raises(RegimeViolation):
        PhotonBounce(1e15, 1e4, earth.r0)


def test_momentum_at_center(earth, bounce):
    assert redshifted_momentum(bounce, 0.0, earth) == earth.hbar * bounce.Omega0 / earth.c
    with pytest.raises(ValueError):
        redshifted_momentum(bounce, bounce.B, earth)


def test_momentum_difference_across_box(earth, bounce):
    sq0 = math.sqrt(schwarzschild_phi(earth.r0, earth))
    expected = -earth.hbar * bounce.Omega0 * sq0 * earth.surface_gravity * bounce.B / earth.c**3
    half = bounce.B / 2
    assert momentum_difference(bounce, half, -half, earth) == pytest.approx(expected, rel=1e-6)
    assert momentum_difference(bounce, half, -half, earth, exact=False) == pytest.approx(expected, rel=1e-15)


def test_momentum_difference_matches_exact_form_in_strong_field(earth):
    # closer to the horizon the differences are resolvable in plain arithmetic
    c = earth.with_(r0=earth.schwarzschild_radius * 1e3)
    b = PhotonBounce(1e15, c.r0 * 1e-4, c.r0)
    direct = redshifted_momentum(b, b.B / 2, c, exact=True) - redshifted_momentum(b, -b.B / 2, c, exact=True)
    assert momentum_difference(b, b.B / 2, -b.B / 2, c) == pytest.approx(direct, rel=1e-6)


def test_no_redshift_without_gravity(bounce):
    p = [redshifted_momentum(bounce, z, FLAT) for z in (-0.5, 0.0, 0.5)]
    assert p[0] == p[1] == p[2]
    assert momentum_difference(bounce, 0.5, -0.5, FLAT) == 0.0


def test_closed_form_force_is_weight(earth, bounce):
    f = photon_mean_force(bounce, earth)
    m = earth.hbar * bounce.Omega0 / earth.c**2
    assert f + m * earth.surface_gravity == 0.0
    assert f == pytest.approx(-3.45e-35, rel=0.01)


def test_simulated_force(earth, bounce):
    closed = photon_mean_force(bounce, earth)
    sim = photon_mean_force(bounce, earth, simulate=True)
    assert sim == pytest.approx(closed, rel=1e-6)
    taller = PhotonBounce(bounce.Omega0, 2 * bounce.B, bounce.r0)
    assert photon_mean_force(taller, earth, simulate=True) == pytest.approx(sim, rel=1e-4)
    assert photon_mean_force(bounce, FLAT, simulate=True) == 0.0
    with pytest.raises(ValueError):
        photon_mean_force(bounce, earth, simulate=True, n_bounce=0)
