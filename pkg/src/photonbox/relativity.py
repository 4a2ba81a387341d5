"""Schwarzschild time dilation along box trajectories and photon weight.

The interesting quantities are tiny differences on top of order-one
numbers: a trajectory-dependent dilation of ~1e-30 s on a quarter period of
0.25 s, or a redshift momentum difference of ~1e-16 relative across a 1 m
box.  Everything below is therefore written in terms of offsets ``z`` from a
reference radius ``r_ref`` and uses algebraically rearranged differences
instead of subtracting nearly equal floats.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import BoxConfig, PhysicalConstants, require_weak_field
from .errors import InsideHorizon, NonPositiveInput, RegimeViolation
from .phase_space import angle_uncertainty
from .quadrature import adaptive_simpson

Order = Literal["exact", "grav_only", "grav_plus_sr"]
ORDERS: tuple[str, ...] = ("exact", "grav_only", "grav_plus_sr")

MAX_SPEED_RATIO = 1e-3
MAX_HEIGHT_RATIO = 1e-3


def schwarzschild_phi(r: float, constants: PhysicalConstants) -> float:
    """Metric factor 1 - 2 G M_g / (c^2 r)."""
    rs = constants.schwarzschild_radius
    if not r > rs:
        raise InsideHorizon(f"r = {r!r} is not outside the Schwarzschild radius {rs!r}")
    return 1.0 - rs / r


def dt_dtau(r: float, v: float, constants: PhysicalConstants, order: Order = "exact") -> float:
    """Coordinate-time rate of a radially moving clock; ``v = dr/dtau``."""
    phi = schwarzschild_phi(r, constants)
    beta2 = (v / constants.c) ** 2
    if order == "exact":
        return math.sqrt(1.0 / phi + beta2 / phi**2)
    if order == "grav_only":
        return phi**-0.5
    if order == "grav_plus_sr":
        return phi**-0.5 + phi**-1.5 * beta2 / 2.0
    raise ValueError(f"unknown order {order!r}; expected one of {ORDERS}")


def inv_sqrt_phi_difference(rs: float, r_ref: float, za, zb):
    """phi(r_ref + za)^(-1/2) - phi(r_ref + zb)^(-1/2) without cancellation.

    Works elementwise on arrays.
    """
    ra = r_ref + za
    rb = r_ref + zb
    phi_a = 1.0 - rs / ra
    phi_b = 1.0 - rs / rb
    # phi_b - phi_a = rs (rb - ra) / (ra rb), and rb - ra = zb - za exactly
    dphi = rs * (zb - za) / (ra * rb)
    sa = np.sqrt(phi_a)
    sb = np.sqrt(phi_b)
    return dphi / (sa * sb * (sa + sb))


@dataclass(frozen=True)
class Trajectory:
    """Radial world line ``r(tau) = r_ref + z(tau)`` of the box clock."""

    r_ref: float
    z_of_tau: Callable[[float], float]
    v_of_tau: Callable[[float], float]
    tau_span: tuple[float, float]

    def r_of_tau(self, tau: float) -> float:
        return self.r_ref + self.z_of_tau(tau)

    @property
    def tau_end(self) -> float:
        return self.tau_span[1] - self.tau_span[0]

    def check(self, constants: PhysicalConstants, n: int = 65) -> None:
        rs = constants.schwarzschild_radius
        for tau in np.linspace(*self.tau_span, n):
            r = self.r_of_tau(float(tau))
            if not r > rs:
                raise InsideHorizon(f"trajectory reaches r = {r!r} <= {rs!r} at tau = {tau!r}")
            v = self.v_of_tau(float(tau))
            if not abs(v) / constants.c < MAX_SPEED_RATIO:
                raise RegimeViolation(f"|v|/c = {abs(v) / constants.c:.3e} at tau = {tau!r}")


def static_trajectory(r_ref: float, tau_end: float, z: float = 0.0) -> Trajectory:
    return Trajectory(r_ref, lambda tau: z, lambda tau: 0.0, (0.0, tau_end))


def oscillation_trajectory(
    config: BoxConfig, constants: PhysicalConstants, z0: float, p0: float, tau_end: float
) -> Trajectory:
    """Harmonic motion from offset ``z0`` (from z1) and momentum ``p0``."""
    w = config.omega
    vz = p0 / config.M

    def z(tau: float) -> float:
        return z0 * math.cos(w * tau) + vz / w * math.sin(w * tau)

    def v(tau: float) -> float:
        return -z0 * w * math.sin(w * tau) + vz * math.cos(w * tau)

    return Trajectory(constants.r0, z, v, (0.0, tau_end))


def version1_trajectory(config: BoxConfig, constants: PhysicalConstants, dz0: float = 0.0) -> Trajectory:
    """Quarter-period motion released from rest at ``z0 - dz0``."""
    return oscillation_trajectory(config, constants, -(config.amplitude + dz0), 0.0, config.T / 4.0)


def version2_trajectory(config: BoxConfig, constants: PhysicalConstants, dphi: float = 0.0) -> Trajectory:
    """Half-period motion ``-(z1 - z0) cos(omega tau - dphi)``."""
    a = config.amplitude
    w = config.omega
    return Trajectory(
        constants.r0,
        lambda tau: -a * math.cos(w * tau - dphi),
        lambda tau: a * w * math.sin(w * tau - dphi),
        (0.0, config.T / 2.0),
    )


@dataclass(frozen=True)
class CoordinateTime:
    """Coordinate time elapsed along a trajectory, split by origin.

    ``static`` is the dilation of a clock parked at ``r_ref``;
    ``gravitational`` and ``kinematic`` are the trajectory-dependent parts.
    """

    proper: float
    static: float
    gravitational: float
    kinematic: float
    error: float

    @property
    def excess(self) -> float:
        return self.gravitational + self.kinematic

    @property
    def dilation(self) -> float:
        return self.static + self.excess

    @property
    def total(self) -> float:
        return self.proper + self.dilation

    def __float__(self) -> float:
        return self.total


def _integrate_component(f, tau_span, tol_rel: float) -> tuple[float, float]:
    a, b = tau_span
    probe = [abs(f(float(t))) for t in np.linspace(a, b, 17)]
    scale = max(probe)
    if scale == 0.0:
        return 0.0, 0.0
    return adaptive_simpson(f, a, b, tol_rel * (b - a) * scale)


def coordinate_time(
    traj: Trajectory,
    constants: PhysicalConstants,
    order: Order = "grav_plus_sr",
    quadrature_tol: float = 1e-10,
) -> CoordinateTime:
    """Integrate dt/dtau over the trajectory's proper-time span.

    Each trajectory-dependent component is integrated by adaptive Simpson with
    absolute error budget ``quadrature_tol * tau_end`` times the component's
    own magnitude, which keeps the tolerance meaningful for dilations far
    below one ulp of ``tau_end``.
    """
    if not 1e-14 <= quadrature_tol <= 1e-6:
        raise ValueError(f"quadrature_tol must lie in [1e-14, 1e-6], got {quadrature_tol!r}")
    if order not in ORDERS:
        raise ValueError(f"unknown order {order!r}; expected one of {ORDERS}")
    traj.check(constants)
    rs = constants.schwarzschild_radius
    r0 = traj.r_ref
    phi0 = schwarzschild_phi(r0, constants)
    sq0 = math.sqrt(phi0)
    tau_end = traj.tau_end
    static = tau_end * (rs / r0) / (sq0 * (1.0 + sq0))
    c2 = constants.c**2

    def grav(tau: float) -> float:
        return float(inv_sqrt_phi_difference(rs, r0, traj.z_of_tau(tau), 0.0))

    def kin(tau: float) -> float:
        phi = 1.0 - rs / traj.r_of_tau(tau)
        beta2 = traj.v_of_tau(tau) ** 2 / c2
        if order == "grav_plus_sr":
            return phi**-1.5 * beta2 / 2.0
        # exact: sqrt(1/phi + b/phi^2) - phi^(-1/2), rationalized
        extra = beta2 / phi**2
        return extra / (math.sqrt(1.0 / phi + extra) + phi**-0.5)

    g_val, g_err = _integrate_component(grav, traj.tau_span, quadrature_tol)
    if order == "grav_only":
        k_val, k_err = 0.0, 0.0
    else:
        k_val, k_err = _integrate_component(kin, traj.tau_span, quadrature_tol)
    return CoordinateTime(
        proper=tau_end, static=static, gravitational=g_val, kinematic=k_val, error=g_err + k_err
    )


def delta_t_version1(dz0: float, config: BoxConfig, constants: PhysicalConstants) -> float:
    """Coordinate-time spread over a quarter period from a position spread."""
    if dz0 < 0.0:
        raise ValueError("dz0 must be non-negative")
    return config.g / (constants.c**2 * config.omega) * dz0


def delta_t_version2(dp0: float, config: BoxConfig, constants: PhysicalConstants) -> float:
    """Coordinate-time spread over a half period from a momentum spread."""
    angle_uncertainty(dp0, config)
    return 2.0 * config.g * dp0 / (config.M * config.omega**2 * constants.c**2)


@dataclass(frozen=True)
class DilationSpread:
    """Central-difference spread of the coordinate time between two trajectories."""

    gravitational: float
    kinematic: float

    @property
    def total(self) -> float:
        return self.gravitational + self.kinematic


def _central_difference(plus: CoordinateTime, minus: CoordinateTime) -> DilationSpread:
    return DilationSpread(
        gravitational=0.5 * (plus.gravitational - minus.gravitational),
        kinematic=0.5 * (plus.kinematic - minus.kinematic),
    )


def delta_t_version1_quadrature(
    dz0: float,
    config: BoxConfig,
    constants: PhysicalConstants,
    order: Order = "grav_plus_sr",
    quadrature_tol: float = 1e-12,
) -> DilationSpread:
    """Half the coordinate-time difference of amplitudes ``(z1 - z0) +- dz0``."""
    plus = coordinate_time(version1_trajectory(config, constants, dz0), constants, order, quadrature_tol)
    minus = coordinate_time(version1_trajectory(config, constants, -dz0), constants, order, quadrature_tol)
    return _central_difference(plus, minus)


def delta_t_version2_quadrature(
    dp0: float,
    config: BoxConfig,
    constants: PhysicalConstants,
    order: Order = "grav_plus_sr",
    quadrature_tol: float = 1e-12,
) -> DilationSpread:
    """Half the coordinate-time difference of phase offsets ``+-dphi``."""
    dphi = angle_uncertainty(dp0, config).dphi
    plus = coordinate_time(version2_trajectory(config, constants, dphi), constants, order, quadrature_tol)
    minus = coordinate_time(version2_trajectory(config, constants, -dphi), constants, order, quadrature_tol)
    return _central_difference(plus, minus)


@dataclass(frozen=True)
class PhotonBounce:
    """A photon reflected between floor and ceiling of a box of height ``B``."""

    Omega0: float
    B: float
    r0: float

    def __post_init__(self) -> None:
        for name in ("Omega0", "B", "r0"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise NonPositiveInput(f"{name} must be positive, got {value!r}")
        if not self.B / self.r0 < MAX_HEIGHT_RATIO:
            raise RegimeViolation(f"B/r0 = {self.B / self.r0:.3e} is not below {MAX_HEIGHT_RATIO:g}")


def _local_gravity(bounce: PhotonBounce, constants: PhysicalConstants) -> float:
    return constants.G * constants.M_g / bounce.r0**2


def redshifted_momentum(
    bounce: PhotonBounce, zeta: float, constants: PhysicalConstants, *, exact: bool = False
) -> float:
    """Photon momentum at height ``zeta`` above the box center.

    Linear form by default; ``exact=True`` uses the full redshift factor.
    Differences between heights are better taken with
    :func:`momentum_difference`.
    """
    if abs(zeta) > bounce.B / 2.0:
        raise ValueError(f"|zeta| = {abs(zeta)!r} exceeds B/2")
    hbar, c = constants.hbar, constants.c
    sq0 = math.sqrt(schwarzschild_phi(bounce.r0, constants))
    p_center = hbar * bounce.Omega0 / c
    if exact:
        return p_center * sq0 / math.sqrt(schwarzschild_phi(bounce.r0 + zeta, constants))
    return p_center - hbar * bounce.Omega0 * sq0 * _local_gravity(bounce, constants) * zeta / c**3


def momentum_difference(
    bounce: PhotonBounce, zeta_a: float, zeta_b: float, constants: PhysicalConstants, *, exact: bool = True
) -> float:
    """p(zeta_a) - p(zeta_b), computed without cancellation."""
    hbar, c = constants.hbar, constants.c
    sq0 = math.sqrt(schwarzschild_phi(bounce.r0, constants))
    if exact:
        rs = constants.schwarzschild_radius
        diff = float(inv_sqrt_phi_difference(rs, bounce.r0, zeta_a, zeta_b))
        return hbar * bounce.Omega0 / c * sq0 * diff
    g = _local_gravity(bounce, constants)
    return -hbar * bounce.Omega0 * sq0 * g * (zeta_a - zeta_b) / c**3


def photon_mean_force(
    bounce: PhotonBounce,
    constants: PhysicalConstants,
    *,
    simulate: bool = False,
    n_bounce: int = 1000,
    quadrature_tol: float = 1e-12,
) -> float:
    """Mean vertical force of a trapped photon on the box (negative = down).

    The closed form is minus the weight of the mass ``hbar Omega0 / c^2``.
    With ``simulate=True`` a photon is reflected ``n_bounce`` round trips
    between floor and ceiling; each reflection transfers twice the local,
    redshifted momentum and the elapsed time is the null-geodesic travel time
    converted to proper time at the box center.
    """
    if not simulate:
        return -constants.hbar * bounce.Omega0 / constants.c**2 * _local_gravity(bounce, constants)
    if n_bounce < 1:
        raise ValueError("n_bounce must be >= 1")

    c = constants.c
    rs = constants.schwarzschild_radius
    half = bounce.B / 2.0
    sq0 = math.sqrt(schwarzschild_phi(bounce.r0, constants))

    # one-way coordinate travel time along the radial null geodesic, dt = dr / (c phi)
    def inv_phi(zeta: float) -> float:
        return 1.0 / (1.0 - rs / (bounce.r0 + zeta))

    leg_t, _ = adaptive_simpson(inv_phi, -half, half, quadrature_tol * bounce.B)
    leg_t /= c
    leg_tau = sq0 * leg_t

    # momenta relative to the center value; the center parts of the up and
    # down impulses cancel exactly over whole round trips
    dev = {
        +half: momentum_difference(bounce, +half, 0.0, constants),
        -half: momentum_difference(bounce, -half, 0.0, constants),
    }
    impulses: list[float] = []
    tau = 0.0
    position = -half
    net_center_hits = 0
    for _ in range(2 * n_bounce):
        position = -position
        tau += leg_tau
        direction = 1 if position > 0 else -1
        net_center_hits += direction
        impulses.append(direction * 2.0 * dev[position])
    assert net_center_hits == 0
    return math.fsum(impulses) / tau
