"""Measurement protocols for the photon box and the slab shutter.

Each protocol samples an admissible ensemble, pushes it through the exact
dynamics and reads the energy and time spreads off the resulting per-sample
quantities.  Results are bit-reproducible for fixed inputs and do not depend
on the number of workers.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ._parallel import chunked_map
from .core import BoxConfig, PhysicalConstants, UncertaintySpec
from .errors import DegenerateSpec, InputError, LengthMismatch, NonPositiveInput, RegimeViolation
from .phase_space import Ensemble, angle_uncertainty, evolve_ensemble, sample_ensemble
from .relativity import (
    Order,
    delta_t_version1,
    delta_t_version1_quadrature,
    delta_t_version2,
    delta_t_version2_quadrature,
    coordinate_time,
    oscillation_trajectory,
    schwarzschild_phi,
)
from .roots import bisect

MIN_SAMPLES = 1000
CROSSING_XTOL = 1e-12  # in units of the period

PROTOCOLS = ("v1", "v2", "v3", "shutter")


def mc_tolerance(n: int) -> float:
    return 5.0 / math.sqrt(n)


@dataclass(frozen=True)
class ProtocolResult:
    protocol: str
    dE_est: float
    dt_est: float
    product: float
    analytic_product: float
    bound_ratio: float
    n_samples: int
    seed: int
    config_hash: str
    dt_closed_form: float
    dt_quadrature: float | None = None
    # in-memory only; not part of the serialized record
    diagnostics: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def mc_tolerance(self) -> float:
        return mc_tolerance(self.n_samples)

    def record(self) -> dict:
        out = asdict(self)
        del out["diagnostics"]
        return out


def config_hash(*parts) -> str:
    """Stable digest of the dataclasses/values that define a run."""
    canon = []
    for part in parts:
        canon.append(asdict(part) if hasattr(part, "__dataclass_fields__") else part)
    text = json.dumps(canon, sort_keys=True, default=repr)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _std(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1))


def _check_samples(n: int) -> None:
    if n < MIN_SAMPLES:
        raise InputError(f"protocol runs need at least {MIN_SAMPLES} samples, got {n}")


def _emission_ensemble(config: BoxConfig, spec: UncertaintySpec, n: int, seed: int, bound: float | None):
    return sample_ensemble((-config.amplitude, 0.0), spec, n, seed, bound=bound)


def _result(protocol, dE, dt, analytic, n, seed, h, digest, dt_closed, dt_quad=None, **diagnostics):
    product = dE * dt
    return ProtocolResult(
        protocol=protocol,
        dE_est=dE,
        dt_est=dt,
        product=product,
        analytic_product=analytic,
        bound_ratio=product / h,
        n_samples=n,
        seed=seed,
        config_hash=digest,
        dt_closed_form=dt_closed,
        dt_quadrature=dt_quad,
        diagnostics=diagnostics,
    )


def run_version1(
    config: BoxConfig,
    spec: UncertaintySpec,
    n: int,
    seed: int,
    constants: PhysicalConstants,
    *,
    bound: float | None = None,
    workers: int = 1,
    order: Order = "grav_plus_sr",
    quadrature_tol: float = 1e-12,
    dt_method: str = "quadrature",
    include_momentum: bool = False,
) -> ProtocolResult:
    """Second weighing by a position reading a quarter period after emission.

    The energy spread comes from the pointer spread at T/4.  The time spread
    is the spread of the per-sample coordinate time between emission and the
    reading; each sample's coordinate time responds linearly to its release
    position, with the response taken from a pair of trajectory quadratures
    (``dt_method="quadrature"``) or from the linearized closed form.
    ``include_momentum`` adds the (usually neglected) response to the
    initial momentum.
    """
    _check_samples(n)
    bound = constants.h if bound is None else bound
    ens = _emission_ensemble(config, spec, n, seed, bound)
    quarter = evolve_ensemble(ens, config.T / 4.0, config, workers=workers)
    c2 = constants.c**2
    dE = c2 * config.k_spring / config.g * _std(quarter.z)

    slope_closed = config.g / (c2 * config.omega)
    slope_quad = delta_t_version1_quadrature(spec.dz, config, constants, order, quadrature_tol).total / spec.dz
    slope_p = 0.0
    if include_momentum:
        tau = config.T / 4.0
        plus = coordinate_time(
            oscillation_trajectory(config, constants, -config.amplitude, spec.dp, tau), constants, order, quadrature_tol
        )
        minus = coordinate_time(
            oscillation_trajectory(config, constants, -config.amplitude, -spec.dp, tau), constants, order, quadrature_tol
        )
        slope_p = 0.5 * (plus.excess - minus.excess) / spec.dp
    slope_p_closed = -config.g / (c2 * config.M * config.omega**2) if include_momentum else 0.0

    a = config.amplitude

    def offsets(slope_z, slope_pp):
        return chunked_map(lambda z, p: slope_z * (-(z + a)) + slope_pp * p, (ens.z, ens.p), workers)

    dt_quad = _std(offsets(slope_quad, slope_p))
    dt_closed = _std(offsets(slope_closed, slope_p_closed))
    if dt_method not in ("quadrature", "closed_form"):
        raise ValueError(f"unknown dt_method {dt_method!r}")
    dt = dt_quad if dt_method == "quadrature" else dt_closed
    digest = config_hash("v1", config, spec, constants, n, seed, order, dt_method, include_momentum)
    return _result(
        "v1", dE, dt, spec.dz * spec.dp, n, seed, constants.h, digest, dt_closed, dt_quad,
        dz_quarter=_std(quarter.z), dp_quarter=_std(quarter.p),
    )


def run_version2(
    config: BoxConfig,
    spec: UncertaintySpec,
    n: int,
    seed: int,
    constants: PhysicalConstants,
    *,
    bound: float | None = None,
    workers: int = 1,
    order: Order = "grav_plus_sr",
    quadrature_tol: float = 1e-12,
    dt_method: str = "quadrature",
) -> ProtocolResult:
    """Second weighing by a position reading half a period after emission.

    The half turn returns the spreads to their initial values, so the
    energy spread comes from the position spread; the time spread comes
    from the phase-angle spread induced by the momentum spread.

    Raises:
        AmplitudeTooSmall: the oscillation cannot encode ``spec.dp``.
    """
    _check_samples(n)
    bound = constants.h if bound is None else bound
    dphi = angle_uncertainty(spec.dp, config).dphi
    ens = _emission_ensemble(config, spec, n, seed, bound)
    half = evolve_ensemble(ens, config.T / 2.0, config, workers=workers)
    c2 = constants.c**2
    dz2, dp2 = _std(half.z), _std(half.p)
    dE = c2 * config.k_spring / (2.0 * config.g) * dz2

    slope_closed = delta_t_version2(spec.dp, config, constants) / spec.dp
    slope_quad = delta_t_version2_quadrature(spec.dp, config, constants, order, quadrature_tol).total / spec.dp
    dt_quad = _std(chunked_map(lambda p: slope_quad * p, (ens.p,), workers))
    dt_closed = _std(chunked_map(lambda p: slope_closed * p, (ens.p,), workers))
    if dt_method not in ("quadrature", "closed_form"):
        raise ValueError(f"unknown dt_method {dt_method!r}")
    dt = dt_quad if dt_method == "quadrature" else dt_closed
    digest = config_hash("v2", config, spec, constants, n, seed, order, dt_method)
    return _result(
        "v2", dE, dt, spec.dz * spec.dp, n, seed, constants.h, digest, dt_closed, dt_quad,
        dz_half=dz2, dp_half=dp2, dphi=dphi,
    )


def crossing_times(z0: np.ndarray, p0: np.ndarray, config: BoxConfig, *, workers: int = 1) -> np.ndarray:
    """Proper time at which each released sample first passes ``z1``.

    ``z0`` are release offsets from ``z1`` (all negative), ``p0`` release
    momenta.  The root is bracketed in ``[0, T/2]`` and bisected to
    ``1e-12 T``.
    """
    z0 = np.asarray(z0, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    if np.any(z0 >= 0.0):
        raise RegimeViolation("release position at or above z1; position spread exceeds the amplitude")
    w = config.omega
    mw = config.M * w

    def solve(zz, pp):
        def x(tau):
            return zz * np.cos(w * tau) + pp / mw * np.sin(w * tau)

        return bisect(x, np.zeros_like(zz), np.full_like(zz, config.T / 2.0), CROSSING_XTOL * config.T)

    return chunked_map(solve, (z0, p0), workers)


def _linear_dilation(tau, z0, p0, config: BoxConfig, constants: PhysicalConstants):
    """Linearized coordinate-time excess of a released sample after ``tau``."""
    w = config.omega
    c2 = constants.c**2
    sq0 = math.sqrt(schwarzschild_phi(constants.r0, constants))
    static_rate = constants.weak_field_ratio / (sq0 * (1.0 + sq0))
    moving = -(z0 / w) * np.sin(w * tau) + p0 / (config.M * w**2) * (np.cos(w * tau) - 1.0)
    return static_rate * tau + config.g / c2 * moving


def run_version3(
    config: BoxConfig,
    spec: UncertaintySpec,
    n: int,
    seed: int,
    constants: PhysicalConstants,
    *,
    bound: float | None = None,
    workers: int = 1,
    include_dilation: bool = False,
) -> ProtocolResult:
    """Shutterless box: emission time inferred from the passage through z1.

    The energy spread is that of the first weighing (M treated as exactly
    known).  Each sample's passage time minus T/4 is its emission-time error.
    ``include_dilation`` adds the gravitational coordinate-time shift, which
    is neglected by default.
    """
    if not config.m > 0.0:
        raise NonPositiveInput("m must be positive for the shutterless protocol")
    _check_samples(n)
    bound = constants.h if bound is None else bound
    ens = _emission_ensemble(config, spec, n, seed, bound)
    c2 = constants.c**2
    dE = c2 * config.k_spring / config.g * _std(ens.z)

    tau_c = crossing_times(ens.z, ens.p, config, workers=workers)
    errors = tau_c - config.T / 4.0
    if include_dilation:
        errors = errors + chunked_map(
            lambda t, z, p: _linear_dilation(t, z, p, config, constants), (tau_c, ens.z, ens.p), workers
        )
    dt = _std(errors)
    dt_closed = _std(ens.p) / (config.m * config.g)
    v1 = config.g / config.omega
    analytic = (constants.c / v1) ** 2 * (config.M / config.m) * spec.dz * spec.dp
    digest = config_hash("v3", config, spec, constants, n, seed, include_dilation)
    return _result("v3", dE, dt, analytic, n, seed, constants.h, digest, dt_closed, None, v1=v1)


def extremal_time_spread(ensemble: Ensemble, config: BoxConfig, constants: PhysicalConstants) -> float:
    """Monte Carlo estimate of the half-period time spread.

    For every emitted sample the proper time of its upper turning point is
    located by bisection on the velocity; the offset from T/2 is that
    sample's phase error, which is converted into a coordinate-time shift
    with the linearized half-period dilation integral.
    """
    w = config.omega
    zz, pp = ensemble.z, ensemble.p

    def velocity(tau):
        return -zz * w * np.sin(w * tau) + pp / config.M * np.cos(w * tau)

    lo = np.full_like(zz, config.T / 4.0)
    hi = np.full_like(zz, 3.0 * config.T / 4.0)
    tau_ext = bisect(velocity, lo, hi, CROSSING_XTOL * config.T)
    dphi = w * (tau_ext - config.T / 2.0)
    shift = 2.0 * config.g * config.amplitude / (w * constants.c**2) * np.sin(dphi)
    return _std(shift)


@dataclass(frozen=True)
class ShutterConfig:
    """Vibrating slab whose hole sweeps across a hole of diameter ``L``.

    ``dq``/``dp`` are the slab's phase-space spreads at the nominal moment
    the holes are centered; ``omega`` is the slab's angular frequency.
    """

    mu: float
    eps: float
    L: float
    dq: float
    dp: float
    omega: float

    def __post_init__(self) -> None:
        for name in ("mu", "eps", "L", "omega"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise NonPositiveInput(f"{name} must be positive, got {value!r}")
        UncertaintySpec(self.dq, self.dp)
        if not self.amplitude / self.L > 10.0:
            raise RegimeViolation(f"slab amplitude / L = {self.amplitude / self.L:.3g} is not above 10")
        if not self.dp < 0.1 * self.mu * self.speed:
            raise DegenerateSpec("momentum spread is not small against the slab momentum")

    @property
    def speed(self) -> float:
        """Maximal slab velocity, from mu v^2 / 2 = eps."""
        return math.sqrt(2.0 * self.eps / self.mu)

    @property
    def amplitude(self) -> float:
        return math.sqrt(2.0 * self.eps / (self.mu * self.omega**2))

    @property
    def spec(self) -> UncertaintySpec:
        return UncertaintySpec(self.dq, self.dp)


@dataclass(frozen=True)
class ShutterEstimates:
    speed: float
    d_eps: float
    dt: float
    opening_time: float

    @property
    def product(self) -> float:
        return self.d_eps * self.dt


def shutter_closed_form(shutter: ShutterConfig) -> ShutterEstimates:
    v = shutter.speed
    return ShutterEstimates(speed=v, d_eps=v * shutter.dp, dt=shutter.dq / v, opening_time=shutter.L / v)


def run_shutter(
    shutter: ShutterConfig,
    n: int,
    seed: int,
    constants: PhysicalConstants,
    *,
    bound: float | None = None,
    workers: int = 1,
) -> ProtocolResult:
    """Energy spread of the slab against the spread of its window-center time.

    Samples are offsets ``(dq_i, dp_i)`` from the nominal centered state
    ``(0, mu v)``.  Each sample's window center is the zero of its slab
    position nearest the nominal instant, found by bisection; its energy
    offset is evaluated without forming the large nominal energy.
    """
    _check_samples(n)
    bound = constants.h if bound is None else bound
    ens = sample_ensemble((0.0, 0.0), shutter.spec, n, seed, bound=bound)
    closed = shutter_closed_form(shutter)
    mu, w = shutter.mu, shutter.omega
    p_nom = mu * closed.speed
    quarter = math.pi / (2.0 * w)
    xtol = 1e-9 * closed.dt

    def window_centers(q, dp):
        def position(t):
            return q * np.cos(w * t) + (p_nom + dp) / (mu * w) * np.sin(w * t)

        return bisect(position, np.full_like(q, -quarter), np.full_like(q, quarter), xtol)

    def energy_offsets(q, dp):
        return (2.0 * p_nom * dp + dp**2) / (2.0 * mu) + 0.5 * mu * w**2 * q**2

    t_center = chunked_map(window_centers, (ens.z, ens.p), workers)
    d_energy = chunked_map(energy_offsets, (ens.z, ens.p), workers)
    dE, dt = _std(d_energy), _std(t_center)
    digest = config_hash("shutter", shutter, constants, n, seed)
    return _result(
        "shutter", dE, dt, shutter.dq * shutter.dp, n, seed, constants.h, digest, closed.dt, None,
        opening_time=closed.opening_time, speed=closed.speed,
    )


@dataclass(frozen=True)
class ArrivalStatistics:
    mean: float
    std: float
    n: int


def reference_arrival_times(arrivals, zero_points) -> ArrivalStatistics:
    """Statistics of arrival times referred to per-run time zero points."""
    t = np.asarray(arrivals, dtype=float)
    t0 = np.asarray(zero_points, dtype=float)
    if t.shape != t0.shape:
        raise LengthMismatch(f"{t.size} arrival times but {t0.size} zero points")
    if t.size < 2:
        raise InputError("need at least 2 paired readings")
    diff = t - t0
    return ArrivalStatistics(mean=float(np.mean(diff)), std=_std(diff), n=int(t.size))
