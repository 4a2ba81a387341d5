"""Physical constants, box configuration and uncertainty specifications.

All quantities are SI.  Pointer positions follow the convention of a
vertical axis pointing up with its zero at the rest length of the spring,
so every equilibrium position is negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from scipy import constants as _codata

from .errors import DegenerateSpec, NonPositiveInput, RegimeViolation

EARTH_MASS = 5.972e24
EARTH_RADIUS = 6.371e6

WEAK_FIELD_THRESHOLD = 1e-6
MASS_RATIO_THRESHOLD = 1e-6
HBAR_RTOL = 1e-12

#: Names accepted for the lower bound of the uncertainty product.
HUP_BOUNDS = ("h", "hbar/2")


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants plus the gravitating source.

    ``hbar`` defaults to ``h / 2pi``.  An explicit, inconsistent ``hbar`` is
    accepted on purpose (fault injection); :func:`validate_constants`
    reports it.
    """

    c: float = _codata.c
    G: float = _codata.G
    h: float = _codata.h
    M_g: float = EARTH_MASS
    r0: float = EARTH_RADIUS
    hbar: float | None = None

    def __post_init__(self) -> None:
        if self.hbar is None:
            object.__setattr__(self, "hbar", self.h / (2.0 * math.pi))
        for name in ("c", "G", "h", "r0", "hbar"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise NonPositiveInput(f"{name} must be positive, got {value!r}")
        # M_g = 0 is the flat-space limit and is allowed.
        if not (self.M_g >= 0.0 and math.isfinite(self.M_g)):
            raise NonPositiveInput(f"M_g must be non-negative, got {self.M_g!r}")

    @property
    def schwarzschild_radius(self) -> float:
        return 2.0 * self.G * self.M_g / self.c**2

    @property
    def weak_field_ratio(self) -> float:
        """2 G M_g / (c^2 r0)."""
        return self.schwarzschild_radius / self.r0

    @property
    def surface_gravity(self) -> float:
        """g = G M_g / r0^2."""
        return self.G * self.M_g / self.r0**2

    def with_(self, **changes: float) -> PhysicalConstants:
        if "h" in changes and "hbar" not in changes:
            changes["hbar"] = None
        return replace(self, **changes)


@dataclass(frozen=True)
class ConstantsDiagnostics:
    weak_field_ratio: float
    threshold: float
    weak_field_ok: bool
    hbar_relative_error: float
    hbar_consistent: bool

    @property
    def passes(self) -> bool:
        return self.weak_field_ok and self.hbar_consistent


def validate_constants(constants: PhysicalConstants) -> ConstantsDiagnostics:
    """Report the weak-field parameter and the hbar/h consistency.

    Never raises; callers decide what a failure means.
    """
    ratio = constants.weak_field_ratio
    expected_hbar = constants.h / (2.0 * math.pi)
    hbar_err = abs(constants.hbar - expected_hbar) / expected_hbar
    return ConstantsDiagnostics(
        weak_field_ratio=ratio,
        threshold=WEAK_FIELD_THRESHOLD,
        weak_field_ok=ratio < WEAK_FIELD_THRESHOLD,
        hbar_relative_error=hbar_err,
        hbar_consistent=hbar_err <= HBAR_RTOL,
    )


def require_weak_field(constants: PhysicalConstants) -> None:
    ratio = constants.weak_field_ratio
    if not ratio < WEAK_FIELD_THRESHOLD:
        raise RegimeViolation(
            f"2 G M_g / (c^2 r0) = {ratio:.3e} is not below {WEAK_FIELD_THRESHOLD:g}; "
            "linearized operations are not permitted"
        )


def hup_bound(constants: PhysicalConstants, name: str = "h") -> float:
    """Lower bound on dz*dp: ``"h"`` (default, loose form) or ``"hbar/2"``."""
    if name == "h":
        return constants.h
    if name == "hbar/2":
        return constants.hbar / 2.0
    raise ValueError(f"unknown HUP bound {name!r}; expected one of {HUP_BOUNDS}")


@dataclass(frozen=True)
class UncertaintySpec:
    """Position and momentum spreads (standard deviations) of an ensemble."""

    dz: float
    dp: float

    def __post_init__(self) -> None:
        for name in ("dz", "dp"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise NonPositiveInput(f"{name} must be non-negative and finite, got {value!r}")
            if value == 0.0:
                raise DegenerateSpec(f"{name} is zero")

    @property
    def hup_product(self) -> float:
        return self.dz * self.dp

    def satisfies(self, bound: float, rtol: float = 1e-9) -> bool:
        return self.hup_product >= bound * (1.0 - rtol)

    def scaled(self, factor: float) -> UncertaintySpec:
        return UncertaintySpec(self.dz * factor, self.dp * factor)

    @classmethod
    def saturating(cls, bound: float, *, dz: float | None = None, dp: float | None = None) -> UncertaintySpec:
        """Spec with dz*dp == bound; exactly one of ``dz``/``dp`` is given."""
        if (dz is None) == (dp is None):
            raise ValueError("give exactly one of dz, dp")
        if dz is not None:
            return cls(dz, bound / dz)
        return cls(bound / dp, dp)


@dataclass(frozen=True)
class BoxConfig:
    """Spring balance holding the photon box.

    ``z0`` is the loaded equilibrium (box plus photon), ``z1`` the equilibrium
    after emission and ``z2 = 2 z1 - z0`` the upper turning point.
    Computations should use :attr:`amplitude` rather than ``z1 - z0``: the
    amplitude is many orders of magnitude below the resolution of the
    absolute positions.
    """

    M: float
    m: float
    k_spring: float
    g: float
    omega: float = field(init=False)
    T: float = field(init=False)
    z0: float = field(init=False)
    z1: float = field(init=False)
    z2: float = field(init=False)

    def __post_init__(self) -> None:
        omega = math.sqrt(self.k_spring / self.M)
        amplitude = self.m * self.g / self.k_spring
        z1 = -self.M * self.g / self.k_spring
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "T", 2.0 * math.pi / omega)
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z0", z1 - amplitude)
        object.__setattr__(self, "z2", z1 + amplitude)

    @property
    def amplitude(self) -> float:
        """z1 - z0 = m g / k, computed without cancellation."""
        return self.m * self.g / self.k_spring

    @property
    def max_speed(self) -> float:
        return self.omega * self.amplitude


def derive_box_config(
    M: float,
    m: float,
    k_spring: float,
    constants: PhysicalConstants,
    *,
    g: float | None = None,
) -> BoxConfig:
    """Build a :class:`BoxConfig` from raw masses and the spring constant.

    ``g`` is derived from the source mass unless explicitly overridden
    (pedagogical runs).

    Raises:
        NonPositiveInput: M, k_spring or g not positive, or m negative.
        RegimeViolation: m/M or the weak-field parameter too large.
    """
    for name, value in (("M", M), ("k_spring", k_spring)):
        if not (value > 0.0 and math.isfinite(value)):
            raise NonPositiveInput(f"{name} must be positive, got {value!r}")
    if not (m >= 0.0 and math.isfinite(m)):
        raise NonPositiveInput(f"m must be non-negative, got {m!r}")
    if m / M >= MASS_RATIO_THRESHOLD:
        raise RegimeViolation(f"m/M = {m / M:.3e} is not below {MASS_RATIO_THRESHOLD:g}")
    require_weak_field(constants)
    if g is None:
        g = constants.surface_gravity
    if not (g > 0.0 and math.isfinite(g)):
        raise NonPositiveInput(f"g must be positive, got {g!r} (is M_g zero?)")
    return BoxConfig(M=float(M), m=float(m), k_spring=float(k_spring), g=float(g))
