import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from photonbox.core import (
    BoxConfig,
    PhysicalConstants,
    UncertaintySpec,
    derive_box_config,
    hup_bound,
    require_weak_field,
    validate_constants,
)
from photonbox.errors import DegenerateSpec, NonPositiveInput, RegimeViolation

masses = st.floats(1e-3, 1e3)
springs = st.floats(1e-2, 1e4)
gravities = st.floats(0.1, 100.0)


def test_hbar_defaults_from_h(earth):
    assert earth.hbar == pytest.approx(earth.h / (2 * math.pi), rel=1e-12)
    assert validate_constants(earth).hbar_consistent


def test_with_h_resets_hbar(earth):
    other = earth.with_(h=2 * earth.h)
    assert other.hbar == pytest.approx(2 * earth.hbar, rel=1e-15)


@pytest.mark.parametrize("field", ["c", "G", "h", "r0"])
def test_constants_reject_non_positive(field):
    with pytest.raises(NonPositiveInput):
        PhysicalConstants(**{field: 0.0})


def test_zero_source_mass_allowed():
    flat = PhysicalConstants(M_g=0.0)
    diag = validate_constants(flat)
    assert diag.weak_field_ratio == 0.0 and diag.passes


def test_earth_weak_field_magnitude(earth):
    diag = validate_constants(earth)
    assert float(f"{diag.weak_field_ratio:.1e}") == 1.4e-9
    assert diag.weak_field_ok


def test_strong_field_fails_diagnostic(earth):
    # choose r0 so that 2GM/(c^2 r0) = 1e-3
    r0 = earth.schwarzschild_radius / 1e-3
    diag = validate_constants(earth.with_(r0=r0))
    assert diag.weak_field_ratio == pytest.approx(1e-3)
    assert not diag.weak_field_ok
    with pytest.raises(RegimeViolation):
        require_weak_field(earth.with_(r0=r0))


def test_inconsistent_hbar_reported_not_raised(earth):
    diag = validate_constants(earth.with_(hbar=1e-34))
    assert not diag.hbar_consistent and not diag.passes


def test_hup_bound_choices(earth):
    assert hup_bound(earth) == earth.h
    assert hup_bound(earth, "hbar/2") == earth.hbar / 2
    with pytest.raises(ValueError):
        hup_bound(earth, "planck")


def test_hand_evaluated_equilibrium(earth):
    cfg = derive_box_config(1.0, 0.0, 10.0, earth, g=10.0)
    assert cfg.z0 == -1.0 and cfg.z1 == -1.0 and cfg.z2 == -1.0


def test_one_second_period(earth):
    cfg = derive_box_config(1.0, 1e-12, 4 * math.pi**2, earth)
    assert cfg.T == pytest.approx(1.0, rel=1e-15)
    assert cfg.omega == pytest.approx(2 * math.pi, rel=1e-15)


def test_g_derived_from_source(earth, box):
    assert box.g == earth.G * earth.M_g / earth.r0**2
    assert 9.8 < box.g < 9.83


@pytest.mark.parametrize(
    "kwargs, exc",
    [
        ({"M": 0.0}, NonPositiveInput),
        ({"k_spring": -1.0}, NonPositiveInput),
        ({"m": -1e-12}, NonPositiveInput),
        ({"m": 1e-3}, RegimeViolation),
    ],
)
def test_derive_rejects(earth, kwargs, exc):
    raw = {"M": 1.0, "m": 1e-12, "k_spring": 40.0, **kwargs}
    with pytest.raises(exc):
        derive_box_config(raw["M"], raw["m"], raw["k_spring"], earth)


def test_derive_rejects_strong_field(earth):
    with pytest.raises(RegimeViolation):
        derive_box_config(1.0, 1e-12, 40.0, earth.with_(r0=earth.schwarzschild_radius * 10))


@given(M=masses, mr=st.floats(1e-15, 9e-7), k=springs, g=gravities)
def test_box_invariants(M, mr, k, g):
    cfg = BoxConfig(M, M * mr, k, g)
    assert cfg.omega**2 == pytest.approx(k / M, rel=1e-14)
    assert cfg.T * cfg.omega == pytest.approx(2 * math.pi, rel=1e-15)
    # pointer positions: z2 - z1 = z1 - z0 up to rounding of the absolute positions
    assert (cfg.z2 - cfg.z1) - (cfg.z1 - cfg.z0) == pytest.approx(0.0, abs=4 * math.ulp(cfg.z0))
    assert k * cfg.amplitude - cfg.m * g == pytest.approx(0.0, abs=1e-15 * cfg.m * g)
    assert k * abs(cfg.z0) == pytest.approx((M + cfg.m) * g, rel=1e-14)
    assert cfg.z0 <= cfg.z1 <= cfg.z2 < 0


@given(M=masses, k=springs, g=gravities)
def test_derive_is_pure(M, k, g):
    c = PhysicalConstants()
    a = derive_box_config(M, M * 1e-9, k, c, g=g)
    b = derive_box_config(M, M * 1e-9, k, c, g=g)
    assert a == b


def test_uncertainty_spec_validation():
    with pytest.raises(DegenerateSpec):
        UncertaintySpec(0.0, 1.0)
    with pytest.raises(NonPositiveInput):
        UncertaintySpec(-1.0, 1.0)
    with pytest.raises(NonPositiveInput):
        UncertaintySpec(float("nan"), 1.0)


@given(dz=st.floats(1e-20, 1e-6), bound=st.floats(1e-35, 1e-32))
def test_saturating_spec_meets_bound(dz, bound):
    spec = UncertaintySpec.saturating(bound, dz=dz)
    assert spec.satisfies(bound)
    assert spec.hup_product == pytest.approx(bound, rel=1e-15)
    assert not spec.scaled(0.999).satisfies(bound)
