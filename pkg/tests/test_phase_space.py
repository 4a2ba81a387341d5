import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonbox.core import UncertaintySpec
from photonbox.errors import AmplitudeTooSmall, DegenerateSpec, HUPViolation
from photonbox.phase_space import (
    AngleUncertainty,
    PhaseSample,
    angle_uncertainty,
    evolve,
    evolve_ensemble,
    oscillator_energy,
    propagate_uncertainty,
    sample_ensemble,
)

fractions = st.floats(-5.0, 5.0)
times = st.floats(0.0, 10.0)


def test_saturating_ensemble_product(earth, spec):
    ens = sample_ensemble((0.0, 0.0), spec, 100_000, 3, bound=earth.h)
    sz, sp = ens.std()
    assert sz * sp == pytest.approx(earth.h, rel=0.03)
    assert ens.moments_consistent()


def test_two_sample_ensemble_reproducible(spec):
    a = sample_ensemble((0.0, 0.0), spec, 2, 11)
    b = sample_ensemble((0.0, 0.0), spec, 2, 11)
    assert len(a) == 2
    assert list(a) == list(b)


def test_sampling_order_fixed_by_seed(spec):
    a = sample_ensemble((1.0, 2.0), spec, 1000, 5)
    b = sample_ensemble((1.0, 2.0), spec, 1000, 5)
    c = sample_ensemble((1.0, 2.0), spec, 1000, 6)
    np.testing.assert_array_equal(a.z, b.z)
    assert not np.array_equal(a.z, c.z)


def test_sampling_rejects_bad_specs(earth, spec):
    with pytest.raises(DegenerateSpec):
        UncertaintySpec(0.0, 1.0)
    with pytest.raises(HUPViolation):
        sample_ensemble((0.0, 0.0), spec.scaled(0.5), 100, 0, bound=earth.h)
    with pytest.raises(ValueError):
        sample_ensemble((0.0, 0.0), spec, 1, 0)


def test_quarter_period_from_lower_turning_point(box):
    a = box.amplitude
    s = evolve(PhaseSample(-a, 0.0), box.T / 4, box)
    assert s.z == 0.0  # z1
    assert s.p == pytest.approx(box.M * box.omega * a, rel=1e-15)
    assert s.tau == box.T / 4


def test_half_period_reaches_upper_turning_point(box):
    a = box.amplitude
    s = evolve(PhaseSample(-a, 0.0), box.T / 2, box)
    assert s.z == a and s.p == 0.0


def test_full_period_identity(box):
    start = PhaseSample(-1.3e-13, 4.2e-13)
    end = evolve(start, box.T, box)
    assert (end.z, end.p) == (start.z, start.p)


def _norm(s, box):
    return math.hypot(box.omega * s.z, s.p / box.M)


@given(z=fractions, p=fractions, dtau=times)
def test_rotation_preserves_norm(box, z, p, dtau):
    s0 = PhaseSample(z * box.amplitude, p * box.M * box.max_speed)
    s1 = evolve(s0, dtau, box)
    if _norm(s0, box) > 0:
        assert _norm(s1, box) == pytest.approx(_norm(s0, box), rel=1e-12)


@given(z=fractions, p=fractions, a=times, b=times)
def test_flow_composition(box, z, p, a, b):
    s0 = PhaseSample(z * box.amplitude, p * box.M * box.max_speed)
    two = evolve(evolve(s0, a, box), b, box)
    one = evolve(s0, a + b, box)
    scale = _norm(s0, box)
    assert abs(box.omega * (two.z - one.z)) <= 1e-10 * scale + 1e-300
    assert abs((two.p - one.p) / box.M) <= 1e-10 * scale + 1e-300


@given(z=fractions, p=fractions, dtau=times)
def test_energy_conserved(box, z, p, dtau):
    s0 = PhaseSample(z * box.amplitude, p * box.M * box.max_speed)
    s1 = evolve(s0, dtau, box)
    e0 = oscillator_energy(s0.z, s0.p, box)
    e1 = oscillator_energy(s1.z, s1.p, box)
    assert e1 == pytest.approx(e0, rel=1e-10, abs=1e-300)


def test_quarter_swap_and_half_identity(box, spec):
    mw = box.M * box.omega
    q = propagate_uncertainty(spec, box.T / 4, box)
    assert q.dz == pytest.approx(spec.dp / mw, rel=1e-15)
    assert q.dp == pytest.approx(mw * spec.dz, rel=1e-15)
    twice = propagate_uncertainty(q, box.T / 4, box)
    assert twice.dz == pytest.approx(spec.dz, rel=1e-15) and twice.dp == pytest.approx(spec.dp, rel=1e-15)
    assert propagate_uncertainty(spec, box.T / 2, box) == spec
    assert propagate_uncertainty(spec, 0.0, box) == spec


@given(r=st.floats(-2.0, 2.0), dtau=times)
def test_propagated_product_never_shrinks(box, spec, r, dtau):
    s = UncertaintySpec(spec.dz * 10**r, spec.dp)
    out = propagate_uncertainty(s, dtau, box)
    assert out.hup_product >= s.hup_product * (1 - 1e-9)


@settings(max_examples=20, deadline=None)
@given(r=st.floats(-1.0, 1.0), dtau=times, seed=st.integers(0, 2**32))
def test_covariance_determinant_preserved(box, spec, r, dtau, seed):
    n = 4000
    s = UncertaintySpec(spec.dz * 10**r, spec.dp)
    ens = sample_ensemble((-box.amplitude, 0.0), s, n, seed)
    out = evolve_ensemble(ens, dtau, box)
    assert out.covariance_determinant() == pytest.approx(ens.covariance_determinant(), rel=5 / math.sqrt(n))


def test_ensemble_spreads_follow_propagation(box, spec):
    ens = sample_ensemble((-box.amplitude, 0.0), spec, 100_000, 1)
    out = evolve_ensemble(ens, 0.37 * box.T, box)
    pred = propagate_uncertainty(spec, 0.37 * box.T, box)
    sz, sp = out.std()
    assert sz == pytest.approx(pred.dz, rel=5 / math.sqrt(1e5))
    assert sp == pytest.approx(pred.dp, rel=5 / math.sqrt(1e5))


def test_evolve_ensemble_worker_invariant(box, spec):
    ens = sample_ensemble((-box.amplitude, 0.0), spec, 10_001, 9)
    a = evolve_ensemble(ens, 0.3, box, workers=1)
    b = evolve_ensemble(ens, 0.3, box, workers=4)
    assert a.z.tobytes() == b.z.tobytes() and a.p.tobytes() == b.p.tobytes()


def test_angle_uncertainty(box):
    full = box.M * box.omega * box.amplitude
    assert angle_uncertainty(0.0, box).dphi == 0.0
    assert angle_uncertainty(full / 2, box).dphi == pytest.approx(math.pi / 6, rel=1e-15)
    with pytest.raises(AmplitudeTooSmall):
        angle_uncertainty(2 * full, box)
    with pytest.raises(ValueError):
        AngleUncertainty(math.pi / 2)


def test_ensemble_csv_dump(spec):
    ens = sample_ensemble((0.0, 0.0), spec, 3, 0)
    buf = io.StringIO()
    ens.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "index,tau,z,p"
    assert len(lines) == 4
    idx, tau, z, p = lines[1].split(",")
    assert float(z) == ens.z[0] and float(p) == ens.p[0]
    assert len(z.split("e")[0].replace("-", "").replace(".", "")) == 17


def test_sanity_bound(box, spec):
    ens = sample_ensemble((-box.amplitude, 0.0), spec, 1000, 0)
    assert ens.within_sanity_bound(box)
