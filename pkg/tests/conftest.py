import math

import pytest

from photonbox.core import PhysicalConstants, UncertaintySpec, derive_box_config


@pytest.fixture(scope="session")
def earth():
    return PhysicalConstants()


@pytest.fixture(scope="session")
def box(earth):
    # 1 kg box, 1 s period, photon mass-equivalent 1e-12 kg
    return derive_box_config(1.0, 1e-12, 4.0 * math.pi**2, earth)


@pytest.fixture(scope="session")
def spec(earth):
    return UncertaintySpec.saturating(earth.h, dz=1e-16)
