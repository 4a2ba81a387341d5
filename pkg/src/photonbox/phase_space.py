"""Phase-space ensembles of the box and their harmonic evolution.

Positions here are offsets from the post-emission equilibrium ``z1``
(``z = 0`` is the new rest position, the emission point sits at
``-amplitude``).  Spreads of order 1e-16 m are far below the float resolution
of absolute pointer readings, so absolute positions are never used for
sampling or evolution.

In the scaled coordinates ``(omega z, p / M)`` the motion is a rigid,
clockwise rotation about the origin; :func:`evolve` applies it in closed form.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO

import numpy as np

from ._parallel import chunked_map
from .core import BoxConfig, UncertaintySpec
from .errors import AmplitudeTooSmall, DegenerateSpec, HUPViolation

CSV_HEADER = ("index", "tau", "z", "p")

# exact (cos, sin) for multiples of a quarter turn
_QUARTER_TURNS = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


@dataclass(frozen=True)
class PhaseSample:
    z: float
    p: float
    tau: float = 0.0


@dataclass(frozen=True)
class AngleUncertainty:
    dphi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.dphi < math.pi / 2:
            raise ValueError(f"dphi must lie in [0, pi/2), got {self.dphi!r}")


@dataclass(frozen=True, eq=False)
class Ensemble:
    """A seeded collection of phase points, stored column-wise."""

    z: np.ndarray
    p: np.ndarray
    tau: float
    seed: int
    spec: UncertaintySpec
    center: tuple[float, float]

    def __len__(self) -> int:
        return len(self.z)

    def __getitem__(self, i: int) -> PhaseSample:
        return PhaseSample(float(self.z[i]), float(self.p[i]), self.tau)

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def std(self) -> tuple[float, float]:
        return float(np.std(self.z, ddof=1)), float(np.std(self.p, ddof=1))

    def covariance_determinant(self) -> float:
        return covariance_determinant(self.z, self.p)

    def moments_consistent(self, sigmas: float = 5.0) -> bool:
        """Sample mean/std agree with ``center``/``spec`` within ``sigmas/sqrt(N)``."""
        n = len(self)
        tol = sigmas / math.sqrt(n)
        sz, sp = self.std()
        zc, pc = self.center
        return (
            abs(float(np.mean(self.z)) - zc) <= tol * self.spec.dz
            and abs(float(np.mean(self.p)) - pc) <= tol * self.spec.dp
            and abs(sz / self.spec.dz - 1.0) <= tol
            and abs(sp / self.spec.dp - 1.0) <= tol
        )

    def within_sanity_bound(self, config: BoxConfig) -> bool:
        return bool(np.all(np.abs(self.z) <= 10.0 * config.amplitude))

    def write_csv(self, fh: IO[str]) -> None:
        """Dump as ``index,tau,z,p`` with 17 significant digits."""
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        tau = f"{self.tau:.16e}"
        for i, (z, p) in enumerate(zip(self.z.tolist(), self.p.tolist())):
            writer.writerow((i, tau, f"{z:.16e}", f"{p:.16e}"))


def covariance_determinant(z: np.ndarray, p: np.ndarray) -> float:
    return float(np.linalg.det(np.cov(np.vstack([z, p]))))


def sample_ensemble(
    center: tuple[float, float],
    spec: UncertaintySpec,
    n: int,
    seed: int,
    *,
    bound: float | None = None,
) -> Ensemble:
    """Draw ``n`` points from an uncorrelated Gaussian about ``center``.

    ``bound`` (normally h) is the admissibility floor for ``spec``; pass
    ``None`` to skip the check.  The draw order is fixed by ``seed`` alone.
    """
    if n < 2:
        raise ValueError(f"ensemble needs at least 2 samples, got {n}")
    if spec.dz == 0.0 or spec.dp == 0.0:
        raise DegenerateSpec("zero spread")
    if bound is not None and not spec.satisfies(bound):
        raise HUPViolation(f"dz*dp = {spec.hup_product:.6e} is below the bound {bound:.6e}")
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((n, 2))
    zc, pc = center
    z = zc + spec.dz * draws[:, 0]
    p = pc + spec.dp * draws[:, 1]
    return Ensemble(z=z, p=p, tau=0.0, seed=seed, spec=spec, center=(float(zc), float(pc)))


def _rotation(dtau: float, config: BoxConfig) -> tuple[float, float]:
    quarters = 4.0 * dtau / config.T
    nearest = round(quarters)
    if abs(quarters - nearest) <= 1e-12 * max(1.0, abs(quarters)):
        return _QUARTER_TURNS[nearest % 4]
    theta = config.omega * dtau
    return math.cos(theta), math.sin(theta)


def _evolve_arrays(z, p, dtau: float, config: BoxConfig):
    c, s = _rotation(dtau, config)
    mw = config.M * config.omega
    return z * c + (p / mw) * s, p * c - (mw * z) * s


def evolve(sample: PhaseSample, dtau: float, config: BoxConfig) -> PhaseSample:
    """Advance one phase point by proper time ``dtau``.

    Multiples of a quarter period are applied with exact cosines.
    """
    z, p = _evolve_arrays(sample.z, sample.p, dtau, config)
    return PhaseSample(float(z), float(p), sample.tau + dtau)


def evolve_ensemble(ensemble: Ensemble, dtau: float, config: BoxConfig, *, workers: int = 1) -> Ensemble:
    z, p = chunked_map(
        lambda zz, pp: _evolve_arrays(zz, pp, dtau, config), (ensemble.z, ensemble.p), workers
    )
    return Ensemble(
        z=z,
        p=p,
        tau=ensemble.tau + dtau,
        seed=ensemble.seed,
        spec=ensemble.spec,
        center=ensemble.center,
    )


def oscillator_energy(z, p, config: BoxConfig):
    """p^2 / 2M + k z^2 / 2 about the new equilibrium."""
    return p**2 / (2.0 * config.M) + 0.5 * config.k_spring * z**2


def propagate_uncertainty(spec: UncertaintySpec, dtau: float, config: BoxConfig) -> UncertaintySpec:
    """Marginal spreads of the rotated (initially uncorrelated) Gaussian."""
    c, s = _rotation(dtau, config)
    mw = config.M * config.omega
    dz = math.hypot(spec.dz * c, spec.dp / mw * s)
    dp = math.hypot(mw * spec.dz * s, spec.dp * c)
    return UncertaintySpec(dz, dp)


def angle_uncertainty(dp0: float, config: BoxConfig) -> AngleUncertainty:
    """Phase-angle spread produced by a momentum spread at the turning point."""
    if dp0 < 0.0:
        raise ValueError("dp0 must be non-negative")
    ratio = dp0 / (config.M * config.omega * config.amplitude) if config.amplitude > 0 else math.inf
    if ratio >= 1.0:
        raise AmplitudeTooSmall(
            f"momentum spread {dp0:.3e} exceeds M*omega*(z1 - z0) = "
            f"{config.M * config.omega * config.amplitude:.3e}"
        )
    return AngleUncertainty(math.asin(ratio))
