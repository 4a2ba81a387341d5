"""Orthogonalization time of a finite quantum system.

For a Hermitian ``H`` and a unit state ``phi`` the overlap
``<phi| exp(-i H t / hbar) |phi>`` is evaluated through the spectral
decomposition of ``H``.  The first time the state becomes orthogonal to
itself, times the energy spread, is bounded below by ``sqrt(2) hbar``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PhysicalConstants
from .errors import InputError, NoOrthogonalTime
from .roots import bisect

CRITERIA = ("modulus", "real_part")


@dataclass(frozen=True, eq=False)
class MTProblem:
    H: np.ndarray
    phi: np.ndarray

    def __post_init__(self) -> None:
        H = np.asarray(self.H, dtype=complex)
        phi = np.asarray(self.phi, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise InputError(f"H must be square, got shape {H.shape}")
        if H.shape[0] < 2:
            raise InputError("dimension must be at least 2")
        scale = max(np.max(np.abs(H)), np.finfo(float).tiny)
        if np.max(np.abs(H - H.conj().T)) > 1e-12 * scale:
            raise InputError("H is not Hermitian")
        if phi.shape != (H.shape[0],):
            raise InputError(f"phi must have shape ({H.shape[0]},), got {phi.shape}")
        if abs(np.linalg.norm(phi) - 1.0) > 1e-12:
            raise InputError("phi is not normalized")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "phi", phi)

    @property
    def dim(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class MTResult:
    T0: float
    dE: float
    product: float
    bound: float
    overlap: float

    @property
    def passes(self) -> bool:
        return self.product >= self.bound * (1.0 - 1e-9)


def energy_spread(problem: MTProblem) -> float:
    """Standard deviation of H in the state phi."""
    phi, H = problem.phi, problem.H
    mean = np.vdot(phi, H @ phi).real
    second = np.vdot(H @ phi, H @ phi).real
    return math.sqrt(max(second - mean**2, 0.0))


class _Spectral:
    def __init__(self, problem: MTProblem, hbar: float):
        energies, vectors = np.linalg.eigh(problem.H)
        weights = np.abs(vectors.conj().T @ problem.phi) ** 2
        self.weights = weights / weights.sum()
        self.spectral_range = float(energies[-1] - energies[0])
        mean = float(self.weights @ energies)
        # centered angular frequencies
        self.freqs = (energies - mean) / hbar

    def real_part(self, t):
        t = np.asarray(t, dtype=float)
        return np.cos(np.multiply.outer(t, self.freqs)) @ self.weights

    def modulus(self, t):
        t = np.asarray(t, dtype=float)
        return np.abs(np.exp(-1j * np.multiply.outer(t, self.freqs)) @ self.weights)


def overlap(problem: MTProblem, t: float, constants: PhysicalConstants) -> complex:
    """<phi| exp(-i H t / hbar) |phi> via the spectral decomposition."""
    energies, vectors = np.linalg.eigh(problem.H)
    coeff = vectors.conj().T @ problem.phi
    return complex(np.sum(np.abs(coeff) ** 2 * np.exp(-1j * energies * t / constants.hbar)))


def orthogonalization_time(
    problem: MTProblem,
    constants: PhysicalConstants,
    *,
    scan_resolution: int = 4096,
    overlap_tol: float = 1e-9,
    horizon: float | None = None,
    criterion: str = "modulus",
) -> tuple[float, float]:
    """First positive time at which the state is (weakly) orthogonal to itself.

    Candidates are sign changes of the real part of the centered overlap,
    located on a uniform grid and refined by bisection.  With
    ``criterion="modulus"`` a candidate is accepted only if the full overlap
    modulus is below ``overlap_tol``; ``"real_part"`` accepts the first zero
    of the real part, which is all the lower bound needs.

    Returns ``(T0, |overlap(T0)|)``.

    Raises:
        NoOrthogonalTime: nothing found before ``horizon`` (default ten
            periods of the fastest spectral frequency).
    """
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    spec = _Spectral(problem, constants.hbar)
    if spec.spectral_range <= 0.0:
        raise NoOrthogonalTime("H is proportional to the identity")
    if horizon is None:
        horizon = 10.0 * 2.0 * math.pi * constants.hbar / spec.spectral_range
    grid = np.linspace(0.0, horizon, scan_resolution + 1)
    values = spec.real_part(grid)
    signs = np.sign(values)
    idx = np.nonzero(signs[:-1] * signs[1:] <= 0)[0]
    for i in idx:
        t = float(bisect(spec.real_part, grid[i], grid[i + 1], 4 * np.finfo(float).eps * grid[i + 1])[0])
        mod = float(spec.modulus(t))
        if criterion == "real_part" or mod <= overlap_tol:
            return t, mod
    raise NoOrthogonalTime(f"no orthogonal time within horizon {horizon:.6e} s")


def mandelstam_tamm_check(
    problem: MTProblem,
    constants: PhysicalConstants,
    scan_resolution: int = 4096,
    *,
    overlap_tol: float = 1e-9,
    horizon: float | None = None,
    criterion: str = "modulus",
) -> MTResult:
    """Compare dE * T0 with sqrt(2) hbar.

    Raises:
        NoOrthogonalTime: propagated from :func:`orthogonalization_time`.
    """
    T0, mod = orthogonalization_time(
        problem,
        constants,
        scan_resolution=scan_resolution,
        overlap_tol=overlap_tol,
        horizon=horizon,
        criterion=criterion,
    )
    dE = energy_spread(problem)
    return MTResult(T0=T0, dE=dE, product=dE * T0, bound=math.sqrt(2.0) * constants.hbar, overlap=mod)


def random_problem(rng: np.random.Generator, dim: int, energy_scale: float) -> MTProblem:
    """Random Hermitian matrix (GUE-like, entries ~ ``energy_scale``) and state."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    H = 0.5 * (a + a.conj().T) * energy_scale
    phi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return MTProblem(H, phi / np.linalg.norm(phi))


def random_orthogonalizable_problem(rng: np.random.Generator, dim: int, energy_scale: float) -> MTProblem:
    """Random Hermitian matrix with a state spread evenly over two eigenvectors.

    Such a state becomes exactly orthogonal to itself after
    ``pi hbar / |E_i - E_j|``.
    """
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    H = 0.5 * (a + a.conj().T) * energy_scale
    _, vectors = np.linalg.eigh(H)
    i, j = rng.choice(dim, size=2, replace=False)
    phases = np.exp(2j * np.pi * rng.random(2))
    phi = (phases[0] * vectors[:, i] + phases[1] * vectors[:, j]) / math.sqrt(2.0)
    return MTProblem(H, phi)


def two_level_problem(E: float) -> MTProblem:
    """diag(+E, -E) with the equal superposition; T0 = pi hbar / (2E)."""
    return MTProblem(np.diag([E, -E]).astype(complex), np.array([1.0, 1.0]) / math.sqrt(2.0))


@dataclass(frozen=True)
class SweepSummary:
    trials: int
    found: int
    no_orthogonal_time: int
    violations: int
    min_ratio: float

    @property
    def passes(self) -> bool:
        return self.violations == 0


def property_sweep(
    constants: PhysicalConstants,
    *,
    trials: int = 100,
    dim: int = 8,
    seed: int = 0,
    energy_scale: float = 1e-24,
    criterion: str = "modulus",
    scan_resolution: int = 4096,
    orthogonalizable: bool = False,
) -> SweepSummary:
    """Run the bound over random problems.

    ``orthogonalizable=True`` draws states that are guaranteed to reach an
    orthogonal state; generic random states almost never do exactly.

    ``min_ratio`` is the smallest ``product / bound`` among problems with an
    orthogonal time (``inf`` if none).  When checking a deliberately wrong
    ``hbar`` the bound is still evaluated with the supplied constants.
    """
    rng = np.random.default_rng(seed)
    found = none = bad = 0
    min_ratio = math.inf
    for _ in range(trials):
        make = random_orthogonalizable_problem if orthogonalizable else random_problem
        problem = make(rng, dim, energy_scale)
        try:
            res = mandelstam_tamm_check(problem, constants, scan_resolution, criterion=criterion)
        except NoOrthogonalTime:
            none += 1
            continue
        found += 1
        min_ratio = min(min_ratio, res.product / res.bound)
        if not res.passes:
            bad += 1
    return SweepSummary(trials, found, none, bad, min_ratio)
