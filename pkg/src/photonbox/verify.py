"""Built-in invariant suite driven by ``photonbox verify``.

References are built from ``h`` rather than ``hbar`` wherever both could be
used, so an inconsistent ``hbar`` override shows up as failures in the
checks that depend on it.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from .core import BoxConfig, PhysicalConstants, UncertaintySpec, validate_constants
from .errors import NoOrthogonalTime
from .mandelstam_tamm import (
    mandelstam_tamm_check,
    random_orthogonalizable_problem,
    random_problem,
    two_level_problem,
)
from .phase_space import evolve_ensemble, oscillator_energy, propagate_uncertainty, sample_ensemble
from .relativity import (
    PhotonBounce,
    coordinate_time,
    delta_t_version1,
    delta_t_version2,
    delta_t_version2_quadrature,
    photon_mean_force,
    version1_trajectory,
)

GROUPS = ("liouville", "swap", "quadrature", "mt", "force", "magnitude")


@dataclass(frozen=True)
class CheckResult:
    group: str
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class VerifyContext:
    constants: PhysicalConstants
    box: BoxConfig
    spec: UncertaintySpec
    bounce: PhotonBounce
    seed: int = 0


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def check_liouville(ctx: VerifyContext) -> list[CheckResult]:
    box = ctx.box
    rng = np.random.default_rng(ctx.seed)
    n = 4000
    tol = 5.0 / math.sqrt(n)
    worst_det = 0.0
    worst_energy = 0.0
    for trial in range(100):
        dz = ctx.spec.dz * 10 ** rng.uniform(-1, 1)
        spec = UncertaintySpec(dz, ctx.spec.hup_product / dz * 10 ** rng.uniform(0, 1))
        dtau = rng.uniform(0.0, 3.0 * box.T)
        ens = sample_ensemble((-box.amplitude, 0.0), spec, n, ctx.seed + trial)
        out = evolve_ensemble(ens, dtau, box)
        worst_det = max(worst_det, _rel(out.covariance_determinant(), ens.covariance_determinant()))
        e0 = oscillator_energy(ens.z, ens.p, box)
        e1 = oscillator_energy(out.z, out.p, box)
        worst_energy = max(worst_energy, float(np.max(np.abs(e1 - e0) / e0)))
    return [
        CheckResult("liouville", "covariance determinant preserved", worst_det <= tol,
                    f"max rel change {worst_det:.2e} (tol {tol:.2e})"),
        CheckResult("liouville", "oscillator energy conserved", worst_energy <= 1e-10,
                    f"max rel change {worst_energy:.2e} (tol 1e-10)"),
    ]


def check_swap(ctx: VerifyContext) -> list[CheckResult]:
    box, spec = ctx.box, ctx.spec
    mw = box.M * box.omega
    q = propagate_uncertainty(spec, box.T / 4.0, box)
    qq = propagate_uncertainty(q, box.T / 4.0, box)
    swap_err = max(_rel(q.dz, spec.dp / mw), _rel(q.dp, mw * spec.dz))
    twice_err = max(_rel(qq.dz, spec.dz), _rel(qq.dp, spec.dp))
    n = 100_000
    ens = sample_ensemble((-box.amplitude, 0.0), spec, n, ctx.seed)
    half = evolve_ensemble(ens, box.T / 2.0, box)
    dz2, dp2 = half.std()
    ens_err = max(_rel(dz2, spec.dz), _rel(dp2, spec.dp))
    tol = 3.0 / math.sqrt(n)
    return [
        CheckResult("swap", "quarter period exchanges spreads", swap_err <= 1e-12, f"rel err {swap_err:.2e}"),
        CheckResult("swap", "two quarter periods restore spreads", twice_err <= 1e-12, f"rel err {twice_err:.2e}"),
        CheckResult("swap", "half-period ensemble spreads", ens_err <= tol, f"rel err {ens_err:.2e} (tol {tol:.2e})"),
    ]


def check_quadrature(ctx: VerifyContext) -> list[CheckResult]:
    box, spec, const = ctx.box, ctx.spec, ctx.constants
    ct = coordinate_time(version1_trajectory(box, const, spec.dz), const, quadrature_tol=1e-12)
    closed1 = delta_t_version1(box.amplitude + spec.dz, box, const)
    err1 = _rel(ct.gravitational, closed1)
    quad2 = delta_t_version2_quadrature(spec.dp, box, const).total
    err2 = _rel(quad2, delta_t_version2(spec.dp, box, const))
    return [
        CheckResult("quadrature", "quarter-period dilation vs closed form", err1 <= 1e-6, f"rel err {err1:.2e}"),
        CheckResult("quadrature", "half-period dilation vs closed form", err2 <= 1e-6, f"rel err {err2:.2e}"),
    ]


def check_mt(ctx: VerifyContext, trials: int = 100, dim: int = 8) -> list[CheckResult]:
    const = ctx.constants
    h_bar_ref = const.h / (2.0 * math.pi)
    E = 1e-24
    res = mandelstam_tamm_check(two_level_problem(E), const)
    expected = 0.5 * math.pi * h_bar_ref
    err = _rel(res.product, expected)
    out = [CheckResult("mt", "two-level product = (pi/2) hbar", err <= 1e-9, f"rel err {err:.2e}")]

    bound = const.h / (math.sqrt(2.0) * math.pi)
    for label, make, criterion in (
        ("random states, real-part zero", random_problem, "real_part"),
        ("random states, exact orthogonality", random_problem, "modulus"),
        ("orthogonalizable states", random_orthogonalizable_problem, "modulus"),
    ):
        rng = np.random.default_rng(ctx.seed)
        found = bad = 0
        for _ in range(trials):
            try:
                r = mandelstam_tamm_check(make(rng, dim, E), const, criterion=criterion)
            except NoOrthogonalTime:
                continue
            found += 1
            bad += r.product < bound * (1.0 - 1e-9)
        out.append(CheckResult("mt", f"bound over {trials} {label}", bad == 0,
                               f"{found} with T0, {bad} violations"))
    return out


def check_force(ctx: VerifyContext) -> list[CheckResult]:
    const, bounce = ctx.constants, ctx.bounce
    g = const.G * const.M_g / bounce.r0**2
    reference = -(const.h / (2.0 * math.pi)) * bounce.Omega0 * g / const.c**2
    sim = photon_mean_force(bounce, const, simulate=True)
    err = _rel(sim, reference)
    taller = PhotonBounce(bounce.Omega0, 2.0 * bounce.B, bounce.r0)
    b_err = _rel(photon_mean_force(taller, const, simulate=True), sim)
    flat = photon_mean_force(bounce, const.with_(M_g=0.0), simulate=True)
    return [
        CheckResult("force", "simulated force = photon weight", err <= 1e-6, f"rel err {err:.2e}"),
        CheckResult("force", "independent of box height", b_err <= 1e-4, f"rel change {b_err:.2e}"),
        CheckResult("force", "vanishes without gravity", flat == 0.0, f"F = {flat:.3e} N"),
    ]


def check_magnitude(ctx: VerifyContext) -> list[CheckResult]:
    diag = validate_constants(ctx.constants)
    shown = float(f"{diag.weak_field_ratio:.1e}")
    return [
        CheckResult("magnitude", "2GM/(c^2 r0) = 1.4e-9", shown == 1.4e-9 and diag.weak_field_ok,
                    f"{diag.weak_field_ratio:.4e}"),
    ]


CHECKS: dict[str, Callable[[VerifyContext], list[CheckResult]]] = {
    "liouville": check_liouville,
    "swap": check_swap,
    "quadrature": check_quadrature,
    "mt": check_mt,
    "force": check_force,
    "magnitude": check_magnitude,
}


def run_checks(ctx: VerifyContext, only: Iterable[str] | None = None) -> list[CheckResult]:
    groups = list(GROUPS) if not only else list(only)
    unknown = [g for g in groups if g not in CHECKS]
    if unknown:
        raise ValueError(f"unknown check group(s): {', '.join(unknown)}")
    results: list[CheckResult] = []
    for group in groups:
        try:
            results.extend(CHECKS[group](ctx))
        except Exception as exc:  # a crashing check is a failing check
            results.append(CheckResult(group, "check raised", False, f"{type(exc).__name__}: {exc}"))
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max((len(r.name) for r in results), default=0)
    lines = [
        f"{'PASS' if r.passed else 'FAIL'}  {r.group:<10}  {r.name:<{width}}  {r.detail}" for r in results
    ]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines)
