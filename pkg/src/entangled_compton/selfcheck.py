"""Fast internal consistency checks, run by ``ecompton selfcheck``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .amplitudes import (
    Photon,
    ScatteringGeometry,
    double_compton_amplitudes,
    double_compton_on_factorized,
    ordering_integrals,
    single_compton_amplitude,
)
from .observables import concurrence, stokes_tensor
from .pulse import LaserPulse, PhaseCoefficients
from .quadrature import pair_integrals
from .relativistic import check_gamma_algebra, dirac_spinor, minkowski_dot, slash


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name:<40s} {self.value:.2e} (tol {self.tolerance:.0e})"


def _rel(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))) / np.max(np.abs(b)))


def _geometry(w1=0.3, w2=0.45):
    g0, w0 = 70.7, 1e-5
    pulse = LaserPulse(0.1, w0, 40.0)
    scale = 4 * g0**2 * w0
    photons = (Photon(w1 * scale, 1 / g0, np.pi / 2), Photon(w2 * scale, 1 / g0, 3 * np.pi / 2))
    return ScatteringGeometry(pulse, g0, photons)


def check_dirac() -> CheckResult:
    check_gamma_algebra()
    p = np.array([np.sqrt(1 + 0.3**2 + 0.4**2 + 1.2**2), 0.3, -0.4, 1.2])
    worst = 0.0
    for spin in (0.5, -0.5):
        u = dirac_spinor(p, spin)
        worst = max(worst, float(np.abs((slash(p) - np.eye(4)) @ u.components).max()))
    return CheckResult("Dirac equation on spinors", worst, 1e-12)


def check_backends() -> CheckResult:
    if len(kernels.BACKENDS) < 2:
        return CheckResult("kernel backend parity (single backend)", 0.0, 1e-10)
    pulse = LaserPulse(0.5, 1e-5, 40.0)
    a = PhaseCoefficients(0.8, 0.3 + 0.0j, 4.0)
    b = PhaseCoefficients(1.7, -0.2 + 0.1j, -3.0)
    ref = pair_integrals(pulse, a, b, backend="python")
    alt = pair_integrals(pulse, a, b, backend="compiled")
    return CheckResult("kernel backend parity", _rel(alt.total, ref.total), 1e-10)


def check_ward(geo=None) -> CheckResult:
    geo = geo or _geometry()
    integrals = [ordering_integrals(geo, o) for o in (0, 1)]
    amp = double_compton_amplitudes(geo, integrals=integrals)
    worst = 0.0
    for j in range(2):
        pols = [ph.basis.astype(complex) for ph in geo.photons]
        pols[j] = np.array([geo.q(j), geo.q(j)], dtype=complex)
        gauge = double_compton_amplitudes(geo, pols=pols, integrals=integrals)
        worst = max(worst, float(np.abs(gauge.total).max() / np.abs(amp.total).max()))
    return CheckResult("Ward identity, two photons", worst, 1e-6)


def check_single_ward() -> CheckResult:
    g0 = 70.7
    pulse = LaserPulse(0.1, 1e-5, 40.0)
    geo = ScatteringGeometry(pulse, g0, (Photon(0.45 * 4 * g0**2 * 1e-5, 0.5 / g0, 0.3),))
    amp = single_compton_amplitude(geo)
    gauge = single_compton_amplitude(geo, pols=[np.array([geo.q(0)] * 2, dtype=complex)])
    return CheckResult("Ward identity, one photon", float(np.abs(gauge).max() / np.abs(amp).max()), 1e-6)


def check_on_shell_factorization(geo=None) -> CheckResult:
    geo = geo or _geometry()
    integrals = [ordering_integrals(geo, o) for o in (0, 1)]
    on = double_compton_amplitudes(geo, integrals=integrals).on
    fac = double_compton_on_factorized(geo, integrals=integrals)
    return CheckResult("on-shell factorization", _rel(fac, on), 1e-6)


def check_final_momentum(geo=None) -> CheckResult:
    geo = geo or _geometry()
    p2 = geo.final_momentum
    return CheckResult("final electron on shell", abs(float(minkowski_dot(p2, p2)) - 1.0), 1e-9)


def check_entanglement() -> CheckResult:
    bell = np.zeros(4, dtype=complex)
    bell[[0, 3]] = 1 / np.sqrt(2)
    rho_bell = np.outer(bell, bell.conj())
    errs = [abs(concurrence(rho_bell) - 1.0), abs(concurrence(np.eye(4) / 4))]
    for p in (0.0, 0.2, 1 / 3, 0.5, 1.0):
        werner = p * rho_bell + (1 - p) * np.eye(4) / 4
        errs.append(abs(concurrence(werner) - max(0.0, (3 * p - 1) / 2)))
    singlet = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    s = stokes_tensor(np.outer(singlet, singlet.conj())).values
    errs.extend(abs(s[i, i] + 1.0) for i in (1, 2, 3))
    return CheckResult("concurrence and Stokes fixed points", float(max(errs)), 1e-10)


CHECKS = (
    check_dirac,
    check_backends,
    check_final_momentum,
    check_ward,
    check_single_ward,
    check_on_shell_factorization,
    check_entanglement,
)


def run_selfcheck() -> list[CheckResult]:
    return [check() for check in CHECKS]
