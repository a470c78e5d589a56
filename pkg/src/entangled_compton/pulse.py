"""Pulsed plane-wave background field and the classical phases it induces.

The laser four-potential is ``A_B(phi) = calA(phi) eps + c.c.`` with the
cos^2 window

    calA(phi) = A0 cos^2(pi phi / dphi) e^{-i phi},   |phi| <= dphi / 2,

and zero outside.  ``A0`` follows from the nonlinearity parameter through
``a0 = sqrt(2) |e| A0 / m``.  Phases are built from running integrals of
``calA / A0`` and ``A_B^2 / A0^2`` that are tabulated once per pulse.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import MaskedPointError
from .grid import PanelGrid, reference_rule
from .relativistic import ELECTRON_MASS, minkowski_dot

FINE_STRUCTURE = 1.0 / 137.035999
#: electron charge in natural Heaviside-Lorentz units (negative)
E_CHARGE = -np.sqrt(4.0 * np.pi * FINE_STRUCTURE)

LINEAR_X = (0j, 1 + 0j, 0j, 0j)
#: circular polarizations; ``(0, 1, -i, 0)/sqrt(2)`` is the right-handed one
CIRCULAR_RIGHT = (0j, 1 / np.sqrt(2) + 0j, -1j / np.sqrt(2), 0j)
CIRCULAR_LEFT = (0j, 1 / np.sqrt(2) + 0j, 1j / np.sqrt(2), 0j)

# cumulative tables use panels of about a quarter carrier period
_TABLE_PANEL_WIDTH = np.pi / 4


@dataclass(frozen=True)
class LaserPulse:
    """Finite cos^2 plane-wave pulse.

    Parameters
    ----------
    a0 : float
        Classical nonlinearity parameter.
    omega0 : float
        Laser photon energy in units of the electron mass.
    delta_phi : float
        Total pulse length in laser phase.
    polarization : tuple of complex
        Four-polarization ``eps`` with ``eps.k = 0``.
    direction : tuple of float
        Propagation direction ``n0`` (unit three-vector).
    """

    a0: float
    omega0: float
    delta_phi: float
    polarization: tuple = LINEAR_X
    direction: tuple = (0.0, 0.0, -1.0)

    def __post_init__(self):
        if self.delta_phi <= 0 or self.omega0 <= 0 or self.a0 < 0:
            raise ValueError("pulse needs a0 >= 0, omega0 > 0 and delta_phi > 0")
        object.__setattr__(self, "polarization", tuple(complex(c) for c in self.polarization))
        object.__setattr__(self, "direction", tuple(float(c) for c in self.direction))
        n = np.asarray(self.direction)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")
        if abs(minkowski_dot(self.eps, self.k)) > 1e-12 * self.omega0:
            raise ValueError("polarization must be transverse (eps.k = 0)")

    @cached_property
    def k(self) -> np.ndarray:
        return self.omega0 * np.concatenate([[1.0], self.direction])

    @cached_property
    def k_plus(self) -> np.ndarray:
        return self.omega0 * np.concatenate([[1.0], -np.asarray(self.direction)])

    @cached_property
    def eps(self) -> np.ndarray:
        return np.array(self.polarization, dtype=complex)

    @property
    def A0(self) -> float:
        return self.a0 * ELECTRON_MASS / (np.sqrt(2.0) * abs(E_CHARGE))

    @property
    def eA0(self) -> float:
        return E_CHARGE * self.A0

    @property
    def e2A02(self) -> float:
        return (E_CHARGE * self.A0) ** 2

    @cached_property
    def _eps_eps(self) -> complex:
        return complex(minkowski_dot(self.eps, self.eps))

    @cached_property
    def _eps_epsc(self) -> float:
        return float(minkowski_dot(self.eps, np.conj(self.eps)).real)

    # -- field shapes -------------------------------------------------

    def envelope(self, phi):
        """Normalised magnitude ``|calA| / A0``: the cos^2 window."""
        phi = np.asarray(phi, dtype=float)
        inside = np.abs(phi) <= 0.5 * self.delta_phi
        return np.where(inside, np.cos(np.pi * phi / self.delta_phi) ** 2, 0.0)

    def normalized_amplitude(self, phi):
        """``calA(phi) / A0``."""
        phi = np.asarray(phi, dtype=float)
        return self.envelope(phi) * np.exp(-1j * phi)

    def envelope_amplitude(self, phi):
        """Complex envelope ``calA(phi)``; zero outside the pulse."""
        return self.A0 * self.normalized_amplitude(phi)

    def normalized_field_squared(self, phi):
        """``A_B^2 / A0^2``; non-positive for a transverse real potential."""
        amp = self.normalized_amplitude(phi)
        return 2.0 * (amp**2 * self._eps_eps).real + 2.0 * np.abs(amp) ** 2 * self._eps_epsc

    def field_value(self, phi):
        """Real four-potential ``A_B(phi)``, shape ``(..., 4)``."""
        amp = self.envelope_amplitude(phi)
        return 2.0 * (np.asarray(amp)[..., None] * self.eps).real

    def field_squared(self, phi):
        """``A_B(phi) . A_B(phi)``."""
        return self.A0**2 * self.normalized_field_squared(phi)

    # -- running integrals ----------------------------------------------

    @cached_property
    def _table(self):
        n_panels = max(4, int(np.ceil(self.delta_phi / _TABLE_PANEL_WIDTH)))
        grid = PanelGrid(-0.5 * self.delta_phi, 0.5 * self.delta_phi, n_panels)
        amp = self.normalized_amplitude(grid.nodes)
        sq = self.normalized_field_squared(grid.nodes)
        shaped = np.stack([amp, sq.astype(complex)]).reshape(2, n_panels, grid.order)
        totals = shaped @ grid.panel_weights
        starts = np.concatenate([np.zeros((2, 1), complex), np.cumsum(totals, axis=-1)], axis=-1)
        return grid, starts

    def _running(self, phi, which: int):
        grid, starts = self._table
        phi = np.asarray(phi, dtype=float)
        clipped = np.clip(phi, grid.lower, grid.upper)
        idx = np.minimum(((clipped - grid.lower) // grid.width).astype(int), grid.n_panels - 1)
        a = grid.lower + idx * grid.width
        x, w, _ = reference_rule(grid.order)
        half = 0.5 * (clipped - a)
        pts = a[..., None] + half[..., None] * (x + 1.0)
        f = self.normalized_amplitude(pts) if which == 0 else self.normalized_field_squared(pts)
        return starts[which][idx] + half * (f @ w)

    def cumulative_amplitude(self, phi):
        """``int_{-inf}^{phi} calA / A0``; constant after the pulse."""
        return self._running(phi, 0)

    def cumulative_field_squared(self, phi):
        """``int_{-inf}^{phi} A_B^2 / A0^2``; constant after the pulse."""
        return self._running(phi, 1).real

    # -- phases --------------------------------------------------------

    def classical_phase(self, p, phi):
        """``f_p(phi) = int_{-inf}^{phi} (2e A_B.p - e^2 A_B^2) / (2 p.k)``."""
        pk = float(minkowski_dot(p, self.k))
        if pk == 0.0:
            raise MaskedPointError("lightfront-degenerate momentum")
        eps_p = complex(minkowski_dot(self.eps, p))
        lin = 2.0 * self.eA0 * np.real(eps_p * self.cumulative_amplitude(phi))
        quad = 0.5 * self.e2A02 * self.cumulative_field_squared(phi)
        return (lin - quad) / pk

    def light_cone_frame(self) -> "LightConeFrame":
        return LightConeFrame.from_pulse(self)

    @lru_cache(maxsize=16)
    def phase_grid(self, n_panels: int) -> "PulseGrid":
        return PulseGrid(self, n_panels)


@dataclass(frozen=True)
class LightConeFrame:
    """``k``, ``k_plus`` and two transverse unit four-vectors."""

    k: np.ndarray
    k_plus: np.ndarray
    eps1: np.ndarray
    eps2: np.ndarray

    @classmethod
    def from_pulse(cls, pulse: LaserPulse) -> "LightConeFrame":
        n = np.asarray(pulse.direction)
        trial = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        e1 = trial - n * (trial @ n)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(n, e1)
        return cls(pulse.k, pulse.k_plus, np.concatenate([[0.0], e1]), np.concatenate([[0.0], e2]))

    def decompose(self, x):
        """Light-cone coordinates ``(x_minus, x_plus, x_perp)`` of ``x``."""
        w0 = self.k[0]
        x_minus = minkowski_dot(x, self.k) / (np.sqrt(2.0) * w0)
        x_plus = minkowski_dot(x, self.k_plus) / (np.sqrt(2.0) * w0)
        x_perp = -np.stack([minkowski_dot(x, self.eps1), minkowski_dot(x, self.eps2)], axis=-1)
        return x_minus, x_plus, x_perp


class PulseGrid:
    """Pulse quantities tabulated on a Gauss-Legendre panel grid.

    Attributes hold node values of the normalised envelope ``env``, the
    carrier ``e^{-i phi}``, ``a2 = A_B^2 / A0^2`` and the running integrals
    ``c1 = int calA / A0`` and ``c2 = int a2`` from the pulse front.
    """

    def __init__(self, pulse: LaserPulse, n_panels: int):
        half = 0.5 * pulse.delta_phi
        self.grid = PanelGrid(-half, half, n_panels)
        phi = self.grid.nodes
        self.phi = phi
        self.weights = self.grid.weights
        self.smat = self.grid.smat
        self.env = pulse.envelope(phi)
        self.carrier = np.exp(-1j * phi)
        self.a2 = pulse.normalized_field_squared(phi)
        self.c1 = self.grid.cumulative(self.env * self.carrier)
        self.c2 = self.grid.cumulative(self.a2)
        for arr in (self.phi, self.env, self.carrier, self.a2, self.c1, self.c2):
            arr.setflags(write=False)

    @property
    def n_panels(self) -> int:
        return self.grid.n_panels

    @property
    def order(self) -> int:
        return self.grid.order


@dataclass(frozen=True)
class PhaseCoefficients:
    """Coefficients of the emission phase ``g_n``.

    ``g(phi) = kappa phi + int_{-inf}^{phi} [2e Re{zeta calA} - e^2 upsilon A_B^2 / 2]``
    """

    kappa: float
    zeta: complex
    upsilon: float

    def __add__(self, other: "PhaseCoefficients") -> "PhaseCoefficients":
        return PhaseCoefficients(
            self.kappa + other.kappa, self.zeta + other.zeta, self.upsilon + other.upsilon
        )

    def phase(self, pulse: LaserPulse, phi):
        """Evaluate ``g(phi)``."""
        phi = np.asarray(phi, dtype=float)
        lin = 2.0 * pulse.eA0 * np.real(self.zeta * pulse.cumulative_amplitude(phi))
        quad = 0.5 * pulse.e2A02 * self.upsilon * pulse.cumulative_field_squared(phi)
        return self.kappa * phi + lin - quad

    def phase_derivative(self, pulse: LaserPulse, phi):
        phi = np.asarray(phi, dtype=float)
        lin = 2.0 * pulse.eA0 * np.real(self.zeta * pulse.normalized_amplitude(phi))
        quad = 0.5 * pulse.e2A02 * self.upsilon * pulse.normalized_field_squared(phi)
        return self.kappa + lin - quad

    def max_rate(self, pulse: LaserPulse) -> float:
        """Upper bound on ``|g'|`` over the pulse."""
        return abs(self.kappa) + 2.0 * abs(pulse.eA0 * self.zeta) + 2.0 * pulse.e2A02 * abs(self.upsilon)


def _lightfront_term(pulse: LaserPulse, p0, total_q):
    # (kappa, zeta, upsilon) contributions of the electron after emitting total_q
    rest = p0 - total_q
    denom = float(minkowski_dot(pulse.k, rest))
    if abs(denom) <= 1e-300:
        raise MaskedPointError("collinear lightfront singularity")
    kappa = (minkowski_dot(p0, total_q) - 0.5 * minkowski_dot(total_q, total_q)) / denom
    zeta = complex(minkowski_dot(pulse.eps, rest)) / denom
    return float(kappa), zeta, 1.0 / denom


def phase_coefficients(pulse: LaserPulse, p0, photons_in_order, n: int) -> PhaseCoefficients:
    """Coefficients of the ``n``-th emission for a given emission order.

    ``photons_in_order`` lists the photon four-momenta in the order they are
    emitted (i.e. already permuted).  Each coefficient is the difference of
    the lightfront expression after ``n`` and after ``n - 1`` emissions.
    """
    if not 1 <= n <= len(photons_in_order):
        raise ValueError("emission index out of range")
    p0 = np.asarray(p0, dtype=float)
    after = np.sum(photons_in_order[:n], axis=0)
    before = np.sum(photons_in_order[: n - 1], axis=0) if n > 1 else np.zeros(4)
    k1, z1, u1 = _lightfront_term(pulse, p0, after)
    k0, z0, u0 = _lightfront_term(pulse, p0, before)
    return PhaseCoefficients(k1 - k0, z1 - z0, u1 - u0)


def vertex_coefficients(pulse: LaserPulse, p_in, p_out, q) -> PhaseCoefficients:
    """Phase coefficients for a single emission ``p_in -> p_out + q``.

    ``kappa = p_in.q / k.(p_in - q)``; ``zeta`` and ``upsilon`` are the
    differences of ``eps.p / k.p`` and ``1 / k.p`` between out and in.
    """
    k = pulse.k
    kin = float(minkowski_dot(k, p_in))
    kout = float(minkowski_dot(k, p_out))
    if kin == 0.0 or kout == 0.0:
        raise MaskedPointError("collinear lightfront singularity")
    kappa = float(minkowski_dot(p_in, q)) / float(minkowski_dot(k, np.asarray(p_in) - q))
    zeta = complex(minkowski_dot(pulse.eps, p_out)) / kout - complex(minkowski_dot(pulse.eps, p_in)) / kin
    return PhaseCoefficients(kappa, zeta, 1.0 / kout - 1.0 / kin)
