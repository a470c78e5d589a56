"""Field-weighted phase integrals for one and two emissions.

Three field functions appear in every vertex after expanding the emission
matrix in powers of the laser field.  Together with the bare phase they are
indexed by a *field key* ``(j, l)``:

==========  ==========================  ====
key         function                    slot
==========  ==========================  ====
``(0, 0)``  ``1``                       0
``(1, -1)`` ``A1 e^{-i phi}``            1
``(1, 1)``  ``A1 e^{+i phi}``            2
``(2, 0)``  ``A_B^2 / A0^2``             3
==========  ==========================  ====

with ``A1 = |calA| / A0``.  Integrals carrying the bare phase have an
oscillating boundary at infinity; they are never integrated directly but
obtained from integration-by-parts relations that only involve the field
slots (the Ward-identity regularization).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .errors import MaskedPointError
from .pulse import LaserPulse, PhaseCoefficients

FIELD_KEYS = ((0, 0), (1, -1), (1, 1), (2, 0))
SLOT = {key: i for i, key in enumerate(FIELD_KEYS)}


class Channel(str, Enum):
    OFF = "off"
    ON = "on"
    TOTAL = "total"


@dataclass(frozen=True)
class QuadratureSettings:
    """Grid sizing and cut-offs.

    The grid holds at least ``min_points`` nodes and at least
    ``points_per_period`` nodes per period of the fastest phase in the
    problem.  ``kappa_min`` is the smallest phase frequency for which the
    regularized zeroth-order integrals are trusted.
    """

    points_per_period: int = 24
    min_points: int = 2048
    rel_tolerance: float = 1e-6
    order: int = 16
    kappa_min: float = 1e-6

    def __post_init__(self):
        if self.points_per_period < 4 or self.min_points < self.order or self.order < 2:
            raise ValueError("quadrature settings too coarse")

    def n_panels(self, pulse: LaserPulse, max_rate: float) -> int:
        """Panel count (a power of two) for phases whose slope is below ``max_rate``."""
        periods = (max_rate + 2.0) * pulse.delta_phi / (2.0 * np.pi)
        n_points = max(self.min_points, self.points_per_period * periods)
        n = int(np.ceil(n_points / self.order))
        return 1 << max(0, (n - 1).bit_length())

    def refined(self, factor: int = 2) -> "QuadratureSettings":
        return QuadratureSettings(
            self.points_per_period * factor,
            self.min_points * factor,
            self.rel_tolerance,
            self.order,
            self.kappa_min,
        )


DEFAULT_SETTINGS = QuadratureSettings()


@dataclass(frozen=True)
class UpsilonKey:
    """Index of a double integral ``Upsilon_{j2 j1}(l2, l1)``."""

    j2: int
    l2: int
    j1: int
    l1: int
    channel: Channel = Channel.TOTAL

    def __post_init__(self):
        for key in ((self.j2, self.l2), (self.j1, self.l1)):
            if key not in SLOT:
                raise ValueError(f"unknown field key {key}")
        object.__setattr__(self, "channel", Channel(self.channel))

    @property
    def slots(self) -> tuple[int, int]:
        return SLOT[(self.j2, self.l2)], SLOT[(self.j1, self.l1)]

    @property
    def zeroth(self) -> bool:
        return self.j2 == 0 or self.j1 == 0


def _check_rate(kappa: float, settings: QuadratureSettings, what: str) -> None:
    if not abs(kappa) > settings.kappa_min:
        raise MaskedPointError(f"soft/collinear kinematics: zeroth-order regularization invalid ({what})")


def regularized_zeroth(coeffs: PhaseCoefficients, moments, eA0: float, e2A02: float) -> complex:
    """Finite part of ``int e^{i g}`` from the three field moments of ``g``.

    ``moments`` are ``int F_b e^{i g}`` for the field slots 1..3.
    """
    k = coeffs.kappa
    return -(
        eA0 * coeffs.zeta * moments[0]
        + eA0 * np.conj(coeffs.zeta) * moments[1]
        - 0.5 * e2A02 * coeffs.upsilon * moments[2]
    ) / k


@dataclass(frozen=True)
class VertexIntegrals:
    """Moments of a single emission phase, slot 0 regularized."""

    coeffs: PhaseCoefficients
    moments: np.ndarray  # (4,)
    n_panels: int


def vertex_integrals(
    pulse: LaserPulse,
    coeffs: PhaseCoefficients,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    backend: str | None = None,
    n_panels: int | None = None,
) -> VertexIntegrals:
    """Integrals ``int F_b e^{i g}`` for one emission vertex."""
    _check_rate(coeffs.kappa, settings, "single vertex")
    if n_panels is None:
        n_panels = settings.n_panels(pulse, coeffs.max_rate(pulse))
    pg = pulse.phase_grid(n_panels)
    kern = kernels.get_backend(backend)
    field = np.asarray(
        kern.vertex_moments(
            pg.weights, pg.phi, pg.env, pg.carrier, pg.a2, pg.c1, pg.c2,
            coeffs.kappa, complex(coeffs.zeta), coeffs.upsilon, pulse.eA0, pulse.e2A02,
        )
    )
    i0 = regularized_zeroth(coeffs, field, pulse.eA0, pulse.e2A02)
    return VertexIntegrals(coeffs, np.concatenate([[i0], field]), n_panels)


def regularized_single_I0(
    pulse: LaserPulse, coeffs: PhaseCoefficients, settings: QuadratureSettings = DEFAULT_SETTINGS
) -> complex:
    """Regularized ``int e^{i g_n}`` of one emission."""
    return complex(vertex_integrals(pulse, coeffs, settings).moments[0])


@dataclass(frozen=True)
class PairIntegrals:
    """All integrals needed by one emission ordering of double Compton.

    Attributes
    ----------
    first, second : PhaseCoefficients
        Phases of the earlier (``g1``) and later (``g2``) emission.
    j1, j2 : ndarray, shape (4,)
        Single-vertex moments, slot 0 regularized.
    i_tilde : ndarray, shape (4,)
        Moments of the summed phase ``g1 + g2``; slot 2 is the conjugate of
        the minus-sign integral, slot 0 the regularized bare integral.
    total, on, off : ndarray, shape (4, 4)
        ``Upsilon[second_slot, first_slot]`` per channel.
    theta_direct : ndarray, shape (3, 3)
        Field-slot block of the time-ordered kernel integrated directly,
        independent of the ``off + on`` assembly.
    """

    first: PhaseCoefficients
    second: PhaseCoefficients
    j1: np.ndarray
    j2: np.ndarray
    i_tilde: np.ndarray
    total: np.ndarray
    on: np.ndarray
    off: np.ndarray
    theta_direct: np.ndarray
    n_panels: int

    def upsilon(self, key: UpsilonKey) -> complex:
        a, b = key.slots
        table = {Channel.TOTAL: self.total, Channel.ON: self.on, Channel.OFF: self.off}[key.channel]
        return complex(table[a, b])

    def i_tilde_j(self, j: int, sign: int = 1) -> complex:
        """``int e^{+-i g~} F_j`` with ``F_1 = calA / A0`` and ``F_2 = A_B^2 / A0^2``."""
        if j == 1:
            return complex(self.i_tilde[1] if sign > 0 else np.conj(self.i_tilde[2]))
        if j == 2:
            return complex(self.i_tilde[3] if sign > 0 else np.conj(self.i_tilde[3]))
        raise ValueError("j must be 1 or 2")

    @property
    def i_tilde_0(self) -> complex:
        return complex(self.i_tilde[0])


def pair_integrals(
    pulse: LaserPulse,
    first: PhaseCoefficients,
    second: PhaseCoefficients,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    backend: str | None = None,
    n_panels: int | None = None,
) -> PairIntegrals:
    """Single, summed-phase and double integrals of an ordered emission pair."""
    tilde = first + second
    _check_rate(first.kappa, settings, "first emission")
    _check_rate(second.kappa, settings, "second emission")
    _check_rate(tilde.kappa, settings, "summed phase")
    if n_panels is None:
        rate = max(c.max_rate(pulse) for c in (first, second, tilde))
        n_panels = settings.n_panels(pulse, rate)
    pg = pulse.phase_grid(n_panels)
    kern = kernels.get_backend(backend)
    eA0, e2A02 = pulse.eA0, pulse.e2A02
    j1f, j2f, itf, theta, off_f = kern.pair_moments(
        pg.weights, pg.smat, pg.phi, pg.env, pg.carrier, pg.a2, pg.c1, pg.c2,
        (first.kappa, complex(first.zeta), first.upsilon),
        (second.kappa, complex(second.zeta), second.upsilon),
        eA0, e2A02,
    )
    j1 = np.concatenate([[regularized_zeroth(first, j1f, eA0, e2A02)], j1f])
    j2 = np.concatenate([[regularized_zeroth(second, j2f, eA0, e2A02)], j2f])
    it = np.concatenate([[regularized_zeroth(tilde, itf, eA0, e2A02)], itf])

    on = 0.5 * np.outer(j2, j1)
    total = np.empty((4, 4), dtype=complex)
    total[1:, 1:] = np.asarray(off_f) + on[1:, 1:]
    total[0, 1:] = _relation_zero_first(second, it[1:], total[1:, 1:], eA0, e2A02)
    total[1:, 0] = _relation_zero_second(first, it[1:], total[1:, 1:], eA0, e2A02)
    total[0, 0] = (
        1j * it[0]
        - eA0 * second.zeta * total[1, 0]
        - eA0 * np.conj(second.zeta) * total[2, 0]
        + 0.5 * e2A02 * second.upsilon * total[3, 0]
    ) / second.kappa
    off = total - on
    off[1:, 1:] = off_f
    return PairIntegrals(first, second, j1, j2, it, total, on, off, np.asarray(theta), n_panels)


def _relation_zero_first(second, it, block, eA0, e2A02):
    # Upsilon_{0, b}: bare phase on the later emission, integrate by parts in phi2
    return (
        1j * it
        - eA0 * second.zeta * block[0, :]
        - eA0 * np.conj(second.zeta) * block[1, :]
        + 0.5 * e2A02 * second.upsilon * block[2, :]
    ) / second.kappa


def _relation_zero_second(first, it, block, eA0, e2A02):
    # Upsilon_{a, 0}: bare phase on the earlier emission, integrate by parts in phi1
    return (
        -1j * it
        - eA0 * first.zeta * block[:, 0]
        - eA0 * np.conj(first.zeta) * block[:, 1]
        + 0.5 * e2A02 * first.upsilon * block[:, 2]
    ) / first.kappa


def upsilon(pair: PairIntegrals, key: UpsilonKey) -> complex:
    """Channel value of one double integral."""
    return pair.upsilon(key)


def upsilon_zeroth_via_relations(pair: PairIntegrals, key: UpsilonKey) -> complex:
    """Zeroth-order double integral; only keys with a bare-phase slot are accepted."""
    if not key.zeroth:
        raise ValueError("relation path only serves keys with a zeroth-order index")
    return pair.upsilon(key)
