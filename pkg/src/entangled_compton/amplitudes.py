"""Single- and double-Compton amplitudes in a pulsed plane wave.

Amplitude arrays are indexed ``[alpha, beta, sigma0, sigma2]``: polarization
of photon 1, polarization of photon 2 (both in the emission-local basis
``eps_{j0}, eps_{j1}``), initial and final electron spin (``+1/2`` first).
Single-Compton arrays are ``[alpha, sigma0, sigma1]``.

Emission ordering ``0`` means photon 1 is emitted first, ordering ``1``
swaps the roles of the two photons.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import MaskedPointError
from .pulse import E_CHARGE, LaserPulse, PhaseCoefficients, phase_coefficients, vertex_coefficients
from .quadrature import (
    DEFAULT_SETTINGS,
    SLOT,
    Channel,
    PairIntegrals,
    QuadratureSettings,
    pair_integrals,
    vertex_integrals,
)
from .relativistic import IDENTITY4, minkowski_dot, slash, spinor_pair

ORDERINGS = (0, 1)


def photon_direction(theta: float, phi: float) -> np.ndarray:
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def polarization_basis(theta: float, phi: float) -> np.ndarray:
    """Real transverse basis ``(eps_0, eps_1)`` of a photon, shape ``(2, 4)``.

    ``eps_0`` lies in the plane spanned by the emission direction and the
    beam axis, ``eps_1`` is the azimuthal unit vector.
    """
    ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
    return np.array([[0.0, ct * cp, ct * sp, -st], [0.0, -sp, cp, 0.0]])


@dataclass(frozen=True)
class Photon:
    """Emitted photon with energy ``omega`` (units of m) and angles."""

    omega: float
    theta: float
    phi: float

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("photon energy must be non-negative")

    @cached_property
    def momentum(self) -> np.ndarray:
        return self.omega * np.concatenate([[1.0], photon_direction(self.theta, self.phi)])

    @cached_property
    def basis(self) -> np.ndarray:
        return polarization_basis(self.theta, self.phi)


def final_electron_momentum(p0, q1, q2, k) -> np.ndarray:
    """On-shell final momentum ``p0 - Q + kappa~ k`` with ``Q = q1 + q2``."""
    p0 = np.asarray(p0, dtype=float)
    total = np.asarray(q1, dtype=float) + np.asarray(q2, dtype=float)
    denom = float(minkowski_dot(k, p0 - total))
    if denom == 0.0:
        raise MaskedPointError("collinear lightfront singularity")
    kappa = (minkowski_dot(p0, total) - 0.5 * minkowski_dot(total, total)) / denom
    return p0 - total + kappa * np.asarray(k, dtype=float)


@dataclass(frozen=True)
class ScatteringGeometry:
    """Head-on collision of an electron moving along +z with the pulse."""

    pulse: LaserPulse
    gamma0: float
    photons: tuple

    def __post_init__(self):
        if self.gamma0 < 1.0:
            raise ValueError("gamma0 must be at least 1")
        if not 1 <= len(self.photons) <= 2:
            raise ValueError("one or two photons are supported")
        object.__setattr__(self, "photons", tuple(self.photons))

    @property
    def beta0(self) -> float:
        return float(np.sqrt(1.0 - 1.0 / self.gamma0**2))

    @cached_property
    def p0(self) -> np.ndarray:
        return np.array([self.gamma0, 0.0, 0.0, self.gamma0 * self.beta0])

    @property
    def k(self) -> np.ndarray:
        return self.pulse.k

    def q(self, j: int) -> np.ndarray:
        return self.photons[j].momentum

    @cached_property
    def recoil(self) -> float:
        return float(minkowski_dot(self.p0, self.k))

    @cached_property
    def effective_momentum(self) -> np.ndarray:
        """Laser-dressed momentum ``p0 + a0^2 / (2 p0.k) k``."""
        return self.p0 + self.pulse.a0**2 / (2.0 * self.recoil) * self.k

    @cached_property
    def final_momentum(self) -> np.ndarray:
        second = self.q(1) if len(self.photons) == 2 else np.zeros(4)
        p2 = final_electron_momentum(self.p0, self.q(0), second, self.k)
        if not p2[0] > 0:
            raise MaskedPointError("final electron on the positron branch")
        return p2

    def emission_order(self, ordering: int) -> tuple[int, int]:
        if ordering not in ORDERINGS:
            raise ValueError("ordering must be 0 or 1")
        return (0, 1) if ordering == 0 else (1, 0)

    def phase_coefficients(self, ordering: int) -> tuple[PhaseCoefficients, PhaseCoefficients]:
        first, second = self.emission_order(ordering)
        qs = [self.q(first), self.q(second)]
        return (
            phase_coefficients(self.pulse, self.p0, qs, 1),
            phase_coefficients(self.pulse, self.p0, qs, 2),
        )

    def intermediate_momentum(self, ordering: int) -> np.ndarray:
        """On-shell projection ``P1 = p0 - q_first + kappa_1 k``."""
        first, _ = self.emission_order(ordering)
        q = self.q(first)
        kappa = float(minkowski_dot(self.p0, q)) / float(minkowski_dot(self.k, self.p0 - q))
        return self.p0 - q + kappa * self.k

    def with_photons(self, *photons: Photon) -> "ScatteringGeometry":
        return ScatteringGeometry(self.pulse, self.gamma0, photons)


# -- emission vertex ------------------------------------------------------


def emission_matrix(pulse: LaserPulse, p_in, p_out, eps_conj, phi: float) -> np.ndarray:
    """``M(phi)`` of a single emission with conjugated photon polarization ``eps_conj``."""
    k = pulse.k
    kin = float(minkowski_dot(k, p_in))
    kout = float(minkowski_dot(k, p_out))
    e_slash = slash(eps_conj)
    k_slash = slash(k)
    a_field = pulse.field_value(phi)
    a_slash = slash(a_field)
    sq = E_CHARGE**2 * pulse.field_squared(phi)
    return (
        e_slash
        - complex(minkowski_dot(eps_conj, k)) * sq / (2.0 * kin * kout) * k_slash
        + E_CHARGE * a_slash @ k_slash @ e_slash / (2.0 * kout)
        + E_CHARGE * e_slash @ k_slash @ a_slash / (2.0 * kin)
    )


def vertex_expansion(pulse: LaserPulse, p_in, p_out, eps_conj) -> np.ndarray:
    """Coefficient matrices of ``M(phi)`` per field slot.

    ``M(phi) = C[0] + A1 e^{-i phi} C[1] + A1 e^{i phi} C[2] + (A_B^2/A0^2) C[3]``.
    ``eps_conj`` may carry leading axes; the result has shape ``(..., 4, 4, 4)``.
    """
    k = pulse.k
    kin = float(minkowski_dot(k, p_in))
    kout = float(minkowski_dot(k, p_out))
    eps_conj = np.asarray(eps_conj)
    e_slash = slash(eps_conj)
    k_slash = slash(k)
    out = np.empty(eps_conj.shape[:-1] + (4, 4, 4), dtype=complex)
    out[..., 0, :, :] = e_slash
    for slot, eps in ((1, pulse.eps), (2, np.conj(pulse.eps))):
        x = slash(eps)
        out[..., slot, :, :] = pulse.eA0 * (
            x @ k_slash @ e_slash / (2.0 * kout) + e_slash @ k_slash @ x / (2.0 * kin)
        )
    ek = minkowski_dot(eps_conj, k)
    out[..., 3, :, :] = (-ek * pulse.e2A02 / (2.0 * kin * kout))[..., None, None] * k_slash
    return out


# -- U and D tables ---------------------------------------------------------


@dataclass(frozen=True)
class _Pieces:
    """Building blocks of the U and D tables for one emission ordering."""

    e1: np.ndarray  # (2, 4, 4) slash of conj pol, first photon
    e2: np.ndarray  # (2, 4, 4) second photon
    e1k: np.ndarray  # (2,) eps1*.k
    e2k: np.ndarray
    k_slash: np.ndarray
    eps: np.ndarray
    epsc: np.ndarray
    p_m: np.ndarray  # slash(P1) + m
    p0k: float
    pk: float
    p2k: float
    eA0: float
    e2A02: float

    def l2(self, x):
        return self.eA0 * (x @ self.k_slash @ self.e2 / (2 * self.p2k) + self.e2 @ self.k_slash @ x / (2 * self.pk))

    def r1(self, x):
        return self.eA0 * (x @ self.k_slash @ self.e1 / (2 * self.pk) + self.e1 @ self.k_slash @ x / (2 * self.p0k))

    @property
    def c20(self):
        return (-self.e2A02 * self.e2k / (2 * self.p2k * self.pk))[:, None, None]

    @property
    def c02(self):
        return (-self.e2A02 * self.e1k / (2 * self.p0k * self.pk))[:, None, None]


def _pieces(pulse: LaserPulse, p0, p_mid, p2, eps1_conj, eps2_conj) -> _Pieces:
    k = pulse.k
    return _Pieces(
        e1=slash(eps1_conj),
        e2=slash(eps2_conj),
        e1k=minkowski_dot(eps1_conj, k),
        e2k=minkowski_dot(eps2_conj, k),
        k_slash=slash(k),
        eps=slash(pulse.eps),
        epsc=slash(np.conj(pulse.eps)),
        p_m=slash(p_mid) + IDENTITY4,
        p0k=float(minkowski_dot(p0, k)),
        pk=float(minkowski_dot(p_mid, k)),
        p2k=float(minkowski_dot(p2, k)),
        eA0=pulse.eA0,
        e2A02=pulse.e2A02,
    )


def _pair(left, mid, right):
    # left indexed by second-photon pol, right by first-photon pol -> (first, second, 4, 4)
    left = np.broadcast_to(left, (2, 4, 4))
    right = np.broadcast_to(right, (2, 4, 4))
    return np.einsum("bij,jk,akl->abil", left, mid, right)


def u_table(pc: _Pieces) -> dict:
    """All ``U`` matrices keyed by name.

    Values are ``((key2, key1), matrix)`` with ``key2``/``key1`` the field
    keys of the second/first emission and ``matrix`` of shape
    ``(2, 2, 4, 4)`` over (first pol, second pol).
    """
    e1, e2, kk, pm = pc.e1, pc.e2, pc.k_slash, pc.p_m
    eps, epsc = pc.eps, pc.epsc
    u22 = (
        pc.e2A02**2
        * pc.e1k[:, None, None, None]
        * pc.e2k[None, :, None, None]
        / (2 * pc.p0k * pc.p2k * pc.pk)
        * kk
    )
    return {
        "U00": (((0, 0), (0, 0)), _pair(e2, pm, e1)),
        "U10": (((1, -1), (0, 0)), _pair(pc.l2(eps), pm, e1)),
        "U10c": (((1, 1), (0, 0)), _pair(pc.l2(epsc), pm, e1)),
        "U01": (((0, 0), (1, -1)), _pair(e2, pm, pc.r1(eps))),
        "U01c": (((0, 0), (1, 1)), _pair(e2, pm, pc.r1(epsc))),
        "U11": (((1, -1), (1, -1)), _pair(pc.l2(eps), pm, pc.r1(eps))),
        "U11c": (((1, 1), (1, 1)), _pair(pc.l2(epsc), pm, pc.r1(epsc))),
        "U11p": (((1, 1), (1, -1)), _pair(pc.l2(epsc), pm, pc.r1(eps))),
        "U11pc": (((1, -1), (1, 1)), _pair(pc.l2(eps), pm, pc.r1(epsc))),
        "U20": (((2, 0), (0, 0)), _pair(pc.c20 * kk, pm, e1)),
        "U02": (((0, 0), (2, 0)), _pair(e2, pm, pc.c02 * kk)),
        "U21": (((2, 0), (1, -1)), _pair(pc.c20 * kk, pm, pc.r1(eps))),
        "U21c": (((2, 0), (1, 1)), _pair(pc.c20 * kk, pm, pc.r1(epsc))),
        "U12": (((1, -1), (2, 0)), _pair(pc.l2(eps), pm, pc.c02 * kk)),
        "U12c": (((1, 1), (2, 0)), _pair(pc.l2(epsc), pm, pc.c02 * kk)),
        "U22": (((2, 0), (2, 0)), u22),
    }


def d_table(pc: _Pieces) -> dict:
    """Contact-term matrices keyed by name; values ``(i_tilde_slot, matrix)``."""
    e1, e2, kk = pc.e1, pc.e2, pc.k_slash

    def d1(x):
        left = (pc.e2k / pc.p2k)[:, None, None] * x
        right = (pc.e1k / pc.p0k)[:, None, None] * x
        return pc.eA0 * (_pair(left, kk, e1) + _pair(e2, kk, right))

    d2 = -pc.e2A02 * (pc.e1k[:, None, None, None] * pc.e2k[None, :, None, None]) / (pc.p0k * pc.p2k) * kk
    return {
        "D0": (0, _pair(e2, kk, e1)),
        "D1+": (1, d1(pc.eps)),
        "D1-": (2, d1(pc.epsc)),
        "D2": (3, d2),
    }


def u_matrix(name: str, geometry: ScatteringGeometry, ordering: int, pols=None) -> np.ndarray:
    """One tabulated ``U`` matrix, shape ``(2, 2, 4, 4)`` over (first, second) pol."""
    return u_table(_ordering_pieces(geometry, ordering, pols))[name][1]


def d_matrix(name: str, geometry: ScatteringGeometry, ordering: int, pols=None) -> np.ndarray:
    """One tabulated ``D`` matrix, shape ``(2, 2, 4, 4)`` over (first, second) pol."""
    return d_table(_ordering_pieces(geometry, ordering, pols))[name][1]


def _conj_pols(geometry: ScatteringGeometry, pols):
    # conjugated polarization vectors per photon, each (2, 4)
    if pols is None:
        return [np.asarray(ph.basis, dtype=complex) for ph in geometry.photons]
    return [np.asarray(p, dtype=complex) for p in pols]


def _ordering_pieces(geometry: ScatteringGeometry, ordering: int, pols=None) -> _Pieces:
    first, second = geometry.emission_order(ordering)
    cp = _conj_pols(geometry, pols)
    p_mid = geometry.intermediate_momentum(ordering)
    if not minkowski_dot(p_mid, geometry.k) > 0:
        raise MaskedPointError("intermediate electron on the positron branch")
    return _pieces(geometry.pulse, geometry.p0, p_mid, geometry.final_momentum, cp[first], cp[second])


# -- assembly -----------------------------------------------------------------


@dataclass(frozen=True)
class ChannelAmplitude:
    """Off-shell, on-shell and total amplitudes, each ``[alpha, beta, sigma0, sigma2]``."""

    off: np.ndarray
    on: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.off + self.on

    def channel(self, name) -> np.ndarray:
        name = Channel(name)
        return {Channel.OFF: self.off, Channel.ON: self.on, Channel.TOTAL: self.total}[name]


def _spin_sandwich(ubar_out, matrices, u_in):
    # (..., 4, 4) -> (..., sigma_in, sigma_out)
    return np.einsum("si,...ij,jt->...ts", ubar_out, matrices, u_in)


def _to_photon_order(amp, ordering):
    # amp indexed [first pol, second pol, ...]; return [photon1 pol, photon2 pol, ...]
    return amp if ordering == 0 else np.swapaxes(amp, 0, 1)


def ordering_integrals(
    geometry: ScatteringGeometry, ordering: int, settings: QuadratureSettings = DEFAULT_SETTINGS
) -> PairIntegrals:
    first, second = geometry.phase_coefficients(ordering)
    return pair_integrals(geometry.pulse, first, second, settings)


def double_compton_amplitudes(
    geometry: ScatteringGeometry,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    pols=None,
    integrals=None,
) -> ChannelAmplitude:
    """Off- and on-shell two-photon amplitudes from the U and D tables.

    ``pols`` optionally replaces the conjugated polarization vectors of the
    two photons (each ``(2, 4)``), e.g. by the photon momentum for gauge
    checks.  ``integrals`` may pass precomputed :class:`PairIntegrals` per
    ordering.
    """
    if len(geometry.photons) != 2:
        raise ValueError("double Compton needs two photons")
    u0, _ = spinor_pair(geometry.p0)
    _, ubar2 = spinor_pair(geometry.final_momentum)
    e2 = E_CHARGE**2
    off = np.zeros((2, 2, 2, 2), dtype=complex)
    on = np.zeros((2, 2, 2, 2), dtype=complex)
    for ordering in ORDERINGS:
        pc = _ordering_pieces(geometry, ordering, pols)
        pair = integrals[ordering] if integrals is not None else ordering_integrals(geometry, ordering, settings)
        u_sum_off = np.zeros((2, 2, 4, 4), dtype=complex)
        u_sum_on = np.zeros((2, 2, 4, 4), dtype=complex)
        for (key2, key1), mat in u_table(pc).values():
            a, b = SLOT[key2], SLOT[key1]
            u_sum_off += pair.off[a, b] * mat
            u_sum_on += pair.on[a, b] * mat
        d_sum = sum(pair.i_tilde[slot] * mat for slot, mat in d_table(pc).values())
        pref = 1.0 / (2.0 * pc.pk)
        m_off = 1j * e2 * pref * u_sum_off - e2 * pref * d_sum
        m_on = 1j * e2 / (2.0 * abs(pc.pk)) * u_sum_on
        off += _to_photon_order(_spin_sandwich(ubar2, m_off, u0), ordering)
        on += _to_photon_order(_spin_sandwich(ubar2, m_on, u0), ordering)
    return ChannelAmplitude(off, on)


def double_compton_off(geometry, settings=DEFAULT_SETTINGS) -> np.ndarray:
    return double_compton_amplitudes(geometry, settings).off


def double_compton_on(geometry, settings=DEFAULT_SETTINGS) -> np.ndarray:
    return double_compton_amplitudes(geometry, settings).on


def double_compton_total(geometry, settings=DEFAULT_SETTINGS) -> np.ndarray:
    return double_compton_amplitudes(geometry, settings).total


def vertex_amplitude(pulse: LaserPulse, p_in, p_out, eps_conj, moments) -> np.ndarray:
    """``-e ubar(p_out) [sum_slot C_slot moments_slot] u(p_in)``, shape ``(2, sigma_in, sigma_out)``."""
    coeff = vertex_expansion(pulse, p_in, p_out, eps_conj)
    mat = np.einsum("psij,s->pij", coeff, np.asarray(moments))
    u_in, _ = spinor_pair(p_in)
    _, ubar_out = spinor_pair(p_out)
    return -E_CHARGE * _spin_sandwich(ubar_out, mat, u_in)


def single_compton_amplitude(
    geometry: ScatteringGeometry,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    pols=None,
) -> np.ndarray:
    """One-photon amplitude ``[alpha, sigma0, sigma1]``."""
    if len(geometry.photons) != 1:
        raise ValueError("single Compton needs exactly one photon")
    p0, p1 = geometry.p0, geometry.final_momentum
    q = geometry.q(0)
    coeffs = vertex_coefficients(geometry.pulse, p0, p1, q)
    moments = vertex_integrals(geometry.pulse, coeffs, settings).moments
    eps_conj = _conj_pols(geometry, pols)[0]
    return vertex_amplitude(geometry.pulse, p0, p1, eps_conj, moments)


def double_compton_on_factorized(
    geometry: ScatteringGeometry,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    standalone: bool = False,
    integrals=None,
) -> np.ndarray:
    """On-shell amplitude as a spin-summed product of two single emissions.

    With ``standalone`` the single-vertex integrals are recomputed
    independently for each vertex instead of being taken from the pair
    integrals.
    """
    pulse = geometry.pulse
    p0, p2 = geometry.p0, geometry.final_momentum
    cp = _conj_pols(geometry, None)
    on = np.zeros((2, 2, 2, 2), dtype=complex)
    for ordering in ORDERINGS:
        first, second = geometry.emission_order(ordering)
        p_mid = geometry.intermediate_momentum(ordering)
        pk = float(minkowski_dot(p_mid, geometry.k))
        if not pk > 0:
            raise MaskedPointError("intermediate electron on the positron branch")
        if standalone:
            c1 = vertex_coefficients(pulse, p0, p_mid, geometry.q(first))
            c2 = vertex_coefficients(pulse, p_mid, p2, geometry.q(second))
            j1 = vertex_integrals(pulse, c1, settings).moments
            j2 = vertex_integrals(pulse, c2, settings).moments
        else:
            pair = integrals[ordering] if integrals is not None else ordering_integrals(geometry, ordering, settings)
            j1, j2 = pair.j1, pair.j2
        v_i = vertex_amplitude(pulse, p0, p_mid, cp[first], j1)  # [a, s0, s1]
        v_f = vertex_amplitude(pulse, p_mid, p2, cp[second], j2)  # [b, s1, s2]
        prod = np.einsum("bmt,asm->abst", v_f, v_i)
        on += _to_photon_order(1j / (4.0 * abs(pk)) * prod, ordering)
    return on


def on_shell_concurrence_estimate(on: np.ndarray) -> float:
    """Product-state diagnostic for the on-shell channel.

    Each spin configuration gives a pure two-photon state ``psi_ab``; the
    estimate is ``sum 2|det psi| / sum ||psi||^2``, an upper bound on the
    concurrence of the spin-averaged mixture.  It vanishes when every
    ``psi`` factorizes into independent single-photon amplitudes.
    """
    psi = np.moveaxis(np.asarray(on), (0, 1), (-2, -1)).reshape(-1, 2, 2)
    norm = np.sum(np.abs(psi) ** 2)
    if norm == 0:
        return 0.0
    dets = np.abs(psi[:, 0, 0] * psi[:, 1, 1] - psi[:, 0, 1] * psi[:, 1, 0])
    return float(2.0 * dets.sum() / norm)
