"""Numpy implementation of the per-point integral kernels.

Both functions take node tables of a :class:`~entangled_compton.pulse.PulseGrid`
and phase coefficients ``(kappa, zeta, upsilon)`` and return the field-weighted
moments for the three field functions

    F = (env e^{-i phi}, env e^{+i phi}, A_B^2 / A0^2).
"""

import numpy as np


def _phase(phi, c1, c2, kappa, zeta, upsilon, eA0, e2A02):
    return kappa * phi + 2.0 * eA0 * (zeta * c1).real - 0.5 * e2A02 * upsilon * c2


def _fields(env, carrier, a2):
    wave = env * carrier
    return np.stack([wave, np.conj(wave), a2.astype(complex)])


def vertex_moments(weights, phi, env, carrier, a2, c1, c2, kappa, zeta, upsilon, eA0, e2A02):
    """``J[b] = int F_b e^{i g}`` for a single phase; shape ``(3,)``."""
    g = _phase(phi, c1, c2, kappa, zeta, upsilon, eA0, e2A02)
    fields = _fields(env, carrier, a2)
    return (fields * np.exp(1j * g)) @ weights


def pair_moments(weights, smat, phi, env, carrier, a2, c1, c2, first, second, eA0, e2A02):
    """Moments of an ordered pair of emissions.

    ``first`` and ``second`` are ``(kappa, zeta, upsilon)`` triples.  Returns
    ``(j1, j2, it, theta, off)`` where ``j1``/``j2`` are the single-vertex
    moments, ``it`` the moments of the summed phase, ``theta[a, b]`` the
    time-ordered double integral (second emission later) and ``off[a, b]``
    the same with the kernel ``sgn(phi2 - phi1) / 2``.
    """
    g1 = _phase(phi, c1, c2, *first, eA0, e2A02)
    g2 = _phase(phi, c1, c2, *second, eA0, e2A02)
    fields = _fields(env, carrier, a2)
    inner = fields * np.exp(1j * g1)
    outer = fields * (np.exp(1j * g2) * weights)
    j1 = inner @ weights
    j2 = outer.sum(axis=-1)
    it = (fields * np.exp(1j * (g1 + g2))) @ weights

    order = smat.shape[0]
    shaped = inner.reshape(3, -1, order)
    local = shaped @ smat.T
    totals = (shaped * weights.reshape(-1, order)).sum(axis=-1)
    offsets = np.cumsum(totals, axis=-1) - totals
    running = (local + offsets[..., None]).reshape(3, -1)

    theta = outer @ running.T
    off = outer @ (running - 0.5 * j1[:, None]).T
    return j1, j2, it, theta, off
