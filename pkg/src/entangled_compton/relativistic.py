"""Minkowski four-vectors, chiral-basis gamma matrices and Dirac spinors.

Four-vectors are plain numpy arrays with the contravariant components
``(t, x, y, z)`` on the last axis; complex polarization vectors use complex
arrays of the same layout.  The metric signature is ``(+, -, -, -)`` and all
quantities are in units of the electron mass (``m = 1``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OffShellError

ELECTRON_MASS = 1.0
ON_SHELL_TOL = 1e-9

METRIC = np.array([1.0, -1.0, -1.0, -1.0])

#: real four-vector, shape ``(..., 4)``
FourVector = np.ndarray
#: complex four-vector, shape ``(..., 4)``
ComplexFourVector = np.ndarray

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def _chiral_gammas() -> np.ndarray:
    g0 = np.block([[_Z2, _I2], [_I2, _Z2]])
    gs = [np.block([[_Z2, s], [-s, _Z2]]) for s in PAULI]
    return np.array([g0, *gs])


GAMMA = _chiral_gammas()
GAMMA0 = GAMMA[0]
IDENTITY4 = np.eye(4, dtype=complex)


def four_vector(t, x, y, z) -> FourVector:
    return np.array([t, x, y, z], dtype=np.result_type(t, x, y, z, float))


def minkowski_dot(a, b):
    """Bilinear Minkowski product ``a^0 b^0 - a.b`` (no complex conjugation).

    Broadcasts over leading axes.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def slash(a) -> np.ndarray:
    """Feynman slash ``gamma^mu a_mu`` in the chiral basis, shape ``(..., 4, 4)``."""
    a = np.asarray(a)
    return np.einsum("...m,mij->...ij", a * METRIC, GAMMA)


def check_gamma_algebra(tol: float = 1e-14) -> None:
    """Verify the Clifford algebra and the hermiticity condition of ``GAMMA``."""
    for mu in range(4):
        for nu in range(mu, 4):
            anti = GAMMA[mu] @ GAMMA[nu] + GAMMA[nu] @ GAMMA[mu]
            expected = 2.0 * (METRIC[mu] if mu == nu else 0.0) * IDENTITY4
            if np.abs(anti - expected).max() > tol:
                raise AssertionError(f"anticommutator {{{mu},{nu}}} broken")
        if np.abs(GAMMA0 @ GAMMA[mu].conj().T @ GAMMA0 - GAMMA[mu]).max() > tol:
            raise AssertionError(f"gamma^{mu} violates g0 g^dag g0 = g")


check_gamma_algebra()


def is_on_shell(p, mass: float = ELECTRON_MASS, tol: float = ON_SHELL_TOL) -> bool:
    return abs(minkowski_dot(p, p) - mass**2) / mass**2 < tol


def _sqrt_pauli_form(p0: float, pvec: np.ndarray, sign: float, mass: float) -> np.ndarray:
    # sqrt of the 2x2 positive Hermitian form p0*I + sign*(p.sigma); its
    # determinant is m^2, so sqrt(M) = (M + m I) / sqrt(tr M + 2m).
    form = p0 * _I2 + sign * np.einsum("i,ijk->jk", pvec, PAULI)
    return (form + mass * _I2) / np.sqrt(2.0 * (p0 + mass))


@dataclass(frozen=True)
class DiracSpinor:
    """Positive-energy Dirac spinor ``u_sigma(p)``.

    ``spin`` is +1/2 or -1/2 and labels the sigma_z eigenstate in the rest
    frame.  ``components`` holds the column spinor; ``bar`` the Dirac adjoint.
    """

    components: np.ndarray
    spin: float
    momentum: np.ndarray

    @property
    def bar(self) -> np.ndarray:
        return adjoint(self.components)


def adjoint(u: np.ndarray) -> np.ndarray:
    """Dirac adjoint ``u^dagger gamma^0`` (row vector)."""
    return np.conj(u) @ GAMMA0


def dirac_spinor(p, spin: float, mass: float = ELECTRON_MASS) -> DiracSpinor:
    """Chiral-basis spinor normalised to ``ubar u = 2m``."""
    p = np.asarray(p, dtype=float)
    if p[0] <= 0 or not is_on_shell(p, mass):
        raise OffShellError("spinor requires on-shell momentum")
    if spin == 0.5:
        xi = np.array([1.0, 0.0], dtype=complex)
    elif spin == -0.5:
        xi = np.array([0.0, 1.0], dtype=complex)
    else:
        raise ValueError(f"spin must be +1/2 or -1/2, got {spin}")
    # p.sigma = E - p.sigma_vec, p.sigmabar = E + p.sigma_vec (Peskin convention)
    upper = _sqrt_pauli_form(p[0], p[1:], -1.0, mass) @ xi
    lower = _sqrt_pauli_form(p[0], p[1:], +1.0, mass) @ xi
    return DiracSpinor(np.concatenate([upper, lower]), spin, p.copy())


SPINS = (0.5, -0.5)


def spinor_pair(p, mass: float = ELECTRON_MASS) -> tuple[np.ndarray, np.ndarray]:
    """Both spin states of ``u(p)``.

    Returns ``(u, ubar)`` with ``u`` of shape ``(4, 2)`` (columns are spins
    +1/2, -1/2) and ``ubar`` of shape ``(2, 4)``.
    """
    us = [dirac_spinor(p, s, mass).components for s in SPINS]
    u = np.stack(us, axis=1)
    return u, np.conj(u.T) @ GAMMA0


def sandwich(left: np.ndarray, matrix: np.ndarray, right: np.ndarray) -> complex:
    """Evaluate ``left @ matrix @ right`` for an adjoint spinor ``left``.

    ``left`` must already be the adjoint (see :func:`adjoint`).  Either
    spinor may be a :class:`DiracSpinor`, in which case ``left.bar`` and
    ``right.components`` are used.
    """
    if isinstance(left, DiracSpinor):
        left = left.bar
    if isinstance(right, DiracSpinor):
        right = right.components
    return complex(left @ matrix @ right)
