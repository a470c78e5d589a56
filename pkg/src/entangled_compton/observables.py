"""Photon density matrices, emission probabilities, entanglement and Stokes parameters.

Two-photon matrices use the product basis ``|a>_1 |b>_2`` with photon 1 as
the slow index, i.e. row ``2 a + b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .relativistic import PAULI, minkowski_dot

BASES = ("01", "HV", "LR")
TRACE_FLOOR = 1e-30
_RANK_TOL = 1e-14

SIGMA_Y2 = np.kron(PAULI[1], PAULI[1])
#: Stokes operators S_0..S_3 in the H/V basis
STOKES_HV = np.array([np.eye(2), PAULI[2], PAULI[0], PAULI[1]], dtype=complex)
#: the same operators expressed in the L/R basis
STOKES_LR = np.array([np.eye(2), PAULI[0], PAULI[1], PAULI[2]], dtype=complex)
#: columns are |L>, |R> in the H/V basis
CIRCULAR_U = np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class TwoPhotonDensityMatrix:
    """4x4 polarization density matrix, unnormalized (trace = emission probability)."""

    matrix: np.ndarray
    basis: str = "01"
    channel: str = "total"

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def defined(self) -> bool:
        return self.trace >= TRACE_FLOOR

    def normalized(self) -> np.ndarray:
        if not self.defined:
            raise ValueError("density matrix trace below the normalization floor")
        return self.matrix / self.trace


@dataclass(frozen=True)
class StokesTensor:
    """``s[l1, l2] = Tr{rho (S_l1 x S_l2)}`` for a normalized two-photon state."""

    values: np.ndarray
    basis: str = "HV"
    meta: dict = field(default_factory=dict, compare=False)

    def __getitem__(self, idx):
        return self.values[idx]


def double_compton_prefactor(omega1, omega2, p0, p2, k) -> float:
    """``omega1 omega2 / (16 (2 pi)^6 (p0.k)(p2.k))``."""
    return omega1 * omega2 / (16.0 * (2 * np.pi) ** 6 * minkowski_dot(p0, k) * minkowski_dot(p2, k))


def single_compton_prefactor(omega, p0, p1, k) -> float:
    """``omega / (8 (2 pi)^3 (p0.k)(p1.k))``."""
    return omega / (8.0 * (2 * np.pi) ** 3 * minkowski_dot(p0, k) * minkowski_dot(p1, k))


def density_matrix_from_amplitudes(amp: np.ndarray, prefactor: float, channel="total") -> TwoPhotonDensityMatrix:
    """``rho = prefactor / 2 sum_spins M M^dagger`` from ``amp[alpha, beta, s0, s2]``."""
    psi = np.asarray(amp).reshape(4, -1)
    rho = 0.5 * prefactor * psi @ psi.conj().T
    return TwoPhotonDensityMatrix(0.5 * (rho + rho.conj().T), "01", str(channel))


def emission_probability(amp: np.ndarray, prefactor: float) -> float:
    """Spin-averaged ``prefactor / 2 sum |M|^2``, independent of the density matrix."""
    return float(0.5 * prefactor * np.sum(np.abs(np.asarray(amp)) ** 2))


def single_density_matrix(amp: np.ndarray, prefactor: float) -> np.ndarray:
    """2x2 matrix from ``amp[alpha, s0, s1]``; trace is the one-photon probability."""
    psi = np.asarray(amp).reshape(2, -1)
    rho = 0.5 * prefactor * psi @ psi.conj().T
    return 0.5 * (rho + rho.conj().T)


# -- entanglement -----------------------------------------------------------


def _check_normalized(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("expected a 4x4 two-qubit density matrix")
    if abs(np.trace(rho) - 1.0) > 1e-8:
        raise ValueError("density matrix must be normalized to unit trace")
    return rho


def _wootters_roots(rho: np.ndarray) -> np.ndarray:
    # square roots of the spin-flip eigenvalues, as singular values of W^T (sy x sy) W
    # with rho = W W^dagger; round-off eigenvalues are dropped so rank-deficient
    # states do not pick up sqrt(eps) noise
    rho = _check_normalized(rho)
    rho = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(rho)
    keep = w > _RANK_TOL * w.max()
    factor = v[:, keep] * np.sqrt(w[keep])
    sv = np.linalg.svd(factor.T @ SIGMA_Y2 @ factor, compute_uv=False)
    return np.sort(np.concatenate([sv, np.zeros(4 - sv.size)]))[::-1]


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a normalized two-qubit density matrix."""
    r = _wootters_roots(rho)
    return float(max(0.0, r[0] - r[1] - r[2] - r[3]))


def fidelity(rho: np.ndarray) -> float:
    """``(sum_i sqrt(lambda_i))^2`` with the same eigenvalues as the concurrence."""
    return float(np.sum(_wootters_roots(rho)) ** 2)


# -- bases and Stokes parameters ----------------------------------------------


def rotation(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]], dtype=complex)


def basis_transform(rho: TwoPhotonDensityMatrix, target: str, phis=None, thetas=None) -> TwoPhotonDensityMatrix:
    """Map ``rho`` between the emission basis ``01``, linear ``HV`` and circular ``LR``.

    ``phis``/``thetas`` are the photon azimuths and polar angles, needed when
    leaving or entering the emission basis.
    """
    if target not in BASES or rho.basis not in BASES:
        raise ValueError(f"unknown basis {target!r}")
    order = {b: i for i, b in enumerate(BASES)}
    m = rho.matrix
    if order[rho.basis] == order[target]:
        return rho
    if thetas is not None and any(t >= np.pi / 2 for t in thetas):
        raise ValueError("forward-hemisphere projection undefined")
    if "01" in (rho.basis, target) and phis is None:
        raise ValueError("photon azimuths are required to leave the emission basis")

    steps = []
    if order[target] > order[rho.basis]:
        if rho.basis == "01":
            steps.append(np.kron(rotation(phis[0]), rotation(phis[1])))
        if target == "LR":
            steps.append(np.kron(CIRCULAR_U, CIRCULAR_U).conj().T)
    else:
        if rho.basis == "LR":
            steps.append(np.kron(CIRCULAR_U, CIRCULAR_U))
        if target == "01":
            steps.append(np.kron(rotation(phis[0]), rotation(phis[1])).conj().T)
    for t in steps:
        m = t @ m @ t.conj().T
    return TwoPhotonDensityMatrix(m, target, rho.channel)


def single_basis_transform(rho1: np.ndarray, phi: float, target: str = "HV") -> np.ndarray:
    """Emission-basis 2x2 matrix to ``HV`` or ``LR``."""
    m = rotation(phi) @ rho1 @ rotation(phi).conj().T
    if target == "LR":
        m = CIRCULAR_U.conj().T @ m @ CIRCULAR_U
    elif target != "HV":
        raise ValueError(f"unknown basis {target!r}")
    return m


def stokes_operators(basis: str) -> np.ndarray:
    if basis == "HV":
        return STOKES_HV
    if basis == "LR":
        return STOKES_LR
    raise ValueError("Stokes operators are defined in the HV or LR basis")


def stokes_tensor(rho: np.ndarray, basis: str = "HV") -> StokesTensor:
    """All 16 two-photon Stokes parameters of a normalized matrix."""
    rho = _check_normalized(rho)
    ops = stokes_operators(basis)
    prods = np.einsum("aij,bkl->abikjl", ops, ops).reshape(4, 4, 4, 4)
    values = np.einsum("abij,ji->ab", prods, rho).real
    return StokesTensor(values, basis)


def single_photon_stokes(rho1: np.ndarray, basis: str = "HV") -> np.ndarray:
    """``(s_0, s_1, s_2, s_3)`` of a 2x2 matrix, normalized by its trace."""
    rho1 = np.asarray(rho1, dtype=complex)
    tr = np.trace(rho1).real
    if not tr > 0:
        raise ValueError("single-photon matrix has no weight")
    ops = stokes_operators(basis)
    return np.einsum("lij,ji->l", ops, rho1 / tr).real


def partial_trace(rho: np.ndarray, keep: int) -> np.ndarray:
    """Reduced 2x2 matrix of photon ``keep`` (0 or 1)."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)
    return np.einsum("ajbj->ab", r) if keep == 0 else np.einsum("jajb->ab", r)


def degree_of_polarization(s) -> float:
    """``sqrt(s1^2 + s2^2 + s3^2)`` from single-photon Stokes parameters."""
    s = np.asarray(s)
    return float(np.sqrt(np.sum(s[1:4] ** 2)))


def two_entangled_degree(stokes: StokesTensor | np.ndarray) -> float:
    """``P`` with ``P^2 = (-1 + sum_{l1,l2=1..3} s_{l1 l2}^2) / 2``, clipped at zero."""
    s = np.asarray(stokes.values if isinstance(stokes, StokesTensor) else stokes)
    return float(np.sqrt(max(0.0, 0.5 * (-1.0 + np.sum(s[1:, 1:] ** 2)))))


@dataclass(frozen=True)
class PointObservables:
    """Observables of one spectral point and channel; NaN where undefined."""

    d2w: float
    d2w_normalized: float
    concurrence: float
    stokes: np.ndarray  # (4, 4), HV basis
    defined: bool


def point_observables(rho01: TwoPhotonDensityMatrix, phis, omega0: float, thetas=None) -> PointObservables:
    """Probability, concurrence and HV Stokes tensor of a two-photon matrix."""
    prob = rho01.trace
    if not rho01.defined:
        nan = float("nan")
        return PointObservables(prob, omega0**2 * prob, nan, np.full((4, 4), nan), False)
    hv = basis_transform(rho01, "HV", phis=phis, thetas=thetas)
    rho = hv.normalized()
    return PointObservables(prob, omega0**2 * prob, concurrence(rho), stokes_tensor(rho, "HV").values, True)
