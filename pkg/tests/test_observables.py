import numpy as np
import pytest

from entangled_compton.amplitudes import double_compton_amplitudes
from entangled_compton.observables import (
    TwoPhotonDensityMatrix,
    basis_transform,
    concurrence,
    degree_of_polarization,
    density_matrix_from_amplitudes,
    double_compton_prefactor,
    emission_probability,
    fidelity,
    partial_trace,
    point_observables,
    single_basis_transform,
    single_photon_stokes,
    stokes_operators,
    stokes_tensor,
    two_entangled_degree,
)

H = np.array([1, 0], dtype=complex)
V = np.array([0, 1], dtype=complex)
L = np.array([1, 1j]) / np.sqrt(2)


def pure(psi):
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


BELL = pure([1, 0, 0, 1])
SINGLET = pure([0, 1, -1, 0])


def test_bell_and_product_concurrence():
    assert concurrence(BELL) == pytest.approx(1.0, abs=1e-10)
    assert concurrence(pure(np.kron(H, L))) == pytest.approx(0.0, abs=1e-10)
    assert fidelity(BELL) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("p", [0.0, 0.2, 1 / 3, 0.5, 1.0])
def test_werner_state(p):
    rho = p * SINGLET + (1 - p) * np.eye(4) / 4
    assert concurrence(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-10)


def test_concurrence_requires_normalized_input():
    with pytest.raises(ValueError):
        concurrence(2 * BELL)
    with pytest.raises(ValueError):
        concurrence(np.eye(2))


def test_stokes_fixed_points():
    s = stokes_tensor(pure(np.kron(H, H))).values
    assert s[1, 1] == pytest.approx(1.0)
    assert s[0, 0] == pytest.approx(1.0)
    t = stokes_tensor(SINGLET).values
    for i in (1, 2, 3):
        assert t[i, i] == pytest.approx(-1.0)
    assert two_entangled_degree(stokes_tensor(SINGLET)) == pytest.approx(1.0)
    assert two_entangled_degree(s) == pytest.approx(0.0)


def test_single_photon_stokes_of_pure_states():
    assert np.allclose(single_photon_stokes(pure(H)), [1, 1, 0, 0])
    assert np.allclose(single_photon_stokes(pure(L)), [1, 0, 0, 1])
    diag = pure([1, 1])
    assert np.allclose(single_photon_stokes(diag), [1, 0, 1, 0])
    assert degree_of_polarization(single_photon_stokes(np.eye(2))) == pytest.approx(0.0)


def test_lr_basis_stokes_agree_with_hv():
    rho = pure(np.kron(L, H))
    hv = TwoPhotonDensityMatrix(rho, "HV")
    lr = basis_transform(hv, "LR")
    # same physical parameters, different operator labels
    assert np.allclose(stokes_tensor(lr.matrix, "LR").values, stokes_tensor(rho, "HV").values, atol=1e-12)
    assert abs(lr.matrix[0, 0]) == pytest.approx(0.5)


def test_basis_round_trip_and_rotation():
    rng = np.random.default_rng(3)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = TwoPhotonDensityMatrix(m @ m.conj().T, "01")
    phis = (0.4, 2.2)
    back = basis_transform(basis_transform(rho, "LR", phis=phis), "01", phis=phis)
    assert np.allclose(back.matrix, rho.matrix)
    # a photon emitted at phi = pi/2 with local eps_0 along y is V in the lab frame
    one = basis_transform(TwoPhotonDensityMatrix(pure(np.kron(H, H)), "01"), "HV", phis=(np.pi / 2, 0.0))
    assert abs(one.matrix[2, 2]) == pytest.approx(1.0)
    assert np.allclose(single_basis_transform(pure(H), np.pi / 2), pure(V), atol=1e-15)


def test_basis_transform_errors():
    rho = TwoPhotonDensityMatrix(BELL, "01")
    with pytest.raises(ValueError):
        basis_transform(rho, "XY")
    with pytest.raises(ValueError):
        basis_transform(rho, "HV")
    with pytest.raises(ValueError, match="forward-hemisphere"):
        basis_transform(rho, "HV", phis=(0, 0), thetas=(0.1, 2.0))
    with pytest.raises(ValueError):
        stokes_operators("01")


def test_stokes_operators_are_pauli_like():
    for basis in ("HV", "LR"):
        ops = stokes_operators(basis)
        for op in ops[1:]:
            assert np.allclose(op @ op, np.eye(2))
            assert np.trace(op) == pytest.approx(0)


def test_partial_trace():
    rho = pure(np.kron(H, L))
    assert np.allclose(partial_trace(rho, 0), pure(H))
    assert np.allclose(partial_trace(rho, 1), pure(L))
    assert np.allclose(partial_trace(BELL, 1), np.eye(2) / 2)


def test_density_matrix_trace_equals_probability(geometry):
    amp = double_compton_amplitudes(geometry).off
    pref = double_compton_prefactor(geometry.photons[0].omega, geometry.photons[1].omega, geometry.p0, geometry.final_momentum, geometry.k)
    rho = density_matrix_from_amplitudes(amp, pref, "off")
    assert rho.trace == pytest.approx(emission_probability(amp, pref), rel=1e-12)
    assert np.allclose(rho.matrix, rho.matrix.conj().T)
    assert np.linalg.eigvalsh(rho.matrix).min() > -1e-12 * rho.trace


def test_point_observables_undefined_below_floor():
    obs = point_observables(TwoPhotonDensityMatrix(np.zeros((4, 4)), "01"), (0, 0), 1e-5)
    assert not obs.defined
    assert np.isnan(obs.concurrence)
    assert np.all(np.isnan(obs.stokes))
    with pytest.raises(ValueError):
        TwoPhotonDensityMatrix(np.zeros((4, 4))).normalized()
