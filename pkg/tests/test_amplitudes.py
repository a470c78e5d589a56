import numpy as np
import pytest

from entangled_compton.amplitudes import (
    ORDERINGS,
    Photon,
    ScatteringGeometry,
    _ordering_pieces,
    double_compton_amplitudes,
    double_compton_off,
    double_compton_on,
    double_compton_on_factorized,
    double_compton_total,
    emission_matrix,
    final_electron_momentum,
    on_shell_concurrence_estimate,
    ordering_integrals,
    polarization_basis,
    single_compton_amplitude,
    u_table,
    vertex_expansion,
)
from entangled_compton.errors import MaskedPointError
from entangled_compton.pulse import CIRCULAR_LEFT, LaserPulse
from entangled_compton.quadrature import SLOT
from entangled_compton.relativistic import IDENTITY4, minkowski_dot, slash
from conftest import GAMMA0, SCALE, make_geometry


def rel(a, b):
    return np.abs(np.asarray(a) - np.asarray(b)).max() / np.abs(b).max()


def test_polarization_basis_is_transverse_and_orthonormal():
    theta, phi = 0.3, 1.1
    basis = polarization_basis(theta, phi)
    q = Photon(1.0, theta, phi).momentum
    assert np.allclose(minkowski_dot(basis, q), 0)
    gram = minkowski_dot(basis[:, None, :], basis[None, :, :])
    assert np.allclose(gram, -np.eye(2))


def test_final_momentum_without_emission_is_initial():
    p0 = np.array([GAMMA0, 0, 0, np.sqrt(GAMMA0**2 - 1)])
    k = LaserPulse(0.1, 1e-5, 40.0).k
    assert np.allclose(final_electron_momentum(p0, np.zeros(4), np.zeros(4), k), p0)


def test_final_momentum_conservation_laws(geometry):
    p0, p2, k = geometry.p0, geometry.final_momentum, geometry.k
    big_q = geometry.q(0) + geometry.q(1)
    assert minkowski_dot(p2, p2) == pytest.approx(1.0, abs=1e-9)
    assert minkowski_dot(k, p2) == pytest.approx(minkowski_dot(k, p0 - big_q), rel=1e-12)
    # transverse momentum is conserved
    assert np.allclose(p2[1:3], (p0 - big_q)[1:3])


def test_intermediate_momentum_is_on_shell(geometry):
    for ordering in ORDERINGS:
        p1 = geometry.intermediate_momentum(ordering)
        assert minkowski_dot(p1, p1) == pytest.approx(1.0, abs=1e-9)


def test_vertex_expansion_reproduces_emission_matrix():
    pulse = LaserPulse(0.4, 1e-5, 40.0, CIRCULAR_LEFT)
    geo = ScatteringGeometry(pulse, GAMMA0, (Photon(0.3 * SCALE, 0.01, 0.4),))
    p0, p1 = geo.p0, geo.final_momentum
    eps = geo.photons[0].basis[1].astype(complex)
    coeff = vertex_expansion(pulse, p0, p1, eps)
    for phi in (-11.0, 0.3, 7.9):
        amp = pulse.normalized_amplitude(phi)
        fields = [1.0, amp, np.conj(amp), pulse.normalized_field_squared(phi)]
        rebuilt = sum(f * c for f, c in zip(fields, coeff))
        assert np.allclose(rebuilt, emission_matrix(pulse, p0, p1, eps, phi), atol=1e-13)


@pytest.mark.parametrize("ordering", ORDERINGS)
def test_u_table_is_product_of_vertex_expansions(geometry, ordering):
    pc = _ordering_pieces(geometry, ordering)
    first, second = geometry.emission_order(ordering)
    p0, p2 = geometry.p0, geometry.final_momentum
    p1 = geometry.intermediate_momentum(ordering)
    basis = [ph.basis.astype(complex) for ph in geometry.photons]
    c1 = vertex_expansion(geometry.pulse, p0, p1, basis[first])  # (pol, slot, 4, 4)
    c2 = vertex_expansion(geometry.pulse, p1, p2, basis[second])
    prop = slash(p1) + IDENTITY4
    table = u_table(pc)
    assert len(table) == 16
    seen = set()
    for (key2, key1), mat in table.values():
        a, b = SLOT[key2], SLOT[key1]
        seen.add((a, b))
        ref = np.einsum("bij,jk,akl->abil", c2[:, a], prop, c1[:, b])
        assert np.allclose(mat, ref, atol=1e-12 * np.abs(ref).max() + 1e-300)
    assert len(seen) == 16


def test_ward_identity(geometry):
    integrals = [ordering_integrals(geometry, o) for o in ORDERINGS]
    amp = double_compton_amplitudes(geometry, integrals=integrals)
    scale = np.abs(amp.total).max()
    for j in range(2):
        pols = [ph.basis.astype(complex) for ph in geometry.photons]
        pols[j] = np.array([geometry.q(j)] * 2, dtype=complex)
        gauge = double_compton_amplitudes(geometry, pols=pols, integrals=integrals)
        assert np.abs(gauge.total).max() < 1e-10 * scale
        assert np.abs(gauge.off).max() < 1e-10 * scale


def test_single_emission_ward_identity():
    pulse = LaserPulse(0.1, 1e-5, 40.0)
    geo = ScatteringGeometry(pulse, GAMMA0, (Photon(0.45 * SCALE, 0.5 / GAMMA0, 0.3),))
    amp = single_compton_amplitude(geo)
    gauge = single_compton_amplitude(geo, pols=[np.array([geo.q(0)] * 2, dtype=complex)])
    assert np.abs(gauge).max() < 1e-10 * np.abs(amp).max()


@pytest.mark.parametrize("standalone", [False, True])
def test_on_shell_factorization(geometry, standalone):
    on = double_compton_on(geometry)
    assert rel(double_compton_on_factorized(geometry, standalone=standalone), on) < 1e-9


def test_channel_helpers(geometry):
    amp = double_compton_amplitudes(geometry)
    assert np.allclose(double_compton_off(geometry), amp.off)
    assert np.allclose(double_compton_total(geometry), amp.off + amp.on)
    assert np.array_equal(amp.channel("total"), amp.total)


def test_photon_exchange_symmetry():
    a = make_geometry(0.3, 0.45, 0.01, 0.02, 0.7, 2.9)
    b = make_geometry(0.45, 0.3, 0.02, 0.01, 2.9, 0.7)
    ma, mb = double_compton_amplitudes(a), double_compton_amplitudes(b)
    for name in ("off", "on"):
        assert rel(np.swapaxes(getattr(mb, name), 0, 1), getattr(ma, name)) < 1e-10


def test_on_shell_channel_is_a_product_state(geometry):
    assert on_shell_concurrence_estimate(double_compton_on(geometry)) < 1e-6


def test_single_emission_scales_with_intensity_at_weak_field():
    # first harmonic of linear Compton scattering: amplitude linear in a0
    def amp(a0):
        pulse = LaserPulse(a0, 1e-5, 40.0)
        geo = ScatteringGeometry(pulse, GAMMA0, (Photon(0.5 * SCALE / 1.0, 1 / GAMMA0, 0.0),))
        return np.sum(np.abs(single_compton_amplitude(geo)) ** 2)

    assert amp(0.002) / amp(0.001) == pytest.approx(4.0, rel=1e-4)


def test_positron_branch_is_masked():
    geo = make_geometry(w1=2 * GAMMA0 / SCALE, w2=0.1, theta1=0.0)
    with pytest.raises(MaskedPointError, match="positron"):
        double_compton_amplitudes(geo)


def test_photon_count_checks(geometry):
    with pytest.raises(ValueError):
        single_compton_amplitude(geometry)
    one = geometry.with_photons(geometry.photons[0])
    with pytest.raises(ValueError):
        double_compton_amplitudes(one)
    with pytest.raises(ValueError):
        Photon(-1.0, 0.0, 0.0)
