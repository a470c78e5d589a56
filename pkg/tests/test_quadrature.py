import numpy as np
import pytest

from entangled_compton import kernels
from entangled_compton.errors import MaskedPointError
from entangled_compton.pulse import CIRCULAR_LEFT, LINEAR_X, LaserPulse, PhaseCoefficients
from entangled_compton.quadrature import (
    Channel,
    QuadratureSettings,
    UpsilonKey,
    pair_integrals,
    regularized_single_I0,
    upsilon,
    upsilon_zeroth_via_relations,
    vertex_integrals,
)
from oracles import BruteForce

FIRST = PhaseCoefficients(0.8, 0.3 + 0.0j, 4.0)
SECOND = PhaseCoefficients(1.7, -0.2 + 0.1j, -3.0)


def rel(a, b):
    return np.abs(np.asarray(a) - np.asarray(b)).max() / np.abs(b).max()


@pytest.fixture(scope="module", params=[LINEAR_X, CIRCULAR_LEFT], ids=["linear", "circular"])
def case(request):
    pulse = LaserPulse(0.5, 1e-5, 40.0, request.param)
    bf = BruteForce(pulse)
    ref = {
        "sign": bf.sign_kernel(FIRST, SECOND),
        "ordered": bf.time_ordered(FIRST, SECOND),
        "summed": bf.summed(FIRST, SECOND),
        "j1": np.concatenate([[bf.single_bare(FIRST)], bf.single(FIRST)]),
        "j2": np.concatenate([[bf.single_bare(SECOND)], bf.single(SECOND)]),
    }
    return pulse, pair_integrals(pulse, FIRST, SECOND), ref


def test_single_vertex_moments(case):
    pulse, pair, ref = case
    assert rel(pair.j1, ref["j1"]) < 1e-10
    assert rel(pair.j2, ref["j2"]) < 1e-10
    assert rel(vertex_integrals(pulse, FIRST).moments, ref["j1"]) < 1e-10


def test_sign_kernel_field_block(case):
    _, pair, ref = case
    assert rel(pair.off[1:, 1:], ref["sign"]) < 1e-10


def test_time_ordered_table_including_bare_slots(case):
    _, pair, ref = case
    assert rel(pair.total, ref["ordered"]) < 1e-9
    # the bare-slot row and column individually
    assert rel(pair.total[0], ref["ordered"][0]) < 1e-9
    assert rel(pair.total[:, 0], ref["ordered"][:, 0]) < 1e-9


def test_on_shell_is_product_of_vertices(case):
    _, pair, ref = case
    assert rel(pair.on, 0.5 * np.outer(ref["j2"], ref["j1"])) < 1e-10


def test_summed_phase_moments(case):
    _, pair, ref = case
    assert rel(pair.i_tilde, ref["summed"]) < 1e-10
    assert pair.i_tilde_0 == pytest.approx(regularized_single_I0(case[0], FIRST + SECOND), rel=1e-12)


def test_channels_add_up(case):
    _, pair, _ = case
    assert np.allclose(pair.off + pair.on, pair.total, rtol=0, atol=1e-14 * np.abs(pair.total).max())
    assert rel(pair.theta_direct, pair.total[1:, 1:]) < 1e-12


def test_i_tilde_accessors(case):
    _, pair, _ = case
    assert pair.i_tilde_j(1, +1) == pair.i_tilde[1]
    assert pair.i_tilde_j(1, -1) == np.conj(pair.i_tilde[2])
    with pytest.raises(ValueError):
        pair.i_tilde_j(3)


def test_upsilon_lookup(case):
    _, pair, _ = case
    key = UpsilonKey(1, -1, 2, 0, Channel.OFF)
    assert key.slots == (1, 3)
    assert upsilon(pair, key) == pair.off[1, 3]
    zk = UpsilonKey(0, 0, 1, 1)
    assert upsilon_zeroth_via_relations(pair, zk) == pair.total[0, 2]
    with pytest.raises(ValueError):
        upsilon_zeroth_via_relations(pair, key)
    with pytest.raises(ValueError):
        UpsilonKey(3, 0, 0, 0)


def test_backends_agree():
    if "compiled" not in kernels.BACKENDS:
        pytest.skip("compiled core not built")
    pulse = LaserPulse(0.5, 1e-5, 40.0, CIRCULAR_LEFT)
    a = pair_integrals(pulse, FIRST, SECOND, backend="python")
    b = pair_integrals(pulse, FIRST, SECOND, backend="compiled")
    for name in ("j1", "j2", "i_tilde", "total", "off", "theta_direct"):
        assert rel(getattr(b, name), getattr(a, name)) < 1e-12


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_refinement_is_converged():
    pulse = LaserPulse(0.1, 1e-5, 40.0)
    coarse = pair_integrals(pulse, FIRST, SECOND)
    fine = pair_integrals(pulse, FIRST, SECOND, settings=QuadratureSettings().refined(2))
    assert fine.n_panels == 2 * coarse.n_panels
    assert rel(coarse.total, fine.total) < 1e-11


def test_panel_count_is_power_of_two_and_tracks_rate():
    pulse = LaserPulse(0.1, 1e-5, 40.0)
    s = QuadratureSettings()
    slow, fast = s.n_panels(pulse, 1.0), s.n_panels(pulse, 500.0)
    for n in (slow, fast):
        assert n & (n - 1) == 0
    assert slow * s.order >= s.min_points
    assert fast * s.order >= s.points_per_period * 502 * 40 / (2 * np.pi)


def test_soft_phase_is_masked():
    pulse = LaserPulse(0.1, 1e-5, 40.0)
    soft = PhaseCoefficients(1e-8, 0.1, 1.0)
    with pytest.raises(MaskedPointError, match="soft/collinear"):
        vertex_integrals(pulse, soft)
    with pytest.raises(MaskedPointError):
        pair_integrals(pulse, FIRST, soft)


def test_coarse_settings_rejected():
    with pytest.raises(ValueError):
        QuadratureSettings(points_per_period=2)
