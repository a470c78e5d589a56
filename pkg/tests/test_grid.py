import numpy as np
import pytest

from entangled_compton.grid import PanelGrid, reference_rule


@pytest.mark.parametrize("degree", [0, 3, 9, 15])
def test_cumulative_exact_for_polynomials(degree):
    grid = PanelGrid(-1.5, 2.5, 3, order=16)
    x = grid.nodes
    run = grid.cumulative(x**degree)
    exact = (x ** (degree + 1) - (-1.5) ** (degree + 1)) / (degree + 1)
    assert np.abs(run - exact).max() <= 1e-13 * max(1.0, np.abs(exact).max())


def test_integral_of_oscillation():
    grid = PanelGrid(0.0, 10.0, 20)
    assert grid.integrate(np.cos(3 * grid.nodes)) == pytest.approx(np.sin(30.0) / 3, abs=1e-14)


def test_cumulative_last_node_matches_full_integral_up_to_tail():
    grid = PanelGrid(0.0, np.pi, 8)
    f = np.sin(grid.nodes)
    run = grid.cumulative(f)
    # the last node sits inside the last panel
    assert run[-1] == pytest.approx(1 - np.cos(grid.nodes[-1]), abs=1e-14)
    assert grid.integrate(f) == pytest.approx(2.0, abs=1e-14)


def test_reference_rule_is_read_only():
    x, w, s = reference_rule(8)
    assert w.sum() == pytest.approx(2.0)
    with pytest.raises(ValueError):
        s[0, 0] = 1.0


def test_rejects_empty_grid():
    with pytest.raises(ValueError):
        PanelGrid(0, 1, 0)
