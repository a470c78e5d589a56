import numpy as np
import pytest

from entangled_compton.amplitudes import Photon, ScatteringGeometry
from entangled_compton.pulse import LaserPulse

GAMMA0 = 70.7
OMEGA0 = 1e-5
SCALE = 4 * GAMMA0**2 * OMEGA0


def make_geometry(w1=0.3, w2=0.45, theta1=1 / GAMMA0, theta2=1 / GAMMA0, phi1=np.pi / 2, phi2=3 * np.pi / 2, a0=0.1, delta_phi=40.0, polarization=None, gamma0=GAMMA0):
    kwargs = {} if polarization is None else {"polarization": polarization}
    pulse = LaserPulse(a0, OMEGA0, delta_phi, **kwargs)
    scale = 4 * gamma0**2 * OMEGA0
    photons = (Photon(w1 * scale, theta1, phi1), Photon(w2 * scale, theta2, phi2))
    return ScatteringGeometry(pulse, gamma0, photons)


@pytest.fixture
def geometry():
    return make_geometry()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def record_criterion(number, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
