"""Composite Gauss-Legendre panels with spectral cumulative integration.

Every panel carries ``order`` Legendre nodes.  Besides the usual quadrature
weights, each panel has an integration matrix ``S`` with
``int_{a}^{x_i} f = sum_j S_ij f(x_j)`` exact for polynomials of degree
``order - 1``, so running integrals are available at every node with the
same accuracy as the full integral.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

DEFAULT_ORDER = 16


@lru_cache(maxsize=None)
def reference_rule(order: int = DEFAULT_ORDER) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes, weights and cumulative matrix on ``[-1, 1]``."""
    x, w = legendre.leggauss(order)
    vander = legendre.legvander(x, order - 1)
    # columns: antiderivative (from -1) of each Legendre polynomial at the nodes
    anti = np.empty((order, order))
    for j in range(order):
        coef = np.zeros(order)
        coef[j] = 1.0
        anti[:, j] = legendre.legval(x, legendre.legint(coef, lbnd=-1.0))
    smat = anti @ np.linalg.inv(vander)
    for arr in (x, w, smat):
        arr.setflags(write=False)
    return x, w, smat


class PanelGrid:
    """Uniform panels of Gauss-Legendre nodes covering ``[lower, upper]``."""

    def __init__(self, lower: float, upper: float, n_panels: int, order: int = DEFAULT_ORDER):
        if n_panels < 1:
            raise ValueError("n_panels must be positive")
        self.lower = float(lower)
        self.upper = float(upper)
        self.n_panels = int(n_panels)
        self.order = int(order)
        x, w, smat = reference_rule(self.order)
        self.width = (self.upper - self.lower) / self.n_panels
        half = 0.5 * self.width
        starts = self.lower + self.width * np.arange(self.n_panels)
        self.panel_starts = starts
        self.nodes = (starts[:, None] + half * (x + 1.0)).ravel()
        self.weights = np.tile(half * w, self.n_panels)
        self.smat = half * smat
        self.panel_weights = half * w

    @property
    def size(self) -> int:
        return self.nodes.size

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integral over the full interval along the last axis."""
        return values @ self.weights

    def cumulative(self, values: np.ndarray) -> np.ndarray:
        """Running integral from ``lower`` to each node, along the last axis."""
        values = np.asarray(values)
        shaped = values.reshape(values.shape[:-1] + (self.n_panels, self.order))
        local = shaped @ self.smat.T
        totals = shaped @ self.panel_weights
        offsets = np.cumsum(totals, axis=-1) - totals
        return (local + offsets[..., None]).reshape(values.shape)
