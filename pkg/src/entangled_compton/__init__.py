"""Nonlinear single and double Compton scattering in a pulsed plane wave."""

__version__ = "0.1.0"
