"""Newton's method over the rationals as an arithmetic dynamical system."""

__version__ = "0.1.0"
