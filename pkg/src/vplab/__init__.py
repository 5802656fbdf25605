"""Numerical tools for vortex pairs: radial profiles, the linearized operator
around them, steady co-rotating pair expansions and viscous pair simulations."""

__version__ = "0.1.0"
