"""Contact whirl curves in the Lorentzian Heisenberg group.

Frame geometry, Frenet data, whirl detection, curve construction by
quadratures, contact magnetic trajectories and null-curve profiles.
"""
__version__ = "0.1.0"
