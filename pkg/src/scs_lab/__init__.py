"""Exact and numerical tools for convolutions of one-sided singular densities,
symmetric-polynomial uniqueness systems and Birkhoff sums over rotations."""

__version__ = "0.1.0"
