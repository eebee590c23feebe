"""Exact checks of the local formula for determinants of Gauß-Manin connections
of irregular connections on the projective line."""

__version__ = "0.1.0"
