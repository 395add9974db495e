"""Verification engine for metric connections with parallel skew torsion
on reductive homogeneous models."""

__version__ = "0.1.0"
