"""Lattice vertex-algebra toolkit for (0,2) deformations of the quintic:
OPE engine, differential checks and chiral-ring cohomology."""

__version__ = "0.1.0"
