"""Symmetry-built probe states and Fisher-information analysis for
multiparameter rotation estimation."""

__version__ = "0.1.0"
