"""Finite-scale toolkit for set theory, models of ZFC and forcing."""

__version__ = "0.1.0"
