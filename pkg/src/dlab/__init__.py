"""Simulation and verification toolkit for interactive decision making."""

__version__ = "0.1.0"
