"""Simulator and formula library for hybrid discrete-continuous teleportation."""
__version__ = "1.0.0"
