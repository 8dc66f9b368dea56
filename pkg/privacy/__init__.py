"""
Private data release package
JL projection followed by Laplace noise, calibration and distance recovery
"""

__all__ = ['rng', 'types', 'errors', 'projection', 'noise', 'mechanism', 'recovery', 'diagnostics']
