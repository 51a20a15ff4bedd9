"""Clifford superconnections, Dirac operators and a numerical Lichnerowicz verifier."""

__version__ = "0.1.0"
