"""Algebraic decoding attack on rank-metric codes via MaxMinors-augmented Ourivski-Johansson systems."""

__version__ = "0.1.0"
