"""Quasinormal-mode lattices for Schwarzschild(-de Sitter) black holes.

Submodules: series (truncated series algebra), potentials (wave potentials
and tortoise coordinates), normalform (Birkhoff normal form and the
quantization symbol), scaling (complex-scaled direct eigensolver), catalog
(mode lattices and counting), pseudospectrum (rotated-oscillator
instability demo), cli (command-line interface).
"""

__version__ = "0.1.0"
