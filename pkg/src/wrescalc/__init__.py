"""Exact symbolic residue calculus on middle-degree forms.

The package reconstructs, over the rationals, the conformally invariant
bilinear functional obtained from the residue trace of a double commutator
of the principal reflection symbol against two scalars, together with the
critical operator it determines.
"""

__version__ = "0.1.0"
