"""Numerical laboratory for GL(n,R)-invariant n-leg field theories.

Computes torsion, invariants, square-root-determinant Lagrangians and
field-equation residuals for frame fields on coordinate charts, and checks
the Lie-group vacuum solutions of the frame field equations.
"""

__version__ = "0.1.0"
