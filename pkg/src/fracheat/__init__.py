"""Fractional powers of the Laplacian and of the backward heat operator.

Also covers the high-dimensional lifting that approximates the backward
operator and numerical checks of the associated weighted inequalities.
"""

__version__ = "0.1.0"
