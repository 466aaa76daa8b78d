"""Isotropy of quadratic forms over Q and F_q(t), with certificates and diophantine formulas."""

from .field import FqT, GlobalField, Place, Q

__version__ = "0.1.0"

__all__ = ["FqT", "GlobalField", "Place", "Q"]
