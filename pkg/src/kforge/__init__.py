"""Exact-arithmetic toolkit for cyclotomic Euler systems and their
Kolyvagin-class factorizations."""

__version__ = "0.1.0"
