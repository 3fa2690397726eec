"""Exact computations in the integral cohomology rings of Bott manifolds."""

from .ring import BottMatrix, RingElement, alpha, embed, generator, mul, power, validate

__all__ = ["BottMatrix", "RingElement", "alpha", "embed", "generator", "mul", "power", "validate"]
