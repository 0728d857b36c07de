"""Coefficient computations for quaternionic modular forms on split D4."""

from .errors import D4Error, DomainError

__all__ = ["D4Error", "DomainError"]
__version__ = "0.1.0"
