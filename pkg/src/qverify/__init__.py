"""Exact verification of terminating 4phi3 summation identities over Q(q, a, b)."""

__version__ = "0.1.0"
