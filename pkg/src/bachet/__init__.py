"""Bachet curves y^2 = x^3 + D: traces, anomalous primes and elliptic Korselt numbers."""

__version__ = "0.1.0"
