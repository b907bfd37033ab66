"""
Core Module
===========

Numerical library and orchestration of the identity verifier.

This package provides:
- Truncated Taylor jets and coordinate tensor calculus over them
- Stationary reduction, field equations and harmonic-map identity rows
- Exact-solution catalog, seeded random data and estimate probes
- Identity registry with lazily loaded suite handlers, runner and reports
"""

__version__ = "0.1.0"
