"""
Handlers Module
===============

Suite handlers for the identity registry.

Each handler owns one suite of identity rows (reduction, field equations,
harmonic maps, inequalities, tensor self-checks) behind a common async
interface; the loader imports them lazily by suite type.
"""
