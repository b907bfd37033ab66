"""
Integration Tests
==================

Integration tests for identity-verify suites and the solution catalog.

These tests run the shipped registry, transport table and catalog through
the runner; they need no external services but take longer than unit tests.

Tests are marked with:
- @pytest.mark.integration - Every test in this directory
- @pytest.mark.slow - Transport refits and full oracle sweeps

Run all tests: pytest tests/integration/ -v
Skip slow tests: pytest tests/integration/ -m "not slow"
"""
