"""Noisy twenty-questions estimation over a binary symmetric channel.

Four querying policies (adaptive BZ bisection, UEP repetition, random block
coding, superposition coding), their analytic error exponents, and a seeded
Monte Carlo harness.
"""

__version__ = "0.1.0"
