"""Exponential sums over primes in short intervals and the circle-method
machinery for sums of almost-equal prime powers."""

__version__ = "0.1.0"
