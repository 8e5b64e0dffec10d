"""Exact certification of truncated q-hypergeometric identities and q-congruences."""

__version__ = "0.1.0"
