"""Lens elliptic gamma function, elliptic hypergeometric sum/integrals and
numerical verification of their transformation identities."""

__version__ = "0.1.0"
