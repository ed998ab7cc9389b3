"""
Finite-blocklength tools for classical-quantum channels: optimal binary and
M-ary quantum hypothesis tests, meta-converse bounds and quasi-perfect code
certificates.
"""

__version__ = "0.1.0"
