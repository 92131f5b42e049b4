"""PXRD-conditioned autoregressive crystal structure generation toolkit."""

__version__ = "0.1.0"
