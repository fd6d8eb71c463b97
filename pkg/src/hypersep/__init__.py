"""Uniform separation of disc sequences through intermediate points."""

__version__ = "0.1.0"
