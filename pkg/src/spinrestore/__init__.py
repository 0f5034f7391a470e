"""Remote restoring of (0,1)-excitation states along an open XX spin chain."""

__version__ = "0.1.0"
