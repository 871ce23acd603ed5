"""newsrec: config-driven training and evaluation of neural news recommenders."""

__version__ = "0.1.0"
