"""expsum-lab - mean values of exponential sums over the zeros of exponential systems."""

__version__ = "0.1.0"
__author__ = "expsum-lab developers"
