"""Penalty-weight calibration for QUBO reformulations of constrained problems."""

from _bigm import *  # noqa: F401,F403
