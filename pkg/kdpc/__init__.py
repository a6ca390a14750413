"""Kernelized data-driven predictive control with offset-free integral action.

Offline, kernel ridge regression learns a predictor of future outputs from past input increments and outputs and an
analytic linearization of a second kernel map gives the effect of future increments. Online, a receding-horizon
quadratic program over input increments drives the plant output to a reference.
"""

__version__ = "0.1.0"
