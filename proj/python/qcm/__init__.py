"""Statevector simulator and circuit toolkit for periodic spectral solvers."""

from _qcm import *  # noqa: F401,F403
from _qcm import __doc__  # noqa: F401
