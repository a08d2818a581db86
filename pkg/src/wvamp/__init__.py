"""Weak-value amplification in an imbalanced Mach-Zehnder interferometer.

Quantum weak values (:mod:`wvamp.quantum`, checked by :mod:`wvamp.fock_oracle`)
side by side with a classical stochastic-field model (:mod:`wvamp.stochastic`,
checked by :mod:`wvamp.montecarlo`).
"""

from .errors import (CutoffTooSmall, DegeneratePostSelection, DomainError, NumericalError,
                     StatisticsError, WvampError)
from .quantum import BSMode, CoherentAmplitude, InterferometerParams
from .stochastic import NoisePrior, ValidityReport

__version__ = "0.1.0"
