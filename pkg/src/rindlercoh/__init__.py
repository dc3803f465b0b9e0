"""Coherence of localized two-mode Gaussian states seen by uniformly accelerated observers.

Pipeline: localized wave packets (``modes``) give Bogolyubov overlaps
(``overlaps``), which define a Gaussian channel (``channel``) acting on
two-mode covariance matrices (``gaussian``); ``mismatch`` and ``sweeps``
build the parameter studies and ``reports``/``cli`` write them out.
"""

__version__ = "0.1.0"
