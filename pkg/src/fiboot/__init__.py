"""Sieve bootstrap inference for fractionally integrated time series.

Library layout:

* ``fracdiff``  — fractional difference/integration filters
* ``acvf``      — exact and asymptotic second-moment theory
* ``levinson``  — Yule-Walker solver and exact Gaussian simulation
* ``ar_sieve``  — AR sieve fitting and AIC order selection
* ``bootstrap`` — raw / pre-filtered / fixed-filter sieve bootstrap
* ``stats``     — statistics under study and memory estimators
* ``edgeworth`` — quadratic-form Edgeworth expansion for autocorrelations
* ``harness``   — Monte Carlo experiment engine
* ``cli``       — command line front end (``fiboot`` / ``python -m fiboot``)
"""

__version__ = "0.1.0"
