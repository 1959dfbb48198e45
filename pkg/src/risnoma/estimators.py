"""Estimator-style wrappers around the analytic and Monte Carlo engines.

Inputs are transmit SNRs in dB (``P_b / sigma2``); ``predict`` returns an
``(n, 2)`` array of typical-user and connected-user coverage.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import analytic
from .geometry import DEFAULT_R_MAX_FACTOR
from .mcsim import ScenarioMode, estimate_coverage, simulate_gains
from .params import NetworkParams

__all__ = ["AnalyticCoverage", "MonteCarloCoverage"]


def _snr_column(X):
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single column of transmit SNRs in dB, got shape {X.shape}")
        X = X[:, 0]
    return X


class AnalyticCoverage(BaseEstimator):
    """Closed-form coverage as a function of transmit SNR.

    Parameters
    ----------
    params : NetworkParams, optional
        Fixed network parameters; ``P_b`` is overridden per input SNR.
    K : int
        Chebyshev-Gauss order for the ``alpha_t = 4`` closed form.
    c_mode : {"paper", "corrected", "numeric"}
        Averaged RIS constant variant.
    tol : float
        Quadrature tolerance for the double-integral form.
    """

    def __init__(self, params=None, K=64, c_mode="paper", tol=1e-10):
        self.params = params
        self.K = K
        self.c_mode = c_mode
        self.tol = tol

    def fit(self, X=None, y=None):
        p = self.params if self.params is not None else NetworkParams()
        p.validate()
        self.params_ = p
        return self

    def predict(self, X):
        check_is_fitted(self, "params_")
        snr = _snr_column(X)
        out = np.empty((len(snr), 2))
        for i, s in enumerate(snr):
            pair = analytic.coverage_pair(self.params_.with_snr_db(s), self.tol, self.K, self.c_mode)
            out[i] = pair.p_typical, pair.p_connected
        return out


class MonteCarloCoverage(BaseEstimator):
    """Simulated coverage as a function of transmit SNR.

    ``fit`` samples the SNR-independent gains once; ``predict`` evaluates
    any number of SNRs on that common sample.

    Parameters
    ----------
    params : NetworkParams, optional
    mode : {"ris_noma", "ris_oma", "traditional_noma"}
    trials, seed : int
    expectation : {"analytic", "empirical"}
    r_max_factor : float
        Simulation radius in units of the mean nearest-BS distance.
    n_jobs : int, optional
        Worker threads (default: ``RIS_COVERAGE_THREADS`` or all cores).
    """

    def __init__(self, params=None, mode="ris_noma", trials=100_000, seed=42, expectation="analytic",
                 r_max_factor=DEFAULT_R_MAX_FACTOR, n_jobs=None):
        self.params = params
        self.mode = mode
        self.trials = trials
        self.seed = seed
        self.expectation = expectation
        self.r_max_factor = r_max_factor
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        p = self.params if self.params is not None else NetworkParams()
        p.validate()
        self.mode_ = ScenarioMode(self.mode)
        self.params_ = p
        self.gains_ = simulate_gains(p, self.trials, self.seed, self.r_max_factor, self.n_jobs)
        return self

    def _estimates(self, X):
        check_is_fitted(self, "gains_")
        for s in _snr_column(X):
            yield estimate_coverage(
                self.params_.with_snr_db(s), self.mode_, self.trials, self.seed, self.expectation,
                self.r_max_factor, self.n_jobs, gains=self.gains_,
            )

    def predict(self, X):
        return np.array([[t.probability, c.probability] for t, c in self._estimates(X)]).reshape(-1, 2)

    def predict_interval(self, X):
        """95% half-widths matching :meth:`predict`."""
        return np.array([[t.ci_halfwidth, c.ci_halfwidth] for t, c in self._estimates(X)]).reshape(-1, 2)
