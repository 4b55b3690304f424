"""Estimator-style wrappers so the growth computations compose with sklearn.

``get_params``/``set_params`` come from :class:`sklearn.base.BaseEstimator`;
fitted attributes carry the usual trailing underscore.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_rank, check_tol
from .automaton import Automaton, validate
from .extension import strict_growth_verdict
from .freegroup import parse_reduced
from .spectral import growth_rate
from .stallings import build_core, contains, subgroup_automaton


def _as_automaton(X):
    if isinstance(X, Automaton):
        return X
    return validate(X)


class GrowthRateEstimator(BaseEstimator):
    """Certified growth rate of the language of a weighted automaton.

    Parameters
    ----------
    tol : rational-like, default 1e-9
        Relative width of the spectral enclosure.
    n_max : int, default 30
        Census length used for cross-validation and the asymptotic fit.
    fit_polyexp : bool, default True
        Attach the per-residue polynomial fit.

    Attributes
    ----------
    report_ : GrowthReport
    rho_ : SpectralEnclosure
    lambda_ : tuple of Fraction
        ``(lower, upper)`` for ``max(rho, 1)``.
    period_ : int
    """

    def __init__(self, tol=1e-9, n_max=30, fit_polyexp=True):
        self.tol = tol
        self.n_max = n_max
        self.fit_polyexp = fit_polyexp

    def fit(self, X, y=None):
        tol = check_tol(self.tol)
        self.report_ = growth_rate(_as_automaton(X), tol, self.n_max, fit=self.fit_polyexp)
        self.rho_ = self.report_.rho
        self.lambda_ = (self.report_.lambda_lower, self.report_.lambda_upper)
        self.period_ = self.rho_.period
        return self

    def predict(self, lengths):
        """Leading asymptotic term ``c * n**d * rho**n`` of ``w(L_n)``."""
        check_is_fitted(self, "report_")
        fit = self.report_.polyfit
        if fit is None:
            raise ValueError("no polynomial fit available; refit with fit_polyexp=True")
        lengths = np.asarray(lengths, dtype=int)
        rho = float(fit.rho_used)
        out = np.zeros(lengths.shape, dtype=float)
        for idx, n in np.ndenumerate(lengths):
            cls = fit.classes[int(n) % fit.period]
            if cls.degree >= 0:
                out[idx] = float(cls.leading_coefficient) * float(n) ** cls.degree * rho ** int(n)
        return out


class SubgroupGrowthEstimator(BaseEstimator):
    """Subgroup of a free group: core graph, language, and growth verdict.

    ``fit`` takes generator words (strings such as ``"a a"``/``"aa"`` or
    letter tuples); ``predict`` answers membership for a list of words.
    """

    def __init__(self, rank=2, tol=1e-9, cofactor_order=1, max_len=8):
        self.rank = rank
        self.tol = tol
        self.cofactor_order = cofactor_order
        self.max_len = max_len

    def _words(self, X):
        r = check_rank(self.rank)
        return [parse_reduced(w, r) if isinstance(w, str) else tuple(w) for w in X]

    def fit(self, X, y=None):
        tol = check_tol(self.tol)
        self.record_ = build_core(self._words(X), self.rank)
        self.automaton_ = subgroup_automaton(self.record_)
        self.growth_ = growth_rate(self.automaton_, tol, n_max=20, fit=False)
        self.lambda_ = (self.growth_.lambda_lower, self.growth_.lambda_upper)
        self.verdict_ = None
        if not self.record_.finite_index and self.rank >= 2:
            self.verdict_ = strict_growth_verdict(
                self.record_, self.rank, tol, self.cofactor_order, self.max_len
            )
        return self

    def predict(self, X):
        check_is_fitted(self, "record_")
        return np.array([contains(self.record_, w) for w in self._words(X)], dtype=bool)
