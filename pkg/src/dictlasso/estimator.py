"""Scikit-learn estimator wrapping the dictionary-penalized solver.

DictionaryLasso fits min 0.5 * ||X w - y||^2 + lam * ||D w||_1 with the
package's ADMM solver and exposes the usual estimator surface: fit /
predict / score, get_params / set_params, trailing-underscore fitted
attributes, and sklearn input validation.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .dictionaries import DictionarySpec
from .simplify import DictionaryProblem, simplify
from .solver import SolveOptions, solve_full, solve_simplified


class DictionaryLasso(RegressorMixin, BaseEstimator):
    """Linear regression with an l1 penalty on a dictionary transform of the weights.

    Parameters
    ----------
    dictionary : None, array of shape (m, n_features), or DictionarySpec
        Penalty operator D. None means the identity (plain LASSO).
    lam : float, default=1.0
        Penalty strength; 0 gives (minimum-norm) least squares.
    path : {"simplified", "full"}, default="simplified"
        "simplified" eliminates the unpenalized directions of D in closed
        form and runs ADMM on the sparse part; "full" runs ADMM directly
        on the weights. Both reach the same optimum; "simplified" is the
        default because it works on the smaller reduced problem.
    rho, abs_tol, rel_tol, max_iters, over_relaxation
        ADMM controls; see SolveOptions.

    Attributes
    ----------
    coef_ : weights of shape (n_features,)
    intercept_ : always 0.0 (kept for API compatibility; center y upstream)
    n_iter_ : ADMM iterations run
    converged_ : whether the solver met its tolerances
    objective_ : penalized objective value at coef_
    result_ : the full SolveResult
    simplified_ : the SimplifiedForm (only on the "simplified" path)
    """

    def __init__(
        self,
        dictionary=None,
        lam=1.0,
        path="simplified",
        rho=1.0,
        abs_tol=1e-10,
        rel_tol=1e-8,
        max_iters=50000,
        over_relaxation=1.6,
    ):
        self.dictionary = dictionary
        self.lam = lam
        self.path = path
        self.rho = rho
        self.abs_tol = abs_tol
        self.rel_tol = rel_tol
        self.max_iters = max_iters
        self.over_relaxation = over_relaxation

    def _resolve_dictionary(self, n_features):
        if self.dictionary is None:
            return np.eye(n_features)
        if isinstance(self.dictionary, DictionarySpec):
            d = self.dictionary.build()
        else:
            d = np.asarray(self.dictionary, dtype=float)
        if d.ndim != 2 or d.shape[1] != n_features:
            raise ValueError(
                f"dictionary must have {n_features} columns, got shape {d.shape}"
            )
        return d

    def fit(self, X, y):
        X, y = validate_data(self, X, y, y_numeric=True)
        y = np.asarray(y, dtype=float).ravel()
        if self.path not in ("simplified", "full"):
            raise ValueError(f"path must be 'simplified' or 'full', got {self.path!r}")
        if not self.lam >= 0.0:
            raise ValueError(f"lam must be nonnegative, got {self.lam!r}")
        d = self._resolve_dictionary(X.shape[1])
        opts = SolveOptions(
            rho=self.rho,
            abs_tol=self.abs_tol,
            rel_tol=self.rel_tol,
            max_iters=self.max_iters,
            over_relaxation=self.over_relaxation,
        )
        problem = DictionaryProblem(
            phi=np.asarray(X, dtype=float), c=y, d=d, lam=float(self.lam)
        )
        if self.path == "simplified":
            self.simplified_ = simplify(problem)
            result = solve_simplified(self.simplified_, problem.lam, opts)
        else:
            result = solve_full(problem, opts)
        self.result_ = result
        self.coef_ = result.theta_hat
        self.intercept_ = 0.0
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.objective_ = result.objective
        return self

    def predict(self, X):
        check_is_fitted(self)
        X = validate_data(self, X, reset=False)
        return X @ self.coef_
