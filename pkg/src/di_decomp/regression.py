"""Ordinary least squares with classical (homoskedastic) inference.

The solver is QR-based for conditioning; rank is screened with an SVD of
the design matrix and anything below ``RANK_RTOL`` times the largest
singular value is treated as rank deficient.  Two-sided p-values come from
the Student-t distribution evaluated through the regularized incomplete
beta function, not a normal approximation, so small-sample fits report
correct tails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InsufficientDataError, SingularDesignError
from .series import Frame

RANK_RTOL = 1e-10

__all__ = ["OlsFit", "ols_fit", "student_t_two_sided_p"]


@dataclass(frozen=True, eq=False)
class OlsFit:
    """Coefficients and inference statistics of one OLS estimation.

    ``coefficients`` is ordered intercept-first when an intercept was
    requested; ``column_names`` carries the matching labels ("const" for
    the intercept).  ``n_regressors`` counts slope terms only.
    """

    column_names: tuple[str, ...]
    coefficients: np.ndarray
    stderr: np.ndarray
    t_statistics: np.ndarray
    p_values: np.ndarray
    r_squared: float
    adj_r_squared: float
    fitted: np.ndarray
    residuals: np.ndarray
    n_observations: int
    n_regressors: int
    has_intercept: bool
    dof_residual: int

    def __post_init__(self) -> None:
        for field in ("coefficients", "stderr", "t_statistics", "p_values",
                      "fitted", "residuals"):
            arr = np.asarray(getattr(self, field), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, field, arr)

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self.column_names.index(name)])

    def p_value(self, name: str) -> float:
        return float(self.p_values[self.column_names.index(name)])


def student_t_two_sided_p(t: float, dof: int) -> float:
    """Two-sided tail probability 2*P(T >= |t|) for T ~ Student-t(dof).

    Evaluated as the regularized incomplete beta function
    I_{dof/(dof+t^2)}(dof/2, 1/2); absolute accuracy is better than 1e-10.
    """
    if dof < 1:
        raise InsufficientDataError(f"student_t_two_sided_p: dof must be >= 1, got {dof}")
    if not np.isfinite(t):
        raise ValueError(f"student_t_two_sided_p: t must be finite, got {t}")
    x = dof / (dof + float(t) ** 2)
    return float(special.betainc(dof / 2.0, 0.5, x))


def _dependent_columns(names: tuple[str, ...], svals: np.ndarray,
                       vt: np.ndarray) -> list[str]:
    """Columns with significant weight in the near-null space of the design."""
    cutoff = RANK_RTOL * svals[0]
    null_rows = vt[svals < cutoff, :]
    weight = np.max(np.abs(null_rows), axis=0)
    involved = weight > 0.1 * weight.max()
    return [names[i] for i in np.flatnonzero(involved)]


def ols_fit(y: np.ndarray, X: Frame, intercept: bool = True) -> OlsFit:
    """Fit y on the columns of ``X`` by ordinary least squares.

    Parameters
    ----------
    y
        Response vector, same length as the frame's rows.
    X
        Regressor frame (no constant column; use ``intercept`` instead).
    intercept
        Prepend a constant regressor labelled "const".

    Returns
    -------
    OlsFit
        Point estimates with classical standard errors, t statistics,
        two-sided p-values, (adjusted) R-squared, fitted values and
        residuals.

    Raises
    ------
    InsufficientDataError
        If there are not strictly more rows than estimated parameters.
    SingularDesignError
        If the design matrix is rank deficient; the message names the
        involved columns.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or len(y) != X.n_rows:
        raise InsufficientDataError(
            f"ols_fit: y has length {y.shape} but design has {X.n_rows} rows"
        )
    names: tuple[str, ...] = X.names
    design = X.data
    if intercept:
        design = np.column_stack([np.ones(X.n_rows), X.data])
        names = ("const",) + X.names
    n, p = design.shape
    if n <= p:
        raise InsufficientDataError(
            f"ols_fit: {n} observations cannot identify {p} parameters"
        )

    svals = np.linalg.svd(design, compute_uv=False) if p else np.array([1.0])
    if p and (svals.size < p or svals[-1] < RANK_RTOL * svals[0]):
        _, svals_full, vt = np.linalg.svd(design)
        cols = _dependent_columns(names, svals_full, vt)
        raise SingularDesignError(
            f"design matrix is rank deficient; dependent columns: {cols}"
        )

    q, r = np.linalg.qr(design)
    beta = np.linalg.solve(r, q.T @ y)
    fitted = design @ beta
    residuals = y - fitted

    dof = n - p
    rss = float(residuals @ residuals)
    sigma2 = rss / dof
    r_inv = np.linalg.solve(r, np.eye(p))
    xtx_inv_diag = np.sum(r_inv * r_inv, axis=1)
    stderr = np.sqrt(sigma2 * xtx_inv_diag)

    with np.errstate(divide="ignore", invalid="ignore"):
        t_stats = np.divide(beta, stderr, out=np.zeros_like(beta), where=stderr > 0.0)
        exact = (stderr == 0.0) & (beta != 0.0)
        t_stats[exact] = np.inf * np.sign(beta[exact])
    p_vals = np.array([student_t_two_sided_p(t, dof) if np.isfinite(t) else 0.0
                       for t in t_stats])

    if intercept:
        tss = float(np.sum((y - y.mean()) ** 2))
    else:
        tss = float(y @ y)
    if tss > 0.0:
        r2 = 1.0 - rss / tss
    else:
        r2 = 0.0
    r2 = min(1.0, max(0.0, r2))
    scale = (n - 1) / dof if intercept else n / dof
    adj_r2 = 1.0 - (1.0 - r2) * scale

    return OlsFit(
        column_names=names,
        coefficients=beta,
        stderr=stderr,
        t_statistics=t_stats,
        p_values=p_vals,
        r_squared=r2,
        adj_r_squared=adj_r2,
        fitted=fitted,
        residuals=residuals,
        n_observations=n,
        n_regressors=X.n_cols,
        has_intercept=intercept,
        dof_residual=dof,
    )
