#!/usr/bin/env python3
"""OLS with classical inference on a small synthetic problem.

Fits a two-regressor model, prints the coefficient table with standard
errors, t statistics and two-sided p-values, and shows the exact-tail
Student-t helper on its own.
"""

import datetime as dt

import numpy as np

from di_decomp import Frame, ols_fit, student_t_two_sided_p

rng = np.random.default_rng(42)
n = 120
dates = tuple(dt.date(2020, 1, 1) + dt.timedelta(days=i) for i in range(n))

x1 = rng.standard_normal(n)
x2 = rng.standard_normal(n)
y = 0.5 + 1.8 * x1 + 0.0 * x2 + rng.standard_normal(n) * 2.0

fit = ols_fit(y, Frame.from_columns(dates, {"x1": x1, "x2": x2}))

print(f"{'name':<8} {'estimate':>10} {'stderr':>10} {'t':>8} {'p':>10}")
for i, name in enumerate(fit.column_names):
    print(
        f"{name:<8} {fit.coefficients[i]:>10.4f} {fit.stderr[i]:>10.4f} "
        f"{fit.t_statistics[i]:>8.2f} {fit.p_values[i]:>10.4g}"
    )
print(f"\nR-squared {fit.r_squared:.4f}  adjusted {fit.adj_r_squared:.4f}")
print(f"n = {fit.n_observations}, residual dof = {fit.dof_residual}")

# x1 is a real driver, x2 is noise: its p-value should be large.
assert fit.p_value("x2") > 0.05

# The tail helper is exact (incomplete beta), not a normal approximation:
# for 1 degree of freedom the distribution is Cauchy and P(|T| >= 1) = 1/2.
print("\ntwo-sided p at t=1, dof=1:", student_t_two_sided_p(1.0, 1))
print("two-sided p at t=2, dof=10:", student_t_two_sided_p(2.0, 10))
