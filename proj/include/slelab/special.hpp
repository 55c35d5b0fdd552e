#pragma once

namespace slelab {

/// log Gamma(x), x > 0.
double log_gamma(double x);

/// Euler beta B(a,b), a,b > 0.
double beta_fn(double a, double b);
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a,b), a,b > 0, x in [0,1].
/// Relative accuracy ~1e-14 via the Lentz continued fraction.
double reg_incomplete_beta(double a, double b, double x);

/// Quantile of the Beta(a,b) law: the x with I_x(a,b) = p.
double inverse_reg_incomplete_beta(double a, double b, double p);

/// Regularized lower incomplete gamma P(a,x) and upper Q(a,x) = 1 - P(a,x).
double reg_lower_gamma(double a, double x);
double reg_upper_gamma(double a, double x);

}  // namespace slelab
