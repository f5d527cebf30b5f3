#pragma once

// Distribution functions used by the statistics layer and by error-based
// pruning. Incomplete gamma/beta use the usual series + continued-fraction
// split (modified Lentz).

namespace intstab::math {

double normal_cdf(double x);
/// Inverse of normal_cdf for p in (0, 1).
double normal_quantile(double p);

/// Regularised lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularised upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);
/// Regularised incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

/// P(X >= x) for X ~ chi-square(df).
double chi2_sf(double x, double df);
/// P(|T| >= |t|) for T ~ Student-t(df).
double student_t_two_sided(double t, double df);
/// P(X >= f) for X ~ F(d1, d2).
double f_sf(double f, double d1, double d2);

}  // namespace intstab::math
