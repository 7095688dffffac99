#pragma once

// Scalar special functions used by the statistics layer.  All of these are
// implemented in-house so results are bit-stable across platforms and
// library versions.

namespace causalkit {

// Digamma function psi(x) for x > 0.  Recurrence shift into x >= 8 followed
// by the asymptotic series; absolute error below 1e-12 over the usage range.
double digamma(double x);

// Complementary error function.  Series expansion for small arguments and a
// Lentz-evaluated continued fraction for large ones; relative error below
// 1e-13, and accurate deep into the underflow tail (erfc(25) ~ 8e-274).
double erfc(double x);

// Standard normal CDF, via erfc.
double normal_cdf(double x);

// Standard normal quantile (inverse CDF) for p in (0, 1).  Rational initial
// estimate polished with one Halley step against normal_cdf; absolute error
// below 1e-12 across the full double range of p.
double normal_quantile(double p);

// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in
// [0, 1], evaluated with the modified Lentz continued fraction.
double reg_inc_beta(double a, double b, double x);

// Two-sided p-value of a Student-t statistic with df degrees of freedom:
// P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

}  // namespace causalkit
