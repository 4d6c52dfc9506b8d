#pragma once

// Scalar special functions used by the log-spectrum variance stabilization
// and the chi-square thresholds of the stationarity tests.

namespace evospec {

/// Probability / degrees-of-freedom pair for a chi-square quantile lookup.
struct QuantileQuery {
  double p = 0.5;
  int df = 1;

  /// Throws std::domain_error unless 0 < p < 1 and df >= 1.
  void validate() const;
};

/// Digamma function psi(x) for x > 0. Throws std::domain_error otherwise.
double digamma(double x);

/// Trigamma function psi'(x) for x > 0. Throws std::domain_error otherwise.
double trigamma(double x);

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
double gamma_p(double a, double x);

/// Chi-square CDF with df degrees of freedom.
double chi2_cdf(double x, int df);

/// p-quantile of the chi-square distribution, found by bracketed bisection
/// on chi2_cdf.
double chi2_quantile(const QuantileQuery& q);

inline double chi2_quantile(double p, int df) { return chi2_quantile(QuantileQuery{p, df}); }

}  // namespace evospec
