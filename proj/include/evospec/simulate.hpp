#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace evospec {

/// Real samples at unit spacing. Values are always finite.
struct TimeSeries {
  std::vector<double> values;
  long origin = 0;
  std::string meta;

  std::size_t size() const { return values.size(); }
  /// Throws std::invalid_argument if any sample is NaN or infinite.
  void validate() const;
};

/// Time modulation c(t) applied to the stationary base process.
struct Envelope {
  enum class Kind { none, gaussian_bump };
  Kind kind = Kind::none;
  double a = 200.0;
  /// Exponent sign: c(t) = exp(sign * (t - T/2)^2 / (2 a^2)).
  int sign = +1;

  static Envelope none() { return {}; }
  static Envelope bump(double a, int sign = +1) { return {Kind::gaussian_bump, a, sign}; }

  /// c(t) for a series of length T.
  double at(double t, std::size_t T) const;
};

/// ARMA(p, q) driven by N(0, noise_sd^2) innovations, optionally modulated:
/// Y(t) = sum ar[i] Y(t-1-i) + Z(t) + sum ma[j] Z(t-1-j),  X(t) = c(t) Y(t).
struct ModelSpec {
  std::vector<double> ar;
  std::vector<double> ma;
  double noise_sd = 1.0;
  Envelope envelope;
  std::string name;

  /// Throws std::invalid_argument if the AR part is not stationary or noise_sd <= 0.
  void validate() const;
};

/// Smallest modulus among the roots of 1 - ar[0] z - ... - ar[p-1] z^p
/// (infinity when p = 0). The AR part is stationary iff this exceeds 1.
double ar_root_modulus(const std::vector<double>& ar);

/// Which flavor of the catalog models to build.
enum class Study { size, power };

/// Catalog models 'a'..'h'. Size variants of (a)-(g) are unmodulated; power
/// variants and (h) carry a bump envelope with a = 200 and the given sign.
ModelSpec model_catalog(char id, Study study = Study::size, int envelope_sign = +1);

/// Burn-in length discarded before the first returned sample.
std::size_t burn_in_length(const ModelSpec& model);

/// Derives the generator seed of one Monte Carlo replicate.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate);

/// T samples of the model. Deterministic in (model, T, seed).
TimeSeries simulate(const ModelSpec& model, std::size_t T, std::uint64_t seed);

}  // namespace evospec
