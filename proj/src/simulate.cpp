#include "evospec/simulate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace evospec {

void TimeSeries::validate() const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument("time series has a non-finite value at index " + std::to_string(i));
    }
  }
}

double Envelope::at(double t, std::size_t T) const {
  if (kind == Kind::none) return 1.0;
  const double d = t - 0.5 * static_cast<double>(T);
  return std::exp(sign * d * d / (2.0 * a * a));
}

double ar_root_modulus(const std::vector<double>& ar) {
  const auto p = static_cast<Eigen::Index>(ar.size());
  if (p == 0) return std::numeric_limits<double>::infinity();
  // Eigenvalues of the companion matrix are the reciprocals of the roots.
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) companion(0, i) = ar[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  const Eigen::VectorXcd eig = companion.eigenvalues();
  double largest = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) largest = std::max(largest, std::abs(eig(i)));
  return largest == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / largest;
}

void ModelSpec::validate() const {
  if (!(noise_sd > 0.0) || !std::isfinite(noise_sd)) throw std::invalid_argument("noise_sd must be positive");
  for (double c : ar) {
    if (!std::isfinite(c)) throw std::invalid_argument("AR coefficients must be finite");
  }
  for (double c : ma) {
    if (!std::isfinite(c)) throw std::invalid_argument("MA coefficients must be finite");
  }
  const double modulus = ar_root_modulus(ar);
  if (!(modulus > 1.0)) {
    std::ostringstream os;
    os << "AR polynomial is not stationary: smallest root modulus " << modulus << " <= 1";
    throw std::invalid_argument(os.str());
  }
  if (envelope.kind == Envelope::Kind::gaussian_bump) {
    if (!(envelope.a > 0.0)) throw std::invalid_argument("envelope width a must be positive");
    if (envelope.sign != 1 && envelope.sign != -1) throw std::invalid_argument("envelope sign must be +1 or -1");
  }
}

ModelSpec model_catalog(char id, Study study, int envelope_sign) {
  ModelSpec m;
  m.name = std::string(1, id);
  switch (id) {
    case 'a': break;
    case 'b': m.ar = {0.9}; break;
    case 'c': m.ar = {-0.9}; break;
    case 'd': m.ma = {0.8}; break;
    case 'e': m.ma = {-0.8}; break;
    case 'f':
      m.ar = {-0.4};
      m.ma = {-0.8};
      break;
    case 'g': m.ar = {1.385929, -0.9604}; break;
    case 'h':
      m.ar = {0.8, -0.4};
      m.noise_sd = 100.0;
      m.envelope = Envelope::bump(200.0, envelope_sign);
      return m;
    default: throw std::invalid_argument(std::string("unknown model id '") + id + "', expected a..h");
  }
  if (study == Study::power) m.envelope = Envelope::bump(200.0, envelope_sign);
  return m;
}

std::size_t burn_in_length(const ModelSpec& model) {
  return std::max<std::size_t>(1000, 50 * (model.ar.size() + model.ma.size()));
}

namespace {
std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t replicate) {
  // The base seed is hashed before the xor so that nearby seeds do not
  // produce permutations of the same replicate streams.
  return splitmix64(splitmix64(seed) ^ replicate);
}

TimeSeries simulate(const ModelSpec& model, std::size_t T, std::uint64_t seed) {
  model.validate();
  if (T == 0) throw std::invalid_argument("simulate: length T must be >= 1");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, model.noise_sd);

  const std::size_t p = model.ar.size();
  const std::size_t q = model.ma.size();
  const std::size_t burn = burn_in_length(model);
  const std::size_t total = burn + T;

  std::vector<double> y(total, 0.0);
  std::vector<double> z(total, 0.0);
  for (std::size_t t = 0; t < total; ++t) {
    z[t] = normal(rng);
    double v = z[t];
    for (std::size_t i = 0; i < p && i < t; ++i) v += model.ar[i] * y[t - 1 - i];
    for (std::size_t j = 0; j < q && j < t; ++j) v += model.ma[j] * z[t - 1 - j];
    y[t] = v;
  }

  TimeSeries out;
  out.values.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    out.values[t] = model.envelope.at(static_cast<double>(t), T) * y[burn + t];
  }
  std::ostringstream meta;
  meta << "simulated model=" << (model.name.empty() ? "custom" : model.name) << " T=" << T << " seed=" << seed;
  out.meta = meta.str();
  return out;
}

}  // namespace evospec
