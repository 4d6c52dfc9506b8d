#include "evospec/estimator.hpp"

#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace evospec {

namespace {
constexpr double kPi = std::numbers::pi;
}

int default_block_count(std::size_t T) {
  if (T < 2) return 2;
  return std::max(2, static_cast<int>(std::floor(std::log2(static_cast<double>(T)))));
}

TFGrid build_grid(std::size_t T, const GridOptions& opts) {
  if (T < 32) throw std::invalid_argument("build_grid: series length must be >= 32, got " + std::to_string(T));
  if (opts.K < 1) throw std::invalid_argument("build_grid: taper count K must be >= 1");
  if (!(opts.buffer_frac >= 0.5 && opts.buffer_frac <= 1.0)) {
    throw std::invalid_argument("build_grid: buffer fraction must lie in [0.5, 1.0]");
  }
  const int I = opts.blocks.value_or(default_block_count(T));
  if (I < 2) throw std::invalid_argument("build_grid: block count must be >= 2");

  int N = static_cast<int>(T / static_cast<std::size_t>(I));
  if (N % 2 == 0) --N;
  if (N < 2 * opts.K + 1) {
    throw std::invalid_argument("build_grid: block length N=" + std::to_string(N) + " is below 2K+1=" +
                                std::to_string(2 * opts.K + 1));
  }

  TFGrid g;
  g.N = N;
  g.K = opts.K;
  g.T = T;
  g.spacing = 2.0 * kPi * (opts.K + 1) / (N + 1);
  g.buffer = opts.buffer_frac * g.spacing;

  // Leftover samples are split evenly before the first and after the last block.
  const long offset = static_cast<long>(T - static_cast<std::size_t>(I) * static_cast<std::size_t>(N)) / 2;
  for (int i = 0; i < I; ++i) g.block_centers.push_back(offset + static_cast<long>(i) * N + (N - 1) / 2);

  const double upper = kPi - g.buffer;
  for (int j = 0;; ++j) {
    const double w = g.buffer + j * g.spacing;
    if (w > upper + 1e-12) break;
    g.freqs.push_back(w);
  }
  if (g.J() < 2) {
    throw std::invalid_argument("build_grid: only " + std::to_string(g.J()) +
                                " frequency fits between the buffers; need J >= 2 (increase N or reduce K)");
  }
  return g;
}

TaperSpec grid_taper_spec(const TFGrid& grid) {
  return TaperSpec{grid.N, (grid.K + 1) * kPi / grid.N, grid.K};
}

double estimate_at(const TimeSeries& x, long t, double w, const TaperSet& ts) {
  const long h = ts.half_length();
  if (t - h < 0 || t + h >= static_cast<long>(x.size())) {
    throw std::out_of_range("estimate_at: block [" + std::to_string(t - h) + ", " + std::to_string(t + h) +
                            "] lies outside the series of length " + std::to_string(x.size()));
  }
  // The global phase e^{-iwt} is dropped; it does not change the modulus.
  const int N = ts.N();
  std::vector<std::complex<double>> phase(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) phase[static_cast<std::size_t>(n)] = std::polar(1.0, -w * (n - h));

  const double* block = x.values.data() + (t - h);
  double sum = 0.0;
  for (int k = 0; k < ts.K(); ++k) {
    const auto g = ts.taper(k);
    std::complex<double> U = 0.0;
    for (int n = 0; n < N; ++n) U += g[static_cast<std::size_t>(n)] * block[n] * phase[static_cast<std::size_t>(n)];
    sum += std::norm(U);
  }
  return sum / ts.K();
}

SpectralEstimate estimate_grid(const TimeSeries& x, const TFGrid& grid, const TaperSet& ts) {
  if (grid.N != ts.N() || grid.K != ts.K()) {
    throw std::invalid_argument("estimate_grid: grid (N=" + std::to_string(grid.N) + ", K=" +
                                std::to_string(grid.K) + ") does not match tapers (N=" + std::to_string(ts.N()) +
                                ", K=" + std::to_string(ts.K()) + ")");
  }
  SpectralEstimate est;
  est.grid = grid;
  est.K = ts.K();
  est.values.reserve(static_cast<std::size_t>(grid.I()) * static_cast<std::size_t>(grid.J()));
  for (long t : grid.block_centers) {
    for (double w : grid.freqs) est.values.push_back(estimate_at(x, t, w, ts));
  }
  return est;
}

std::string spectral_estimate_csv(const SpectralEstimate& est) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "t";
  for (double w : est.grid.freqs) os << ',' << w;
  os << '\n';
  for (int i = 0; i < est.grid.I(); ++i) {
    os << est.grid.block_centers[static_cast<std::size_t>(i)];
    for (int j = 0; j < est.grid.J(); ++j) os << ',' << est.at(i, j);
    os << '\n';
  }
  return os.str();
}

}  // namespace evospec
