#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "evospec/simulate.hpp"
#include "evospec/taper.hpp"

namespace evospec {

/// Time-frequency sampling plan: I disjoint length-N blocks and J frequencies
/// spaced B = 2 pi (K+1)/(N+1) apart, starting one buffer above zero.
struct TFGrid {
  std::vector<long> block_centers;
  std::vector<double> freqs;
  int N = 0;
  int K = 0;
  double spacing = 0.0;
  double buffer = 0.0;
  std::size_t T = 0;

  int I() const { return static_cast<int>(block_centers.size()); }
  int J() const { return static_cast<int>(freqs.size()); }
};

struct GridOptions {
  int K = 5;
  std::optional<int> blocks;
  double buffer_frac = 0.7;
};

/// Default block count max(2, floor(log2 T)).
int default_block_count(std::size_t T);

/// Builds the grid for a series of length T. Throws std::invalid_argument
/// naming the violated constraint (J < 2, N < 2K+1, ...).
TFGrid build_grid(std::size_t T, const GridOptions& opts = {});

/// Taper spec matched to a grid: length N, K tapers, W = (K+1) pi / N.
TaperSpec grid_taper_spec(const TFGrid& grid);

/// Multitaper estimate at block center t and angular frequency w:
/// (1/K) sum_k |sum_u g_k(u - t) X(u) e^{-i w u}|^2 over the block around t.
double estimate_at(const TimeSeries& x, long t, double w, const TaperSet& ts);

/// I x J matrix of estimates, row-major by block.
struct SpectralEstimate {
  TFGrid grid;
  int K = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i * grid.J() + j)]; }
};

SpectralEstimate estimate_grid(const TimeSeries& x, const TFGrid& grid, const TaperSet& ts);

/// CSV with a header of frequencies and one row per block center.
std::string spectral_estimate_csv(const SpectralEstimate& est);

}  // namespace evospec
