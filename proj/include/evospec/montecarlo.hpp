#pragma once

#include <cstdint>
#include <string>

#include "evospec/estimator.hpp"
#include "evospec/simulate.hpp"

namespace evospec {

struct McOptions {
  int M = 1000;
  std::size_t T = 512;
  double alpha = 0.05;
  std::uint64_t seed = 7;
  GridOptions grid;
  /// 0 = one worker per hardware thread.
  unsigned threads = 0;
};

/// Exact (Clopper-Pearson) two-sided 95% interval for a binomial proportion.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};
Interval clopper_pearson(int successes, int trials, double confidence = 0.95);

struct McSummary {
  std::string model;
  int M = 0;
  std::size_t T = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int included = 0;
  int exclusions = 0;
  std::string first_exclusion;
  int psr_rejections = 0;
  int rs_rejections = 0;
  double psr_rate = 0.0;
  double rs_rate = 0.0;
  Interval psr_ci;
  Interval rs_ci;
  TFGrid grid;
};

/// Simulates M replicates (replicate r uses replicate_seed(seed, r)), runs
/// both stationarity tests on each and tallies rejections. Replicates that
/// fail are counted as exclusions; more than 1% aborts with std::runtime_error.
McSummary mc_study(const ModelSpec& model, const McOptions& opts);

}  // namespace evospec
