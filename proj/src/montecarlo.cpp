#include "evospec/montecarlo.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "evospec/stattest.hpp"

namespace evospec {

Interval clopper_pearson(int successes, int trials, double confidence) {
  if (trials < 1 || successes < 0 || successes > trials) throw std::invalid_argument("clopper_pearson: bad counts");
  const double tail = 0.5 * (1.0 - confidence);
  Interval ci;
  ci.lo = successes == 0 ? 0.0 : boost::math::ibeta_inv(successes, trials - successes + 1, tail);
  ci.hi = successes == trials ? 1.0 : boost::math::ibeta_inv(successes + 1, trials - successes, 1.0 - tail);
  return ci;
}

McSummary mc_study(const ModelSpec& model, const McOptions& opts) {
  if (opts.M < 1) throw std::invalid_argument("mc_study: replicate count M must be >= 1");
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw std::invalid_argument("mc_study: alpha must lie in (0, 1)");
  model.validate();

  McSummary out;
  out.model = model.name.empty() ? "custom" : model.name;
  out.M = opts.M;
  out.T = opts.T;
  out.alpha = opts.alpha;
  out.seed = opts.seed;
  out.grid = build_grid(opts.T, opts.grid);
  const TaperSet tapers = compute_dpss(grid_taper_spec(out.grid));

  struct Tally {
    int psr = 0;
    int rs = 0;
    int excluded = 0;
    int first_failed = -1;
    std::string first_error;
  };

  unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(opts.M));
  std::vector<Tally> tallies(workers);

  auto run = [&](unsigned w) {
    Tally& tally = tallies[w];
    for (int r = static_cast<int>(w); r < opts.M; r += static_cast<int>(workers)) {
      try {
        const auto x = simulate(model, opts.T, replicate_seed(opts.seed, static_cast<std::uint64_t>(r)));
        const auto table = log_table(estimate_grid(x, out.grid, tapers));
        if (psr_test(table, opts.alpha).decision == Decision::non_stationary) ++tally.psr;
        if (rs_test(table, opts.alpha).decision == Decision::non_stationary) ++tally.rs;
      } catch (const std::exception& e) {
        ++tally.excluded;
        if (tally.first_failed < 0) {
          tally.first_failed = r;
          tally.first_error = e.what();
        }
      }
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }

  int first_failed = -1;
  for (const auto& t : tallies) {
    out.psr_rejections += t.psr;
    out.rs_rejections += t.rs;
    out.exclusions += t.excluded;
    if (t.first_failed >= 0 && (first_failed < 0 || t.first_failed < first_failed)) {
      first_failed = t.first_failed;
      out.first_exclusion = "replicate " + std::to_string(t.first_failed) + ": " + t.first_error;
    }
  }
  if (out.exclusions * 100 > opts.M) {
    throw std::runtime_error("mc_study: " + std::to_string(out.exclusions) + " of " + std::to_string(opts.M) +
                             " replicates failed (more than 1%); first failure at " + out.first_exclusion);
  }
  out.included = opts.M - out.exclusions;
  if (out.included > 0) {
    out.psr_rate = static_cast<double>(out.psr_rejections) / out.included;
    out.rs_rate = static_cast<double>(out.rs_rejections) / out.included;
    out.psr_ci = clopper_pearson(out.psr_rejections, out.included);
    out.rs_ci = clopper_pearson(out.rs_rejections, out.included);
  }
  return out;
}

}  // namespace evospec
