#include "evospec/tradeoff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "evospec/taper.hpp"

namespace evospec {

namespace {

constexpr double kPi = std::numbers::pi;

void require_feasible(int N, int K, Coupling coupling) {
  if (N < 3) throw std::invalid_argument("tradeoff: N must be >= 3, got " + std::to_string(N));
  const int kmax = max_feasible_K(N, coupling);
  if (K < 2 || K > kmax) {
    throw std::invalid_argument("tradeoff: K=" + std::to_string(K) + " infeasible for N=" + std::to_string(N) +
                                " (feasible range 2.." + std::to_string(kmax) + ")");
  }
}

void require_candidates(int N, Coupling coupling) {
  if (N < 3 || max_feasible_K(N, coupling) < 2) {
    throw std::invalid_argument("tradeoff: no feasible K for N=" + std::to_string(N));
  }
}

double max_taper_width(int N, double W, int K) {
  const auto tapers = slepian_tapers(N, W, K);
  double widest = 0.0;
  const auto n = static_cast<std::size_t>(N);
  for (int k = 0; k < K; ++k) {
    widest = std::max(widest, taper_width(std::span<const double>(tapers.data() + static_cast<std::size_t>(k) * n, n)));
  }
  return widest;
}

// Minimizes score(K) over the feasible range, given bound(K) <= refine(K) <=
// score(K).objective. The bound minimizer seeds the incumbent; every other K
// whose cheap bound does not exceed it gets the refined bound, and full
// evaluations then run in refined order until the refined bound alone
// exceeds the incumbent. Exact; ties go to the smaller K.
template <typename Bound, typename Refine, typename Score>
TradeoffPoint branch_and_bound(int N, Coupling coupling, Bound&& bound, Refine&& refine, Score&& score) {
  require_candidates(N, coupling);
  const int kmax = max_feasible_K(N, coupling);
  std::vector<std::pair<double, int>> cheap;
  for (int K = 2; K <= kmax; ++K) cheap.emplace_back(bound(K), K);
  std::sort(cheap.begin(), cheap.end());

  TradeoffPoint best = score(cheap.front().second);
  auto consider = [&](const TradeoffPoint& p) {
    if (p.objective < best.objective || (p.objective == best.objective && p.K < best.K)) best = p;
  };
  std::vector<std::pair<double, int>> refined;
  for (std::size_t i = 1; i < cheap.size() && cheap[i].first <= best.objective; ++i) {
    refined.emplace_back(refine(cheap[i].second), cheap[i].second);
  }
  std::sort(refined.begin(), refined.end());
  for (const auto& [r, K] : refined) {
    if (r > best.objective) break;
    consider(score(K));
  }
  return best;
}

// B_g^(K) is a maximum over the tapers, so any subset bounds it from below.
// The widest taper sits a little below the top of the set; a handful of
// single-taper solves there give a tight bound at O(N) cost each.
double sampled_max_width(int N, double W, int K) {
  double widest = 0.0;
  int last_k = -1;
  for (double frac : {0.0, 0.04, 0.08, 0.12}) {
    const int k = std::max(0, K - 1 - static_cast<int>(std::ceil(frac * K)));
    if (k == last_k) continue;
    last_k = k;
    widest = std::max(widest, taper_width(slepian_taper(N, W, k)));
  }
  return widest;
}

}  // namespace

double bump_characteristic_width(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("envelope width a must be positive");
  return a * std::sqrt(kPi / 2.0);
}

int max_feasible_K(int N, Coupling coupling) { return coupling == Coupling::k_over_n ? N - 1 : N - 2; }

double resolution(int N, int K, Coupling coupling) {
  return (coupling == Coupling::k_over_n ? K : K + 1) * kPi / N;
}

TradeoffPoint evaluate_point(int N, int K, std::optional<double> B_FY, const TradeoffConfig& cfg) {
  require_feasible(N, K, cfg.coupling);
  if (B_FY && !(*B_FY > 0.0)) throw std::invalid_argument("tradeoff: B_FY must be positive");
  TradeoffPoint p;
  p.N = N;
  p.K = K;
  p.W = resolution(N, K, cfg.coupling);
  const double logN = cfg.log_base == LogBase::two ? std::log2(static_cast<double>(N)) : std::log(static_cast<double>(N));
  p.log_term = (logN / K) * (logN / K);
  p.resolution_term = std::pow(p.W, 4);
  p.variance_term = 1.0 / K;
  p.mse19 = p.log_term + p.resolution_term + p.variance_term;
  if (B_FY) {
    p.nonstationary_term = max_taper_width(N, p.W, K) / *B_FY;
    p.mse18 = p.mse19 + p.nonstationary_term;
    p.objective = p.mse18;
  } else {
    p.mse18 = p.mse19;
    p.objective = p.mse19;
  }
  return p;
}

double mse19(int N, int K, const TradeoffConfig& cfg) { return evaluate_point(N, K, std::nullopt, cfg).mse19; }

double mse18(int N, int K, double B_FY, const TradeoffConfig& cfg) {
  return evaluate_point(N, K, B_FY, cfg).mse18;
}

TradeoffPoint optimal_K(int N, Formula formula, std::optional<double> B_FY, const TradeoffConfig& cfg) {
  auto lower = [&](int K) { return evaluate_point(N, K, std::nullopt, cfg).mse19; };
  if (formula == Formula::stationary) {
    return branch_and_bound(N, cfg.coupling, lower, lower, [&](int K) { return evaluate_point(N, K, std::nullopt, cfg); });
  }
  if (!B_FY) throw std::invalid_argument("tradeoff: the modulated formula needs B_FY");
  auto refine = [&](int K) { return lower(K) + sampled_max_width(N, resolution(N, K, cfg.coupling), K) / *B_FY; };
  return branch_and_bound(N, cfg.coupling, lower, refine, [&](int K) { return evaluate_point(N, K, B_FY, cfg); });
}

std::vector<TradeoffPoint> penalized_profile(int N, double B_FY, double penalty_weight, const TradeoffConfig& cfg) {
  if (!(penalty_weight >= 0.0)) throw std::invalid_argument("tradeoff: penalty weight must be nonnegative");
  require_candidates(N, cfg.coupling);
  std::vector<TradeoffPoint> out;
  for (int K = 2; K <= max_feasible_K(N, cfg.coupling); ++K) {
    TradeoffPoint p = evaluate_point(N, K, B_FY, cfg);
    p.penalty = penalty_weight * K;
    p.objective = p.mse18 + p.penalty;
    out.push_back(p);
  }
  return out;
}

TradeoffPoint penalized_K(int N, double B_FY, double penalty_weight, const TradeoffConfig& cfg) {
  if (!(penalty_weight >= 0.0)) throw std::invalid_argument("tradeoff: penalty weight must be nonnegative");
  auto lower = [&](int K) { return evaluate_point(N, K, std::nullopt, cfg).mse19 + penalty_weight * K; };
  return branch_and_bound(
      N, cfg.coupling, lower,
      [&](int K) { return lower(K) + sampled_max_width(N, resolution(N, K, cfg.coupling), K) / B_FY; },
      [&](int K) {
        TradeoffPoint p = evaluate_point(N, K, B_FY, cfg);
        p.penalty = penalty_weight * K;
        p.objective = p.mse18 + p.penalty;
        return p;
      });
}

std::vector<TradeoffPoint> optimal_curve(const std::vector<int>& Ns, Formula formula, std::optional<double> B_FY,
                                         const TradeoffConfig& cfg) {
  // Each N is independent; workers pull the next index until none are left.
  std::vector<TradeoffPoint> out(Ns.size());
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next++; i < Ns.size(); i = next++) {
      try {
        out[i] = optimal_K(Ns[i], formula, B_FY, cfg);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), Ns.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace evospec
