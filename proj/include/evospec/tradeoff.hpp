#pragma once

#include <optional>
#include <vector>

namespace evospec {

/// MSE surrogate with (18) or without (19) the non-stationarity term.
enum class Formula { with_modulation = 18, stationary = 19 };

/// How the resolution W follows from (N, K).
enum class Coupling {
  k_over_n,       ///< W = K pi / N
  k_plus_one,     ///< W = (K+1) pi / N
};

/// Base of the logarithm in the (log N / K)^2 bias term.
enum class LogBase { two, natural };

struct TradeoffConfig {
  Coupling coupling = Coupling::k_over_n;
  LogBase log_base = LogBase::two;
};

/// Characteristic-width lower bound of the Gaussian-bump modulated process,
/// a * sqrt(pi / 2).
double bump_characteristic_width(double a);

struct TradeoffPoint {
  int N = 0;
  int K = 0;
  double W = 0.0;
  double log_term = 0.0;            ///< (log N / K)^2
  double resolution_term = 0.0;     ///< W^4
  double variance_term = 0.0;       ///< 1 / K
  double nonstationary_term = 0.0;  ///< B_g^(K) / B_FY (0 for the stationary formula)
  double mse18 = 0.0;
  double mse19 = 0.0;
  double penalty = 0.0;
  double objective = 0.0;  ///< the quantity that was minimized
};

/// Feasible taper counts [2, K_max] for length N.
int max_feasible_K(int N, Coupling coupling = Coupling::k_over_n);
double resolution(int N, int K, Coupling coupling = Coupling::k_over_n);

double mse19(int N, int K, const TradeoffConfig& cfg = {});
double mse18(int N, int K, double B_FY, const TradeoffConfig& cfg = {});

/// All four terms at (N, K). B_FY absent means the stationary formula and
/// skips the taper computation.
TradeoffPoint evaluate_point(int N, int K, std::optional<double> B_FY, const TradeoffConfig& cfg = {});

/// Exhaustive minimization over feasible K; ties go to the smaller K. The
/// modulated formula visits K in increasing order of mse19 and stops once
/// that lower bound reaches the best value found, which is still exact.
TradeoffPoint optimal_K(int N, Formula formula, std::optional<double> B_FY = std::nullopt,
                        const TradeoffConfig& cfg = {});

/// Minimizes mse18 + penalty_weight * K.
TradeoffPoint penalized_K(int N, double B_FY, double penalty_weight = 1.0, const TradeoffConfig& cfg = {});

/// Every feasible K at fixed N with mse18, penalty and penalized objective.
std::vector<TradeoffPoint> penalized_profile(int N, double B_FY, double penalty_weight = 1.0,
                                             const TradeoffConfig& cfg = {});

/// optimal_K for every N in Ns.
std::vector<TradeoffPoint> optimal_curve(const std::vector<int>& Ns, Formula formula,
                                         std::optional<double> B_FY = std::nullopt,
                                         const TradeoffConfig& cfg = {});

}  // namespace evospec
