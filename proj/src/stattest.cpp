#include "evospec/stattest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "evospec/specialfn.hpp"

namespace evospec {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("significance level must lie in (0, 1)");
}

void require_shape(const LogSpectraTable& t, int min_rows, int min_cols) {
  if (t.I < min_rows || t.J < min_cols) {
    throw std::invalid_argument("degenerate table " + std::to_string(t.I) + "x" + std::to_string(t.J) +
                                ": need at least " + std::to_string(min_rows) + " rows and " +
                                std::to_string(min_cols) + " columns");
  }
  if (t.W.size() != static_cast<std::size_t>(t.I) * static_cast<std::size_t>(t.J)) {
    throw std::invalid_argument("table storage does not match its dimensions");
  }
}

// Upper critical value. Monte Carlo studies ask for the same few (alpha, df)
// pairs over and over, so the last answers are kept per thread.
double critical_value(double alpha, int df) {
  struct Entry {
    double alpha;
    int df;
    double value;
  };
  thread_local std::vector<Entry> memo;
  for (const auto& e : memo) {
    if (e.alpha == alpha && e.df == df) return e.value;
  }
  const double v = chi2_quantile(1.0 - alpha, df);
  if (memo.size() >= 16) memo.erase(memo.begin());
  memo.push_back({alpha, df, v});
  return v;
}

}  // namespace

const char* to_string(Decision d) { return d == Decision::stationary ? "stationary" : "non-stationary"; }

LogSpectraTable LogSpectraTable::from_values(int I, int J, int K, std::vector<double> values) {
  if (I < 0 || J < 0 || values.size() != static_cast<std::size_t>(I) * static_cast<std::size_t>(J)) {
    throw std::invalid_argument("table values do not match I x J");
  }
  if (K < 1) throw std::invalid_argument("taper count K must be >= 1");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("table entries must be finite");
  }
  LogSpectraTable t;
  t.I = I;
  t.J = J;
  t.K = K;
  t.sigma2 = trigamma(K);
  t.W = std::move(values);
  return t;
}

LogSpectraTable log_table(const SpectralEstimate& est) {
  const int I = est.grid.I();
  const int J = est.grid.J();
  const double offset = -digamma(est.K) + std::log(static_cast<double>(est.K));
  std::vector<double> w;
  w.reserve(est.values.size());
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < J; ++j) {
      const double f = est.at(i, j);
      if (!(f > 0.0) || !std::isfinite(f)) {
        throw std::domain_error("log_table: estimate at block " + std::to_string(i) + ", frequency " +
                                std::to_string(j) + " is not strictly positive");
      }
      w.push_back(std::log(f) + offset);
    }
  }
  auto table = LogSpectraTable::from_values(I, J, est.K, std::move(w));
  if (est.K < 5) {
    table.warnings.push_back("K=" + std::to_string(est.K) +
                             " < 5: the normal approximation of the log estimate may be poor");
  }
  return table;
}

PsrReport psr_test(const LogSpectraTable& table, double alpha) {
  require_shape(table, 2, 2);
  require_alpha(alpha);
  const int I = table.I;
  const int J = table.J;

  std::vector<double> row(static_cast<std::size_t>(I), 0.0);
  std::vector<double> col(static_cast<std::size_t>(J), 0.0);
  double grand = 0.0;
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < J; ++j) {
      const double v = table.at(i, j);
      row[static_cast<std::size_t>(i)] += v;
      col[static_cast<std::size_t>(j)] += v;
      grand += v;
    }
  }
  for (double& r : row) r /= J;
  for (double& c : col) c /= I;
  grand /= static_cast<double>(I) * J;

  PsrReport rep;
  for (double r : row) rep.S_T += (r - grand) * (r - grand);
  rep.S_T *= J;
  for (double c : col) rep.S_F += (c - grand) * (c - grand);
  rep.S_F *= I;
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < J; ++j) {
      const double resid = table.at(i, j) - row[static_cast<std::size_t>(i)] - col[static_cast<std::size_t>(j)] + grand;
      rep.S_IR += resid * resid;
    }
  }

  rep.sigma2 = table.sigma2;
  rep.alpha = alpha;
  rep.df_T = I - 1;
  rep.df_F = J - 1;
  rep.df_IR = (I - 1) * (J - 1);
  rep.threshold_T = critical_value(alpha, rep.df_T);
  rep.threshold_F = critical_value(alpha, rep.df_F);
  rep.threshold_IR = critical_value(alpha, rep.df_IR);

  if (rep.S_IR / rep.sigma2 > rep.threshold_IR) {
    rep.decision = Decision::non_stationary;
    return rep;
  }
  rep.um_flag = true;
  rep.decision = rep.S_T / rep.sigma2 > rep.threshold_T ? Decision::non_stationary : Decision::stationary;
  return rep;
}

std::vector<double> column_midranks(const LogSpectraTable& table) {
  const int I = table.I;
  const int J = table.J;
  std::vector<double> ranks(table.W.size());
  std::vector<int> order(static_cast<std::size_t>(I));
  for (int j = 0; j < J; ++j) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return table.at(a, j) < table.at(b, j); });
    for (int start = 0; start < I;) {
      int stop = start + 1;
      while (stop < I && table.at(order[static_cast<std::size_t>(stop)], j) ==
                             table.at(order[static_cast<std::size_t>(start)], j)) {
        ++stop;
      }
      // positions start..stop-1 hold ranks start+1..stop
      const double mid = 0.5 * (start + 1 + stop);
      for (int s = start; s < stop; ++s) ranks[static_cast<std::size_t>(order[static_cast<std::size_t>(s)] * J + j)] = mid;
      start = stop;
    }
  }
  return ranks;
}

RsReport rs_test(const LogSpectraTable& table, double alpha) {
  require_shape(table, 2, 1);
  require_alpha(alpha);
  const int I = table.I;
  const int J = table.J;
  const auto ranks = column_midranks(table);

  RsReport rep;
  rep.row_mean_ranks.assign(static_cast<std::size_t>(I), 0.0);
  for (int i = 0; i < I; ++i) {
    double s = 0.0;
    for (int j = 0; j < J; ++j) s += ranks[static_cast<std::size_t>(i * J + j)];
    rep.row_mean_ranks[static_cast<std::size_t>(i)] = s / J;
  }
  const double grand = 0.5 * (I + 1);
  for (double r : rep.row_mean_ranks) rep.SS_R += (r - grand) * (r - grand);
  rep.SS_R *= J;
  rep.t_R = rep.SS_R / (I * (I + 1) / 12.0);
  rep.df = I - 1;
  rep.alpha = alpha;
  rep.threshold = critical_value(alpha, rep.df);
  rep.decision = rep.t_R > rep.threshold ? Decision::non_stationary : Decision::stationary;
  return rep;
}

}  // namespace evospec
