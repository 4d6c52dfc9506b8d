#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "evospec/estimator.hpp"
#include "evospec/simulate.hpp"
#include "evospec/specialfn.hpp"
#include "evospec/stattest.hpp"

using namespace evospec;

namespace {

LogSpectraTable table(int I, int J, std::vector<double> v, int K = 5) {
  return LogSpectraTable::from_values(I, J, K, std::move(v));
}

// Rank by counting: (#smaller) + (#equal including itself + 1) / 2.
double brute_t_R(const LogSpectraTable& t) {
  std::vector<double> row(static_cast<std::size_t>(t.I), 0.0);
  for (int j = 0; j < t.J; ++j) {
    for (int i = 0; i < t.I; ++i) {
      int less = 0, equal = 0;
      for (int r = 0; r < t.I; ++r) {
        less += t.at(r, j) < t.at(i, j);
        equal += t.at(r, j) == t.at(i, j);
      }
      row[i] += less + (equal + 1) / 2.0;
    }
  }
  double ss = 0.0;
  for (double s : row) ss += (s / t.J - (t.I + 1) / 2.0) * (s / t.J - (t.I + 1) / 2.0);
  return t.J * ss / (t.I * (t.I + 1) / 12.0);
}

SpectralEstimate constant_estimate(double c) {
  SpectralEstimate est;
  est.grid = build_grid(512);
  est.K = 5;
  est.values.assign(static_cast<std::size_t>(est.grid.I() * est.grid.J()), c);
  return est;
}

}  // namespace

TEST_CASE("log table of a constant estimate") {
  const auto t = log_table(constant_estimate(0.25));
  const double expect = std::log(0.25) - digamma(5.0) + std::log(5.0);
  for (double w : t.W) CHECK(w == doctest::Approx(expect).epsilon(1e-14));
  CHECK(t.sigma2 == doctest::Approx(0.22132295573711532).epsilon(1e-13));
  CHECK(t.warnings.empty());
}

TEST_CASE("doubling the estimates shifts the table by ln 2") {
  SpectralEstimate est = constant_estimate(1.0);
  for (std::size_t i = 0; i < est.values.size(); ++i) est.values[i] = 0.1 + 0.01 * i;
  SpectralEstimate twice = est;
  for (double& v : twice.values) v *= 2.0;
  const auto a = log_table(est);
  const auto b = log_table(twice);
  for (std::size_t i = 0; i < a.W.size(); ++i) CHECK(b.W[i] - a.W[i] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("log table rejects non-positive estimates and warns for small K") {
  SpectralEstimate est = constant_estimate(1.0);
  est.values[7] = 0.0;
  CHECK_THROWS_AS(log_table(est), std::domain_error);
  est.values[7] = -1.0;
  CHECK_THROWS_AS(log_table(est), std::domain_error);
  SpectralEstimate few = constant_estimate(1.0);
  few.K = 3;
  const auto t = log_table(few);
  CHECK(t.warnings.size() == 1);
  CHECK(t.sigma2 == doctest::Approx(trigamma(3.0)));
}

TEST_CASE("PSR on an all-equal table") {
  const auto r = psr_test(table(3, 4, std::vector<double>(12, 0.7)), 0.05);
  CHECK(r.S_T == doctest::Approx(0.0).scale(1.0));
  CHECK(r.S_F == doctest::Approx(0.0).scale(1.0));
  CHECK(r.S_IR == doctest::Approx(0.0).scale(1.0));
  CHECK(r.decision == Decision::stationary);
  CHECK(r.um_flag);
}

TEST_CASE("PSR hand table") {
  auto t = table(2, 2, {0, 0, 1, 1});
  t.sigma2 = 1.0;
  const auto r = psr_test(t, 0.05);
  CHECK(r.S_T == doctest::Approx(1.0));
  CHECK(r.S_F == doctest::Approx(0.0).scale(1.0));
  CHECK(r.S_IR == doctest::Approx(0.0).scale(1.0));
  CHECK(r.df_T == 1);
  CHECK(r.df_F == 1);
  CHECK(r.df_IR == 1);
  CHECK(r.threshold_T == doctest::Approx(chi2_quantile(0.95, 1)));
}

TEST_CASE("PSR degrees of freedom and stage logic") {
  // Strong row effect, no interaction: decided at the second stage.
  std::vector<double> rows;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 4; ++j) rows.push_back(3.0 * i + 0.1 * j);
  auto r = psr_test(table(9, 4, rows), 0.05);
  CHECK(r.df_T == 8);
  CHECK(r.df_F == 3);
  CHECK(r.df_IR == 24);
  CHECK(r.threshold_T == doctest::Approx(15.5073).epsilon(1e-5));
  CHECK(r.um_flag);
  CHECK(r.decision == Decision::non_stationary);

  // Strong interaction: decided at the first stage, between-times never run.
  std::vector<double> checker;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 4; ++j) checker.push_back(((i + j) % 2 ? 3.0 : -3.0));
  r = psr_test(table(9, 4, checker), 0.05);
  CHECK(!r.um_flag);
  CHECK(r.decision == Decision::non_stationary);
}

TEST_CASE("ANOVA decomposition identity") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(36);
    for (double& x : v) x = 2.0 * nd(rng) + 5.0;
    const auto t = table(9, 4, v);
    const auto r = psr_test(t, 0.05);
    double grand = 0.0;
    for (double x : v) grand += x;
    grand /= v.size();
    double total = 0.0;
    for (double x : v) total += (x - grand) * (x - grand);
    CHECK(std::abs(total - (r.S_T + r.S_F + r.S_IR)) < 1e-10 * std::max(1.0, total));
  }
}

TEST_CASE("RS on identical rows and on increasing columns") {
  const auto tied = rs_test(table(4, 3, std::vector<double>(12, 1.0)), 0.05);
  CHECK(tied.t_R == 0.0);
  CHECK(tied.decision == Decision::stationary);
  for (double r : tied.row_mean_ranks) CHECK(r == 2.5);

  const auto inc = rs_test(table(3, 3, {1, 1, 1, 2, 2, 2, 3, 3, 3}), 0.05);
  CHECK(inc.row_mean_ranks == std::vector<double>{1, 2, 3});
  CHECK(inc.SS_R == doctest::Approx(6.0));
  CHECK(inc.t_R == doctest::Approx(6.0));
  CHECK(inc.df == 2);
}

TEST_CASE("mid-ranks share tied positions") {
  const auto t = table(4, 1, {5.0, 1.0, 5.0, 3.0});
  CHECK(column_midranks(t) == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("RS matches counting ranks on every 4x3 table over {1,2,3}") {
  std::vector<double> v(12);
  int mismatches = 0;
  for (int code = 0; code < 531441; ++code) {
    int c = code;
    for (double& x : v) {
      x = 1 + c % 3;
      c /= 3;
    }
    const auto t = table(4, 3, v);
    if (std::abs(rs_test(t, 0.05).t_R - brute_t_R(t)) > 1e-12) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("invariances") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<double> v(36);
  for (double& x : v) x = nd(rng);
  const auto base = table(9, 4, v);
  const auto p0 = psr_test(base, 0.05);
  const auto r0 = rs_test(base, 0.05);

  std::vector<double> shifted = v, warped = v;
  for (double& x : shifted) x += 2.0 * std::log(3.7);
  for (std::size_t i = 0; i < warped.size(); ++i) {
    const int j = static_cast<int>(i % 4);
    warped[i] = j % 2 ? std::exp(v[i]) : v[i] * v[i] * v[i] + j;
  }
  const auto p1 = psr_test(table(9, 4, shifted), 0.05);
  CHECK(p1.S_T == doctest::Approx(p0.S_T).epsilon(1e-10));
  CHECK(p1.S_F == doctest::Approx(p0.S_F).epsilon(1e-10));
  CHECK(p1.S_IR == doctest::Approx(p0.S_IR).epsilon(1e-10));
  CHECK(rs_test(table(9, 4, shifted), 0.05).t_R == r0.t_R);
  CHECK(rs_test(table(9, 4, warped), 0.05).t_R == r0.t_R);
}

TEST_CASE("scaling the raw series leaves both tests unchanged") {
  const TFGrid grid = build_grid(512);
  const TaperSet ts = compute_dpss(grid_taper_spec(grid));
  TimeSeries x = simulate(model_catalog('c'), 512, 4);
  const auto a = log_table(estimate_grid(x, grid, ts));
  for (double& v : x.values) v *= 0.3;
  const auto b = log_table(estimate_grid(x, grid, ts));
  CHECK(rs_test(a, 0.05).t_R == doctest::Approx(rs_test(b, 0.05).t_R));
  CHECK(psr_test(a, 0.05).S_T == doctest::Approx(psr_test(b, 0.05).S_T).epsilon(1e-9));
  CHECK(psr_test(a, 0.05).S_IR == doctest::Approx(psr_test(b, 0.05).S_IR).epsilon(1e-9));
}

TEST_CASE("rejection is monotone in alpha") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v(36);
    for (int i = 0; i < 36; ++i) v[i] = nd(rng) * 0.5 + 0.05 * (i / 4);
    const auto t = table(9, 4, v);
    bool psr_prev = false, rs_prev = false;
    for (double alpha : {0.001, 0.01, 0.05, 0.1, 0.2, 0.5}) {
      const bool psr = psr_test(t, alpha).decision == Decision::non_stationary;
      const bool rs = rs_test(t, alpha).decision == Decision::non_stationary;
      CHECK((!psr_prev || psr));
      CHECK((!rs_prev || rs));
      psr_prev = psr;
      rs_prev = rs;
    }
  }
}

TEST_CASE("degenerate tables and bad levels are rejected") {
  CHECK_THROWS_AS(psr_test(table(1, 4, {1, 2, 3, 4}), 0.05), std::invalid_argument);
  CHECK_THROWS_AS(psr_test(table(4, 1, {1, 2, 3, 4}), 0.05), std::invalid_argument);
  CHECK_THROWS_AS(rs_test(table(1, 4, {1, 2, 3, 4}), 0.05), std::invalid_argument);
  CHECK_NOTHROW(rs_test(table(4, 1, {1, 2, 3, 4}), 0.05));
  CHECK_THROWS_AS(psr_test(table(2, 2, {1, 2, 3, 4}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rs_test(table(2, 2, {1, 2, 3, 4}), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(table(2, 2, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(table(2, 2, {1, 2, 3, std::nan("")}), std::invalid_argument);
}

TEST_CASE("decision names") {
  CHECK(std::string(to_string(Decision::stationary)) == "stationary");
  CHECK(std::string(to_string(Decision::non_stationary)) == "non-stationary");
}
