#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "evospec/estimator.hpp"
#include "evospec/simulate.hpp"

using namespace evospec;

namespace {

constexpr double kPi = std::numbers::pi;

// Literal form: phase e^{-iwu} with absolute time u.
double estimate_literal(const TimeSeries& x, long t, double w, const TaperSet& ts) {
  const long h = ts.half_length();
  double acc = 0.0;
  for (int k = 0; k < ts.K(); ++k) {
    std::complex<double> U = 0.0;
    for (long u = t - h; u <= t + h; ++u) {
      U += ts.at(k, static_cast<int>(u - t)) * x.values[static_cast<std::size_t>(u)] * std::polar(1.0, -w * u);
    }
    acc += std::norm(U);
  }
  return acc / ts.K();
}

struct Fixture {
  TFGrid grid = build_grid(512);
  TaperSet ts = compute_dpss(grid_taper_spec(grid));
};

}  // namespace

TEST_CASE("default grid for T=512") {
  const TFGrid g = build_grid(512);
  CHECK(g.I() == 9);
  CHECK(g.N == 55);
  CHECK(g.K == 5);
  CHECK(g.spacing == doctest::Approx(12.0 * kPi / 56.0));
  CHECK(g.spacing == doctest::Approx(0.6732).epsilon(1e-4));
  CHECK(g.freqs.front() == doctest::Approx(0.4712).epsilon(1e-4));
  CHECK(g.J() == 4);
  CHECK(g.freqs.back() <= kPi - g.buffer + 1e-12);
  for (int i = 0; i + 1 < g.I(); ++i) CHECK(g.block_centers[i + 1] - g.block_centers[i] == 55);
  CHECK(g.block_centers.front() - 27 >= 0);
  CHECK(g.block_centers.back() + 27 < 512);
  const TaperSpec spec = grid_taper_spec(g);
  CHECK(spec.W == doctest::Approx(6.0 * kPi / 55.0));
  CHECK_NOTHROW(spec.validate());
}

TEST_CASE("minimal grid with a block override") {
  GridOptions opts;
  opts.K = 1;
  opts.blocks = 2;
  const TFGrid g = build_grid(64, opts);
  CHECK(g.I() == 2);
  CHECK(g.N == 31);
  CHECK(g.block_centers[0] == 16);
  CHECK(g.block_centers[1] == 47);
  CHECK_NOTHROW(compute_dpss(grid_taper_spec(g)));
}

TEST_CASE("block count default") {
  CHECK(default_block_count(512) == 9);
  CHECK(default_block_count(1000) == 9);
  CHECK(default_block_count(1024) == 10);
  CHECK(default_block_count(3) == 2);
}

TEST_CASE("grid constraints are named") {
  auto message = [](std::size_t T, GridOptions o) {
    try {
      build_grid(T, o);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  GridOptions tight;
  tight.K = 30;
  CHECK(message(512, tight).find("2K+1") != std::string::npos);
  GridOptions wide;
  wide.K = 12;
  wide.blocks = 9;
  CHECK(message(512, wide).find("J >= 2") != std::string::npos);
  CHECK(message(16, {}).find(">= 32") != std::string::npos);
  GridOptions buf;
  buf.buffer_frac = 0.2;
  CHECK(message(512, buf).find("buffer") != std::string::npos);
  GridOptions one;
  one.blocks = 1;
  CHECK(message(512, one).find("block count") != std::string::npos);
}

TEST_CASE("estimate_at matches the literal formula") {
  Fixture f;
  const TimeSeries x = simulate(model_catalog('f'), 512, 17);
  for (long t : f.grid.block_centers) {
    for (double w : {0.0, 0.4712, 1.3, kPi / 2, 3.0}) {
      const double lit = estimate_literal(x, t, w, f.ts);
      CHECK(estimate_at(x, t, w, f.ts) == doctest::Approx(lit).epsilon(1e-10));
    }
  }
}

TEST_CASE("zero series gives exactly zero") {
  Fixture f;
  TimeSeries x;
  x.values.assign(512, 0.0);
  const auto est = estimate_grid(x, f.grid, f.ts);
  for (double v : est.values) CHECK(v == 0.0);
}

TEST_CASE("white noise is calibrated to 1/(2 pi)") {
  Fixture f;
  const ModelSpec wn = model_catalog('a');
  double acc = 0.0;
  const int R = 500;
  for (int r = 0; r < R; ++r) acc += estimate_at(simulate(wn, 512, replicate_seed(99, r)), 256, kPi / 2, f.ts);
  const double mean = acc / R;
  CHECK(mean > 0.14);
  CHECK(mean < 0.18);
}

TEST_CASE("a cosine on the grid does not leak four bandwidths away") {
  Fixture f;
  const double w0 = f.grid.freqs[0];
  TimeSeries x;
  for (int u = 0; u < 512; ++u) x.values.push_back(std::cos(w0 * u));
  for (long t : f.grid.block_centers) {
    CHECK(estimate_at(x, t, w0, f.ts) > 10.0 * estimate_at(x, t, w0 + 4 * f.grid.spacing, f.ts));
  }
}

TEST_CASE("scaling, sign flip and time shift") {
  Fixture f;
  const TimeSeries x = simulate(model_catalog('b'), 512, 21);
  const auto base = estimate_grid(x, f.grid, f.ts);
  TimeSeries scaled = x, flipped = x;
  for (double& v : scaled.values) v *= 3.0;
  for (double& v : flipped.values) v = -v;
  const auto s = estimate_grid(scaled, f.grid, f.ts);
  const auto n = estimate_grid(flipped, f.grid, f.ts);
  for (std::size_t i = 0; i < base.values.size(); ++i) {
    CHECK(base.values[i] >= 0.0);
    CHECK(s.values[i] == doctest::Approx(9.0 * base.values[i]).epsilon(1e-13));
    CHECK(n.values[i] == doctest::Approx(base.values[i]).epsilon(1e-13));
  }

  TimeSeries shifted;
  shifted.values.assign(7, 0.0);
  shifted.values.insert(shifted.values.end(), x.values.begin(), x.values.end());
  for (long t : f.grid.block_centers) {
    for (double w : f.grid.freqs) {
      CHECK(std::abs(estimate_at(shifted, t + 7, w, f.ts) - estimate_at(x, t, w, f.ts)) < 1e-10);
    }
  }
}

TEST_CASE("AR(1) columns decrease in frequency") {
  Fixture f;
  const ModelSpec ar = model_catalog('b');
  std::vector<double> col(static_cast<std::size_t>(f.grid.J()), 0.0);
  for (int r = 0; r < 20; ++r) {
    const auto est = estimate_grid(simulate(ar, 512, replicate_seed(5, r)), f.grid, f.ts);
    for (int i = 0; i < f.grid.I(); ++i) {
      for (int j = 0; j < f.grid.J(); ++j) col[j] += est.at(i, j);
    }
  }
  for (std::size_t j = 0; j + 1 < col.size(); ++j) CHECK(col[j] > col[j + 1]);
}

TEST_CASE("modulated model changes the middle block relative to the edges") {
  Fixture f;
  for (int sign : {+1, -1}) {
    CAPTURE(sign);
    const ModelSpec h = model_catalog('h', Study::power, sign);
    std::vector<double> row(static_cast<std::size_t>(f.grid.I()), 0.0);
    for (int r = 0; r < 20; ++r) {
      const auto est = estimate_grid(simulate(h, 512, replicate_seed(8, r)), f.grid, f.ts);
      for (int i = 0; i < f.grid.I(); ++i) {
        for (int j = 0; j < f.grid.J(); ++j) row[i] += est.at(i, j);
      }
    }
    const double mid = row[static_cast<std::size_t>(f.grid.I() / 2)];
    for (double edge : {row.front(), row.back()}) {
      const double ratio = mid / edge;
      CHECK((ratio < 0.8 || ratio > 1.25));
    }
  }
}

TEST_CASE("estimation errors") {
  Fixture f;
  const TimeSeries x = simulate(model_catalog('a'), 512, 1);
  CHECK_THROWS_AS(estimate_at(x, 10, 1.0, f.ts), std::out_of_range);
  CHECK_THROWS_AS(estimate_at(x, 500, 1.0, f.ts), std::out_of_range);
  const TaperSet other = compute_dpss({55, 6.0 * kPi / 55, 4});
  CHECK_THROWS_AS(estimate_grid(x, f.grid, other), std::invalid_argument);
  const TimeSeries short_x = simulate(model_catalog('a'), 300, 1);
  CHECK_THROWS_AS(estimate_grid(short_x, f.grid, f.ts), std::out_of_range);
}

TEST_CASE("estimate CSV layout") {
  Fixture f;
  const auto est = estimate_grid(simulate(model_catalog('a'), 512, 2), f.grid, f.ts);
  const std::string csv = spectral_estimate_csv(est);
  CHECK(csv.rfind("t,", 0) == 0);
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 10);
}
