#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "evospec/montecarlo.hpp"

using namespace evospec;

TEST_CASE("Clopper-Pearson endpoints") {
  const Interval none = clopper_pearson(0, 10);
  CHECK(none.lo == 0.0);
  CHECK(none.hi == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-10));
  const Interval all = clopper_pearson(10, 10);
  CHECK(all.hi == 1.0);
  CHECK(all.lo == doctest::Approx(std::pow(0.025, 0.1)).epsilon(1e-10));
  const Interval mid = clopper_pearson(50, 1000);
  CHECK(mid.lo < 0.05);
  CHECK(mid.hi > 0.05);
  CHECK(mid.lo == doctest::Approx(0.03733).epsilon(1e-3));
  CHECK(mid.hi == doctest::Approx(0.06539).epsilon(1e-3));
  CHECK_THROWS(clopper_pearson(3, 2));
  CHECK_THROWS(clopper_pearson(0, 0));
}

TEST_CASE("single replicate gives a zero or one rate") {
  McOptions o;
  o.M = 1;
  const McSummary s = mc_study(model_catalog('a'), o);
  CHECK(s.included == 1);
  CHECK((s.psr_rate == 0.0 || s.psr_rate == 1.0));
  CHECK((s.rs_rate == 0.0 || s.rs_rate == 1.0));
}

TEST_CASE("study is deterministic and independent of the worker count") {
  McOptions o;
  o.M = 60;
  o.threads = 1;
  const McSummary a = mc_study(model_catalog('b'), o);
  o.threads = 4;
  const McSummary b = mc_study(model_catalog('b'), o);
  CHECK(a.psr_rejections == b.psr_rejections);
  CHECK(a.rs_rejections == b.rs_rejections);
  CHECK(a.psr_rate == doctest::Approx(a.psr_rejections / 60.0));
  CHECK(a.exclusions == 0);
  CHECK(a.grid.N == 55);
  o.seed = 8;
  const McSummary c = mc_study(model_catalog('b'), o);
  CHECK(c.seed == 8);
}

TEST_CASE("modulated model is rejected far more often") {
  McOptions o;
  o.M = 100;
  const McSummary h = mc_study(model_catalog('h', Study::power), o);
  const McSummary a = mc_study(model_catalog('a'), o);
  CHECK(h.psr_rate > 0.8);
  CHECK(h.rs_rate > 0.6);
  CHECK(a.rs_rate < 0.15);
}

TEST_CASE("invalid study options") {
  McOptions o;
  o.M = 0;
  CHECK_THROWS_AS(mc_study(model_catalog('a'), o), std::invalid_argument);
  o.M = 10;
  o.alpha = 1.5;
  CHECK_THROWS_AS(mc_study(model_catalog('a'), o), std::invalid_argument);
  o.alpha = 0.05;
  o.T = 20;
  CHECK_THROWS_AS(mc_study(model_catalog('a'), o), std::invalid_argument);
}

TEST_CASE("failing replicates are counted and abort the study past one percent") {
  ModelSpec tiny = model_catalog('a');
  tiny.noise_sd = 1e-200;  // squared block sums underflow to zero
  McOptions o;
  o.M = 20;
  try {
    mc_study(tiny, o);
    FAIL("expected the study to abort");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("20 of 20") != std::string::npos);
  }
}
