#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cvmono/fuzz.hpp"

using namespace cvmono;

TEST_CASE("random state generator") {
  SUBCASE("deterministic per seed") {
    const auto a = random_physical_state(3, 4242, 6);
    const auto b = random_physical_state(3, 4242, 6);
    CHECK((a.cov - b.cov).cwiseAbs().maxCoeff() == 0.0);
    const auto c = random_physical_state(3, 4243, 6);
    CHECK((a.cov - c.cov).cwiseAbs().maxCoeff() > 0.0);
  }

  SUBCASE("depth zero is a thermal product") {
    const auto s = random_physical_state(3, 9, 0);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        if (i != j) CHECK(s.cov(i, j) == 0.0);
    CHECK(s.cov(0, 0) >= 1.0);
    CHECK(s.cov(0, 0) == s.cov(1, 1));
  }

  SUBCASE("every seed yields a physical state") {
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
      const auto s = random_physical_state(3, seed, 6);
      CHECK(is_physical(s).physical);
    }
  }

  SUBCASE("recipes rebuild the exact state through JSON") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto recipe = random_recipe(3, seed * 17 + 1, 6);
      const auto direct = build_recipe(recipe);
      const auto rebuilt = build_recipe(recipe_from_json(recipe_to_json(recipe)));
      CHECK((direct.cov - rebuilt.cov).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("fuzz monogamy search") {
  SUBCASE("product states trivially satisfy the sum relation") {
    const auto rep = fuzz_monogamy(1, 1, 0);
    CHECK(rep.ok());
    CHECK(rep.min_residuals[0] >= 1.0);  // both D's are >= 1 without correlations
  }

  SUBCASE("no violations over a batch of deep random states") {
    const auto rep = fuzz_monogamy(400, 2024, 6);
    CHECK(rep.ok());
    for (double r : rep.min_residuals) CHECK(r >= kResidualTol);
    CHECK(rep.min_steering_product >= 1.0 - 1e-9);
    CHECK(rep.max_collective_excess <= 1e-12);
    // the sample genuinely explores the steering regime
    CHECK(rep.steerable_trials * 10 >= rep.trials);
  }

  SUBCASE("deterministic aggregation") {
    const auto a = fuzz_monogamy(60, 5, 5);
    const auto b = fuzz_monogamy(60, 5, 5);
    for (int k = 0; k < 5; ++k) CHECK(a.min_residuals[k] == b.min_residuals[k]);
    CHECK(a.saturation_count == b.saturation_count);
  }

  SUBCASE("worst-state recipes replay to the reported residual") {
    const auto rep = fuzz_monogamy(200, 31337, 6);
    for (int k = 0; k < 5; ++k) {
      const int b = rep.worst_role[k];
      const int a = (b == 0) ? 1 : 0;
      const int c = (b == 2) ? 1 : 2;
      const auto r = check_monogamy_guarded(rep.worst_state_params[k], b, a, c);
      const double residuals[5] = {r.residual_r1, r.residual_r2, r.residual_r3_product,
                                   r.residual_r3_sum, r.residual_r4};
      CHECK(residuals[k] == doctest::Approx(rep.min_residuals[k]).epsilon(1e-12));
    }
  }

  SUBCASE("highly squeezed network states are recorded as saturating") {
    CircuitParams p;
    p.r = 7.0;
    p.eta0 = 0.35;
    const auto rep = check_monogamy_guarded(circuit_recipe(p), 0, 1, 2);
    CHECK(std::abs(rep.residual_r4) < 1e-6);
    CHECK(rep.residual_r4 >= kResidualTol);
  }

  SUBCASE("report serializes with the expected keys") {
    const auto j = fuzz_report_to_json(fuzz_monogamy(5, 8, 4));
    CHECK(j.contains("min_residuals"));
    CHECK(j.at("min_residuals").contains("r3_product"));
    CHECK(j.contains("worst_state_params"));
    CHECK(j.contains("saturation_count"));
    CHECK(j.at("trials") == 5);
    CHECK(j.at("ok").get<bool>());
  }
}

TEST_CASE("extended-precision rebuild resolves heavy squeezing") {
  // Three aligned full-strength squeezers leave the steering product exactly
  // saturated; the double-built covariance can no longer represent the
  // squeezed direction (error ~ machine eps * cosh^2), while the long double
  // rebuild recovers it to its own representation limit.
  StateRecipe rec;
  rec.num_modes = 3;
  rec.occupations = {0.0, 0.0, 0.3};
  for (int l = 0; l < 3; ++l) rec.layers.push_back(LayerTms{0, 1, 2.0});

  const auto plain = check_monogamy(build_recipe(rec), 0, 1, 2);
  const auto guarded = check_monogamy_guarded(rec, 0, 1, 2);
  const double plain_margin = std::abs(plain.S_BA * plain.S_BC - 1.0);
  const double guarded_margin = std::abs(guarded.S_BA * guarded.S_BC - 1.0);
  CHECK(plain_margin > 5e-8);     // double-built state misses the saturation
  CHECK(guarded_margin < 5e-9);   // rebuilt state pins it to the eps_ld floor
  CHECK(guarded.min_residual() >= kResidualTol);
}

TEST_CASE("guarded evaluation agrees with the plain one away from boundaries") {
  const auto recipe = random_recipe(3, 12345, 3);
  const auto plain = check_monogamy(build_recipe(recipe), 0, 1, 2);
  const auto guarded = check_monogamy_guarded(recipe, 0, 1, 2);
  CHECK(std::abs(plain.residual_r1 - guarded.residual_r1) < 1e-9);
  CHECK(std::abs(plain.S_collective - guarded.S_collective) < 1e-9);
}
