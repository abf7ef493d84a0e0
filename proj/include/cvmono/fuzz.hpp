#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>

#include <json.hpp>

#include "cvmono/quantifiers.hpp"
#include "cvmono/random_states.hpp"

// Random search for monogamy violations: many random physical three-mode
// states, every role assignment of the steered mode, minimum residual per
// inequality. A violation is reported with the recipe that reproduces it.

namespace cvmono {

inline constexpr const char* kResidualNames[5] = {"r1", "r2", "r3_product", "r3_sum", "r4"};

struct FuzzReport {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  int depth = 0;
  std::array<double, 5> min_residuals{};         // keyed by kResidualNames
  std::array<StateRecipe, 5> worst_state_params; // minimizing recipe per inequality
  std::array<int, 5> worst_role{};               // which mode was steered
  std::uint64_t saturation_count = 0;            // trials with |r4| < 1e-6 for some role
  double min_steering_product = 0;               // min of S_B|A * S_B|C - should stay >= 1
  double max_collective_excess = 0;              // max of S_coll - min(S_B|A, S_B|C)
  std::uint64_t steerable_trials = 0;            // trials with S_coll < 1 for some role

  bool ok() const {
    for (double r : min_residuals)
      if (r < kResidualTol) return false;
    return true;
  }
};

namespace detail {

// Quantities whose theoretical floor is zero; when a double evaluation sits
// inside the guard band the role is re-evaluated in extended precision, since
// highly squeezed recipes make the small Schur complements ill-conditioned.
inline double report_margin(const QuantifierReport<double>& rep) {
  const double dominance = std::min(rep.S_BA, rep.S_BC) - rep.S_collective;
  return std::min({rep.min_residual(), rep.S_BA * rep.S_BC - 1.0, dominance});
}

inline constexpr double kPrecisionGuard = 1e-6;

}  // namespace detail

/// check_monogamy with an extended-precision retry when any monitored margin
/// falls inside the guard band. The retry rebuilds the state from its recipe
/// in long double rather than casting the double covariance: at heavy
/// cumulative squeezing the rounded double entries already lose the squeezed
/// direction, and no downstream arithmetic can recover it.
inline QuantifierReport<double> check_monogamy_guarded(const StateRecipe& recipe,
                                                       Eigen::Index B, Eigen::Index A,
                                                       Eigen::Index C,
                                                       bool optimize_angles = true) {
  QuantifierReport<double> rep =
      check_monogamy(build_recipe(recipe), B, A, C, optimize_angles);
  if (detail::report_margin(rep) < detail::kPrecisionGuard) {
    const auto refined =
        check_monogamy(build_recipe<long double>(recipe), B, A, C, optimize_angles);
    rep = refined.template cast<double>();
  }
  return rep;
}

inline FuzzReport fuzz_monogamy(std::uint64_t trials, std::uint64_t seed, int depth) {
  if (trials < 1) throw std::invalid_argument("fuzz_monogamy: trials must be >= 1");
  FuzzReport out;
  out.trials = trials;
  out.seed = seed;
  out.depth = depth;
  out.min_residuals.fill(std::numeric_limits<double>::max());
  out.min_steering_product = std::numeric_limits<double>::max();
  out.max_collective_excess = -std::numeric_limits<double>::max();

  for (std::uint64_t t = 0; t < trials; ++t) {
    const StateRecipe recipe = random_recipe(3, rng::derive(seed, t), depth);
    bool saturated = false, steerable = false;
    for (int b = 0; b < 3; ++b) {
      const int a = (b == 0) ? 1 : 0;
      const int c = (b == 2) ? 1 : 2;
      const auto rep = check_monogamy_guarded(recipe, b, a, c, /*optimize_angles=*/true);
      const double residuals[5] = {rep.residual_r1, rep.residual_r2, rep.residual_r3_product,
                                   rep.residual_r3_sum, rep.residual_r4};
      for (int k = 0; k < 5; ++k) {
        if (residuals[k] < out.min_residuals[k]) {
          out.min_residuals[k] = residuals[k];
          out.worst_state_params[k] = recipe;
          out.worst_role[k] = b;
        }
      }
      out.min_steering_product = std::min(out.min_steering_product, rep.S_BA * rep.S_BC);
      out.max_collective_excess =
          std::max(out.max_collective_excess,
                   rep.S_collective - std::min(rep.S_BA, rep.S_BC));
      saturated = saturated || std::abs(rep.residual_r4) < 1e-6;
      steerable = steerable || rep.S_collective < 1.0;
    }
    out.saturation_count += saturated;
    out.steerable_trials += steerable;
  }
  return out;
}

inline nlohmann::json fuzz_report_to_json(const FuzzReport& r) {
  nlohmann::json mins, worst;
  for (int k = 0; k < 5; ++k) {
    mins[kResidualNames[k]] = r.min_residuals[k];
    worst[kResidualNames[k]] = {{"steered_mode", r.worst_role[k]},
                                {"recipe", recipe_to_json(r.worst_state_params[k])}};
  }
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"depth", r.depth},
          {"min_residuals", mins},
          {"worst_state_params", worst},
          {"saturation_count", r.saturation_count},
          {"min_steering_product", r.min_steering_product},
          {"max_collective_excess", r.max_collective_excess},
          {"steerable_trials", r.steerable_trials},
          {"ok", r.ok()}};
}

}  // namespace cvmono
