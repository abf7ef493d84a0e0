#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "cvmono/network.hpp"
#include "cvmono/sampling.hpp"

using namespace cvmono;

namespace {

double sample_cov(const SampleBatch& b, const Quadrature<double>& p,
                  const Quadrature<double>& q) {
  const auto x = quadrature_samples(b, p);
  const auto y = quadrature_samples(b, q);
  return ((x.array() - x.mean()) * (y.array() - y.mean())).sum() /
         static_cast<double>(b.data.rows() - 1);
}

}  // namespace

TEST_CASE("wigner sampling moments") {
  SUBCASE("vacuum variance at one part in a thousand") {
    const auto b = sample_wigner(vacuum_state(1), 1000000, 7);
    CHECK(std::abs(empirical_conditional_variance(b, {0, 0.0}, {}) - 1.0) < 0.005);
    CHECK(std::abs(b.data.col(0).mean()) < 0.005);
  }

  SUBCASE("squeezed-pair cross covariance within one percent") {
    const auto b = sample_wigner(two_mode_squeezed(1.0), 1000000, 11);
    const double c = sample_cov(b, {0, 0.0}, {1, 0.0});
    CHECK(std::abs(c / std::sinh(2.0) - 1.0) < 0.01);
    // 5-sigma band for a covariance entry estimated from 1e6 draws
    const double se = std::sqrt((std::cosh(2.0) * std::cosh(2.0) +
                                 std::sinh(2.0) * std::sinh(2.0)) /
                                1e6);
    CHECK(std::abs(c - std::sinh(2.0)) < 5 * se);
  }

  SUBCASE("same seed reproduces the batch bit for bit") {
    const auto s = two_mode_squeezed(0.6);
    const auto a = sample_wigner(s, 2000, 99);
    const auto b = sample_wigner(s, 2000, 99);
    CHECK((a.data - b.data).cwiseAbs().maxCoeff() == 0.0);
    const auto c = sample_wigner(s, 2000, 100);
    CHECK((a.data - c.data).cwiseAbs().maxCoeff() > 0.0);
  }

  SUBCASE("unphysical states are rejected") {
    GaussianState<double> bad(1, Eigen::Vector2d::Zero(),
                              (0.25 * Eigen::Matrix2d::Identity()).eval());
    CHECK_THROWS_AS(sample_wigner(bad, 10, 1), std::domain_error);
    CHECK_THROWS_AS(sample_wigner(vacuum_state(1), 0, 1), std::invalid_argument);
  }

  SUBCASE("near-singular covariances sample cleanly") {
    // strong squeezing drives one EPR direction to ~e^{-2r}; the pivoted
    // factorization must not inject noise into it
    const auto s = two_mode_squeezed(2.5);
    const auto b = sample_wigner(s, 200000, 5);
    const auto xm = quadrature_samples(b, {0, 0.0}) - quadrature_samples(b, {1, 0.0});
    const double var = (xm.array() - xm.mean()).square().sum() / (xm.size() - 1);
    CHECK(var == doctest::Approx(2 * std::exp(-5.0)).epsilon(0.05));
  }
}

TEST_CASE("binned conditional-variance estimator") {
  const double truth = 1.0 / std::cosh(2.0);
  const auto b = sample_wigner(two_mode_squeezed(1.0), 1000000, 11);

  SUBCASE("independent modes reproduce the plain variance") {
    const auto v = sample_wigner(thermal_product<double>({0.8, 0.3}), 400000, 3);
    const double plain = empirical_conditional_variance(v, {0, 0.0}, {});
    const double binned = empirical_conditional_variance(v, {0, 0.0}, {{1, 0.0}});
    CHECK(std::abs(binned / plain - 1.0) < 0.02);
  }

  SUBCASE("bias is positive and shrinks with finer bins") {
    // measured on this generator: +7.0% at 50 bins, +1.2% at 200
    const double est50 = empirical_conditional_variance(b, {0, 0.0}, {{1, 0.0}}, 50);
    const double est200 = empirical_conditional_variance(b, {0, 0.0}, {{1, 0.0}}, 200);
    const double se = truth * std::sqrt(2.0 / 1e6);
    CHECK(est50 > truth - 3 * se);
    CHECK(est50 < truth * 1.09);
    CHECK(est200 > truth - 3 * se);
    CHECK(est200 < truth * 1.03);
    CHECK(est200 < est50);
  }

  SUBCASE("two conditioners with product binning") {
    CircuitParams p;
    p.r = 1.0;
    p.eta0 = 0.5;
    const auto b3 = sample_wigner(build_circuit(p), 1000000, 13);
    const double se = truth * std::sqrt(2.0 / 1e6);
    // measured: +14.4% at 20x20, +1.9% at 100x100
    const double est20 =
        empirical_conditional_variance(b3, {0, 0.0}, {{1, 0.0}, {2, 0.0}}, 20);
    CHECK(est20 > truth - 3 * se);
    CHECK(est20 < truth * 1.17);
    const double est100 =
        empirical_conditional_variance(b3, {0, 0.0}, {{1, 0.0}, {2, 0.0}}, 100);
    CHECK(est100 > truth - 3 * se);
    CHECK(est100 < truth * 1.03);
  }

  SUBCASE("default bin counts halve per extra dimension") {
    CHECK(default_bins_per_dim(1) == 50);
    CHECK(default_bins_per_dim(2) == 25);
    CHECK(default_bins_per_dim(3) == 12);
  }

  SUBCASE("insufficient samples per bin") {
    const auto tiny = sample_wigner(two_mode_squeezed(1.0), 1000, 1);
    CHECK_THROWS_AS(empirical_conditional_variance(tiny, {0, 0.0}, {{1, 0.0}}, 50),
                    std::invalid_argument);
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(empirical_conditional_variance(b, {0, 0.0}, {{0, 1.0}}),
                    std::invalid_argument);
  }
}

TEST_CASE("regression estimator is the tight cross-check") {
  const double truth = 1.0 / std::cosh(2.0);
  const auto b = sample_wigner(two_mode_squeezed(1.0), 1000000, 11);
  const double reg = regression_conditional_variance(b, {0, 0.0}, {{1, 0.0}});
  CHECK(std::abs(reg / truth - 1.0) < 0.01);

  CircuitParams p;
  p.r = 1.0;
  p.eta0 = 0.5;
  const auto state = build_circuit(p);
  const auto b3 = sample_wigner(state, 1000000, 13);
  const double reg2 = regression_conditional_variance(b3, {0, 0.0}, {{1, 0.0}, {2, 0.0}});
  CHECK(std::abs(reg2 / truth - 1.0) < 0.01);

  SUBCASE("monotone under added conditioners at three sigma") {
    const double one = regression_conditional_variance(b3, {0, 0.0}, {{1, 0.0}});
    const double se = one * std::sqrt(2.0 / 1e6);
    CHECK(reg2 <= one + 3 * se * std::sqrt(2.0));
  }

  SUBCASE("no linear combination beats the inference variance") {
    const auto xb = quadrature_samples(b3, {0, 0.0});
    const auto xa = quadrature_samples(b3, {1, 0.0});
    const double se = reg2 * std::sqrt(2.0 / 1e6);
    const double cv_ba =
        regression_conditional_variance(b3, {0, 0.0}, {{1, 0.0}});
    for (double g : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
      const Eigen::VectorXd diff = xb - g * xa;
      const double var = (diff.array() - diff.mean()).square().sum() / (diff.size() - 1);
      CHECK(var >= cv_ba - 3 * se);
    }
  }
}

TEST_CASE("batch dump round trip") {
  const auto s = two_mode_squeezed(0.8);
  const auto b = sample_wigner(s, 500, 21);
  const auto path = std::filesystem::temp_directory_path() / "cvmono_batch_test.bin";
  write_batch(path, b);

  // header: magic, u32 modes, u64 count, then little-endian float64 rows
  std::ifstream in(path, std::ios::binary);
  char magic[5];
  in.read(magic, 5);
  CHECK(std::string(magic, 5) == "CVMC1");
  CHECK(std::filesystem::file_size(path) == 5 + 4 + 8 + 500 * 4 * 8);

  const auto back = read_batch(path);
  CHECK(back.num_modes == 2);
  CHECK(back.count == 500);
  CHECK((back.data - b.data).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
}
