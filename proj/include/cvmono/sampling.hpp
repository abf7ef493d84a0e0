#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvmono/gaussian_state.hpp"
#include "cvmono/rng.hpp"

// Brute-force validation of the conditional-variance definitions by sampling
// phase-space points: a Gaussian state's quadrature statistics are jointly
// normal with the state's mean and covariance, so i.i.d. draws reproduce
// every inference variance without touching the Schur-complement algebra.

namespace cvmono {

struct SampleBatch {
  Eigen::Index num_modes = 0;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd data;  // count x (2 num_modes), one phase-space point per row
};

/// Deterministic multivariate-normal draws with the state's moments.
/// Row i, column j depends only on (seed, i, j), so any partition of the
/// work reproduces the same batch.
inline SampleBatch sample_wigner(const GaussianState<double>& s, std::uint64_t count,
                                 std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_wigner: count must be >= 1");
  const auto phys = is_physical(s);
  if (!phys.physical)
    throw std::domain_error("sample_wigner: state is not physical (min eig " +
                            std::to_string(phys.min_eigenvalue) + ")");
  const Eigen::Index d = 2 * s.num_modes;

  // Pivoted Cholesky; semidefinite directions are clamped to zero.
  Eigen::LDLT<Eigen::MatrixXd> ldlt(s.cov);
  Eigen::VectorXd dvec = ldlt.vectorD();
  for (Eigen::Index k = 0; k < d; ++k) dvec(k) = dvec(k) > 0 ? std::sqrt(dvec(k)) : 0.0;
  Eigen::MatrixXd L = ldlt.matrixL();
  Eigen::MatrixXd B = ldlt.transpositionsP().transpose() * (L * dvec.asDiagonal());

  SampleBatch batch;
  batch.num_modes = s.num_modes;
  batch.count = count;
  batch.seed = seed;
  batch.data.resize(static_cast<Eigen::Index>(count), d);
  Eigen::VectorXd z(d);
  for (std::uint64_t i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < d; ++j)
      z(j) = rng::normal(seed, i * static_cast<std::uint64_t>(d) + j);
    batch.data.row(static_cast<Eigen::Index>(i)) = (s.mean + B * z).transpose();
  }
  return batch;
}

/// Per-sample values of one quadrature.
inline Eigen::VectorXd quadrature_samples(const SampleBatch& b, const Quadrature<double>& q) {
  if (q.mode < 0 || q.mode >= b.num_modes)
    throw std::invalid_argument("quadrature_samples: mode out of range");
  return std::cos(q.angle) * b.data.col(2 * q.mode) +
         std::sin(q.angle) * b.data.col(2 * q.mode + 1);
}

namespace detail {

inline void check_estimator_args(const SampleBatch& b, const Quadrature<double>& target,
                                 const std::vector<Quadrature<double>>& conds) {
  if (target.mode < 0 || target.mode >= b.num_modes)
    throw std::invalid_argument("estimator: target mode out of range");
  for (std::size_t a = 0; a < conds.size(); ++a) {
    if (conds[a].mode < 0 || conds[a].mode >= b.num_modes)
      throw std::invalid_argument("estimator: conditioner mode out of range");
    if (conds[a].mode == target.mode)
      throw std::invalid_argument("estimator: target mode among conditioners");
    for (std::size_t c = a + 1; c < conds.size(); ++c)
      if (conds[a].mode == conds[c].mode)
        throw std::invalid_argument("estimator: two quadratures on one conditioning mode");
  }
}

// Equal-population bin index per sample for one conditioner column.
inline std::vector<std::uint32_t> quantile_bins(const Eigen::VectorXd& v, int bins) {
  const Eigen::Index n = v.size();
  std::vector<std::uint32_t> idx(n), out(n);
  for (Eigen::Index i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
    return v(a) != v(b) ? v(a) < v(b) : a < b;
  });
  for (Eigen::Index rank = 0; rank < n; ++rank) {
    auto b = static_cast<std::uint32_t>((static_cast<std::uint64_t>(rank) * bins) / n);
    out[idx[rank]] = std::min<std::uint32_t>(b, bins - 1);
  }
  return out;
}

}  // namespace detail

inline int default_bins_per_dim(std::size_t num_conditioners) {
  int b = 50;
  for (std::size_t k = 1; k < num_conditioners; ++k) b = std::max(2, b / 2);
  return b;
}

/// Literal discretization of the average conditional variance: conditioner
/// values are split into equal-population bins (product binning across
/// conditioners) and the within-bin variance of the target is averaged with
/// the bin populations as weights. Binning bias is non-negative, so the
/// estimate converges to the Schur complement from above as bins grow.
/// bins_per_dim = 0 selects the default (50, halved per extra dimension).
inline double empirical_conditional_variance(const SampleBatch& b,
                                             const Quadrature<double>& target,
                                             const std::vector<Quadrature<double>>& conds,
                                             int bins_per_dim = 0) {
  detail::check_estimator_args(b, target, conds);
  const Eigen::VectorXd y = quadrature_samples(b, target);
  const auto n = static_cast<std::uint64_t>(y.size());
  if (conds.empty()) {
    const double mu = y.mean();
    return (y.array() - mu).square().sum() / static_cast<double>(n - 1);
  }
  const int bins = bins_per_dim > 0 ? bins_per_dim : default_bins_per_dim(conds.size());
  std::vector<std::uint64_t> flat(n, 0);
  for (const auto& c : conds) {
    const auto ids = detail::quantile_bins(quadrature_samples(b, c), bins);
    for (std::uint64_t i = 0; i < n; ++i) flat[i] = flat[i] * bins + ids[i];
  }
  std::uint64_t total_bins = 1;
  for (std::size_t k = 0; k < conds.size(); ++k) total_bins *= bins;
  std::vector<std::uint64_t> cnt(total_bins, 0);
  std::vector<double> sum(total_bins, 0.0), sumsq(total_bins, 0.0);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto f = flat[i];
    cnt[f]++;
    sum[f] += y(static_cast<Eigen::Index>(i));
    sumsq[f] += y(static_cast<Eigen::Index>(i)) * y(static_cast<Eigen::Index>(i));
  }
  std::uint64_t occupied = 0;
  for (auto c : cnt) occupied += (c > 0);
  if (occupied == 0 || n / occupied < 100)
    throw std::invalid_argument("empirical_conditional_variance: insufficient samples "
                                "(need >= 100 per occupied bin on average)");
  double acc = 0.0;
  for (std::uint64_t f = 0; f < total_bins; ++f) {
    if (cnt[f] < 2) continue;  // a lone sample carries no spread information
    const double nb = static_cast<double>(cnt[f]);
    const double var = (sumsq[f] - sum[f] * sum[f] / nb) / (nb - 1.0);
    acc += (nb / static_cast<double>(n)) * std::max(var, 0.0);
  }
  return acc;
}

/// Ordinary-least-squares residual variance of the target on the measured
/// conditioners (plus intercept). Unbiased for Gaussian data; equals the
/// Schur complement in expectation, so it is the tight cross-check.
inline double regression_conditional_variance(const SampleBatch& b,
                                              const Quadrature<double>& target,
                                              const std::vector<Quadrature<double>>& conds) {
  detail::check_estimator_args(b, target, conds);
  const Eigen::VectorXd y = quadrature_samples(b, target);
  const Eigen::Index n = y.size();
  const Eigen::Index k = static_cast<Eigen::Index>(conds.size());
  if (k == 0) {
    const double mu = y.mean();
    return (y.array() - mu).square().sum() / static_cast<double>(n - 1);
  }
  Eigen::MatrixXd V(n, k);
  for (Eigen::Index c = 0; c < k; ++c) V.col(c) = quadrature_samples(b, conds[c]);
  const Eigen::RowVectorXd vmu = V.colwise().mean();
  V.rowwise() -= vmu;
  Eigen::VectorXd yc = y.array() - y.mean();
  const Eigen::MatrixXd G = V.transpose() * V;
  const Eigen::VectorXd h = V.transpose() * yc;
  const Eigen::VectorXd beta = G.ldlt().solve(h);
  const double rss = (yc - V * beta).squaredNorm();
  return rss / static_cast<double>(n - k - 1);
}

// ---------------------------------------------------------------------------
// Batch dump: "CVMC1" + u32 num_modes + u64 count, then count rows of
// 2*num_modes little-endian float64.

inline void write_batch(const std::filesystem::path& path, const SampleBatch& b) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_batch: cannot open " + path.string());
  out.write("CVMC1", 5);
  const auto modes = static_cast<std::uint32_t>(b.num_modes);
  out.write(reinterpret_cast<const char*>(&modes), sizeof(modes));
  out.write(reinterpret_cast<const char*>(&b.count), sizeof(b.count));
  const Eigen::Index d = 2 * b.num_modes;
  std::vector<double> row(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < b.data.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = b.data(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(double) * row.size()));
  }
  if (!out) throw std::runtime_error("write_batch: short write to " + path.string());
}

inline SampleBatch read_batch(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_batch: cannot open " + path.string());
  char magic[5];
  in.read(magic, 5);
  if (!in || std::memcmp(magic, "CVMC1", 5) != 0)
    throw std::runtime_error("read_batch: bad header");
  std::uint32_t modes = 0;
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&modes), sizeof(modes));
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  SampleBatch b;
  b.num_modes = modes;
  b.count = count;
  const Eigen::Index d = 2 * b.num_modes;
  b.data.resize(static_cast<Eigen::Index>(count), d);
  std::vector<double> row(static_cast<std::size_t>(d));
  for (std::uint64_t i = 0; i < count; ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(double) * row.size()));
    for (Eigen::Index j = 0; j < d; ++j)
      b.data(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
  }
  if (!in) throw std::runtime_error("read_batch: truncated file");
  return b;
}

}  // namespace cvmono
