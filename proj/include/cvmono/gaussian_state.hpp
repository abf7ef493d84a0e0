#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

// Multimode Gaussian states as mean vectors + covariance matrices over the
// quadratures (X1, P1, X2, P2, ...), scaled so the vacuum has
// Var(X) = Var(P) = 1 and the uncertainty relation reads dX dP >= 1.
// States are immutable values; every transform returns a fresh state.

namespace cvmono {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Eigenvalues of cov + iJ below this certify an unphysical state; the slack
/// absorbs floating-point drift over long transform chains.
inline constexpr double kPhysicalityTol = -1e-9;

/// Relative singular-value cutoff for pseudo-inverses of conditioning blocks.
inline constexpr double kPinvCutoff = 1e-12;

template <typename Scalar = double>
struct GaussianState {
  Eigen::Index num_modes = 0;
  VectorX<Scalar> mean;
  MatrixX<Scalar> cov;

  GaussianState() = default;

  GaussianState(Eigen::Index modes, VectorX<Scalar> mean_in, MatrixX<Scalar> cov_in)
      : num_modes(modes), mean(std::move(mean_in)), cov(std::move(cov_in)) {
    if (num_modes < 1) throw std::invalid_argument("GaussianState: need at least one mode");
    const Eigen::Index d = 2 * num_modes;
    if (mean.size() != d || cov.rows() != d || cov.cols() != d)
      throw std::invalid_argument("GaussianState: dimension mismatch");
    cov = ((cov + cov.transpose()) / Scalar(2)).eval();  // enforce symmetry
  }

  template <typename Other>
  GaussianState<Other> cast() const {
    GaussianState<Other> out;
    out.num_modes = num_modes;
    out.mean = mean.template cast<Other>();
    out.cov = cov.template cast<Other>();
    return out;
  }
};

/// One quadrature: cos(angle) X + sin(angle) P of a mode. angle = 0 is X,
/// angle = pi/2 is P.
template <typename Scalar = double>
struct Quadrature {
  Eigen::Index mode = 0;
  Scalar angle = 0;
};

namespace detail {

template <typename Scalar>
void check_mode(const GaussianState<Scalar>& s, Eigen::Index m, const char* what) {
  if (m < 0 || m >= s.num_modes) throw std::invalid_argument(std::string(what) + ": mode index out of range");
}

// Applies a 2x2 block transform to one mode: rows/cols (2m, 2m+1).
template <typename Scalar>
GaussianState<Scalar> apply_one_mode(const GaussianState<Scalar>& s, Eigen::Index m,
                                     const Eigen::Matrix<Scalar, 2, 2>& M) {
  GaussianState<Scalar> out = s;
  const Eigen::Index a = 2 * m;
  out.mean.template segment<2>(a) = M * s.mean.template segment<2>(a);
  out.cov.middleRows(a, 2) = (M * s.cov.middleRows(a, 2)).eval();
  out.cov.middleCols(a, 2) = (out.cov.middleCols(a, 2) * M.transpose()).eval();
  return out;
}

// Applies a 4x4 block transform to the (Xi,Pi,Xj,Pj) subspace.
template <typename Scalar>
GaussianState<Scalar> apply_two_mode(const GaussianState<Scalar>& s, Eigen::Index i,
                                     Eigen::Index j, const Eigen::Matrix<Scalar, 4, 4>& M) {
  GaussianState<Scalar> out = s;
  const std::vector<Eigen::Index> idx = {2 * i, 2 * i + 1, 2 * j, 2 * j + 1};
  Eigen::Matrix<Scalar, 4, Eigen::Dynamic> rows(4, s.cov.cols());
  for (int k = 0; k < 4; ++k) rows.row(k) = s.cov.row(idx[k]);
  rows = (M * rows).eval();
  for (int k = 0; k < 4; ++k) out.cov.row(idx[k]) = rows.row(k);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 4> cols(s.cov.rows(), 4);
  for (int k = 0; k < 4; ++k) cols.col(k) = out.cov.col(idx[k]);
  cols = (cols * M.transpose()).eval();
  for (int k = 0; k < 4; ++k) out.cov.col(idx[k]) = cols.col(k);
  Eigen::Matrix<Scalar, 4, 1> mu;
  for (int k = 0; k < 4; ++k) mu(k) = s.mean(idx[k]);
  mu = (M * mu).eval();
  for (int k = 0; k < 4; ++k) out.mean(idx[k]) = mu(k);
  out.cov = ((out.cov + out.cov.transpose()) / Scalar(2)).eval();
  return out;
}

}  // namespace detail

/// |0...0>: zero mean, identity covariance.
template <typename Scalar = double>
GaussianState<Scalar> vacuum_state(Eigen::Index num_modes) {
  if (num_modes < 1) throw std::invalid_argument("vacuum_state: num_modes must be >= 1");
  const Eigen::Index d = 2 * num_modes;
  return GaussianState<Scalar>(num_modes, VectorX<Scalar>::Zero(d),
                               MatrixX<Scalar>::Identity(d, d));
}

/// Product of thermal modes with the given mean occupations; each mode has
/// Var(X) = Var(P) = 2n + 1.
template <typename Scalar = double>
GaussianState<Scalar> thermal_product(const std::vector<Scalar>& occupations) {
  if (occupations.empty()) throw std::invalid_argument("thermal_product: no modes");
  const Eigen::Index n = static_cast<Eigen::Index>(occupations.size());
  MatrixX<Scalar> cov = MatrixX<Scalar>::Identity(2 * n, 2 * n);
  for (Eigen::Index m = 0; m < n; ++m) {
    if (occupations[m] < Scalar(0))
      throw std::invalid_argument("thermal_product: negative occupation");
    cov(2 * m, 2 * m) = cov(2 * m + 1, 2 * m + 1) = 2 * occupations[m] + 1;
  }
  return GaussianState<Scalar>(n, VectorX<Scalar>::Zero(2 * n), std::move(cov));
}

/// Extends the register with vacuum modes (block-diagonal).
template <typename Scalar>
GaussianState<Scalar> append_vacuum(const GaussianState<Scalar>& s, Eigen::Index extra) {
  if (extra < 1) throw std::invalid_argument("append_vacuum: extra must be >= 1");
  const Eigen::Index n = s.num_modes + extra, d = 2 * n, d0 = 2 * s.num_modes;
  VectorX<Scalar> mean = VectorX<Scalar>::Zero(d);
  mean.head(d0) = s.mean;
  MatrixX<Scalar> cov = MatrixX<Scalar>::Identity(d, d);
  cov.topLeftCorner(d0, d0) = s.cov;
  return GaussianState<Scalar>(n, std::move(mean), std::move(cov));
}

/// Two-mode squeezing interaction between modes i and j with parameter r:
/// X correlations grow as +sinh, P correlations as -sinh.
template <typename Scalar>
GaussianState<Scalar> apply_two_mode_squeeze(const GaussianState<Scalar>& s, Eigen::Index i,
                                             Eigen::Index j, Scalar r) {
  detail::check_mode(s, i, "apply_two_mode_squeeze");
  detail::check_mode(s, j, "apply_two_mode_squeeze");
  if (i == j) throw std::invalid_argument("apply_two_mode_squeeze: modes must differ");
  if (!std::isfinite(static_cast<double>(r)))
    throw std::invalid_argument("apply_two_mode_squeeze: r must be finite");
  const Scalar ch = std::cosh(r), sh = std::sinh(r);
  Eigen::Matrix<Scalar, 4, 4> M;
  M << ch, 0, sh, 0,
       0, ch, 0, -sh,
       sh, 0, ch, 0,
       0, -sh, 0, ch;
  return detail::apply_two_mode(s, i, j, M);
}

/// Two-mode squeezed state: Var X = Var P = cosh 2r on each mode,
/// <X1 X2> = sinh 2r, <P1 P2> = -sinh 2r.
template <typename Scalar = double>
GaussianState<Scalar> two_mode_squeezed(Scalar r) {
  return apply_two_mode_squeeze(vacuum_state<Scalar>(2), 0, 1, r);
}

/// Two-mode squeezing applied to thermal seeds with occupations nB, nF:
/// n = (nF+nB+1) cosh 2r + (nB-nF), m with the opposite sign of (nB-nF),
/// c = (nF+nB+1) sinh 2r.
template <typename Scalar = double>
GaussianState<Scalar> thermal_seeded_tms(Scalar r, Scalar n_b, Scalar n_f) {
  if (n_b < Scalar(0) || n_f < Scalar(0))
    throw std::invalid_argument("thermal_seeded_tms: negative thermal occupation");
  return apply_two_mode_squeeze(thermal_product<Scalar>({n_b, n_f}), 0, 1, r);
}

/// Lossless beam splitter mixing modes i and j with amplitude coefficients
/// sqrt(eta), sqrt(1-eta). Output i carries sqrt(eta) of input i; eta = 1 is
/// the identity.
template <typename Scalar>
GaussianState<Scalar> apply_beamsplitter(const GaussianState<Scalar>& s, Eigen::Index i,
                                         Eigen::Index j, Scalar eta) {
  detail::check_mode(s, i, "apply_beamsplitter");
  detail::check_mode(s, j, "apply_beamsplitter");
  if (i == j) throw std::invalid_argument("apply_beamsplitter: modes must differ");
  if (!(eta >= Scalar(0) && eta <= Scalar(1)))
    throw std::invalid_argument("apply_beamsplitter: eta must lie in [0,1]");
  const Scalar t = std::sqrt(eta), u = std::sqrt(1 - eta);
  Eigen::Matrix<Scalar, 4, 4> M;
  M << t, 0, u, 0,
       0, t, 0, u,
       -u, 0, t, 0,
       0, -u, 0, t;
  return detail::apply_two_mode(s, i, j, M);
}

/// Phase-space rotation of one mode by theta: the new X is the theta
/// quadrature (theta = pi/2 sends X -> P, P -> -X).
template <typename Scalar>
GaussianState<Scalar> apply_phase_rotation(const GaussianState<Scalar>& s, Eigen::Index mode,
                                           Scalar theta) {
  detail::check_mode(s, mode, "apply_phase_rotation");
  const Scalar c = std::cos(theta), sn = std::sin(theta);
  Eigen::Matrix<Scalar, 2, 2> M;
  M << c, sn, -sn, c;
  return detail::apply_one_mode(s, mode, M);
}

/// Restriction to the given modes, in the given order.
template <typename Scalar>
GaussianState<Scalar> partial_trace(const GaussianState<Scalar>& s,
                                    const std::vector<Eigen::Index>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep list is empty");
  for (std::size_t a = 0; a < keep.size(); ++a) {
    detail::check_mode(s, keep[a], "partial_trace");
    for (std::size_t b = a + 1; b < keep.size(); ++b)
      if (keep[a] == keep[b]) throw std::invalid_argument("partial_trace: duplicate mode");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(keep.size());
  std::vector<Eigen::Index> idx;
  idx.reserve(2 * n);
  for (Eigen::Index m : keep) {
    idx.push_back(2 * m);
    idx.push_back(2 * m + 1);
  }
  VectorX<Scalar> mean(2 * n);
  MatrixX<Scalar> cov(2 * n, 2 * n);
  for (Eigen::Index a = 0; a < 2 * n; ++a) {
    mean(a) = s.mean(idx[a]);
    for (Eigen::Index b = 0; b < 2 * n; ++b) cov(a, b) = s.cov(idx[a], idx[b]);
  }
  return GaussianState<Scalar>(n, std::move(mean), std::move(cov));
}

/// Attenuation channel on one mode: vacuum ancilla, beam splitter with
/// transmission eta, trace out the ancilla. Mode count is unchanged.
template <typename Scalar>
GaussianState<Scalar> apply_loss(const GaussianState<Scalar>& s, Eigen::Index mode, Scalar eta) {
  detail::check_mode(s, mode, "apply_loss");
  if (!(eta >= Scalar(0) && eta <= Scalar(1)))
    throw std::invalid_argument("apply_loss: eta must lie in [0,1]");
  GaussianState<Scalar> ext = append_vacuum(s, 1);
  ext = apply_beamsplitter(ext, mode, ext.num_modes - 1, eta);
  std::vector<Eigen::Index> keep(s.num_modes);
  for (Eigen::Index m = 0; m < s.num_modes; ++m) keep[m] = m;
  return partial_trace(ext, keep);
}

/// The (n, m, c_x, c_p) covariance summary of an ordered mode pair:
/// n = Var X_i, m = Var X_j, c_x = Cov(X_i, X_j), c_p = Cov(P_i, P_j).
template <typename Scalar = double>
struct TwoModeReduced {
  Scalar n = 1, m = 1, c_x = 0, c_p = 0;
};

template <typename Scalar>
TwoModeReduced<Scalar> reduced_two_mode(const GaussianState<Scalar>& s, Eigen::Index i,
                                        Eigen::Index j) {
  detail::check_mode(s, i, "reduced_two_mode");
  detail::check_mode(s, j, "reduced_two_mode");
  if (i == j) throw std::invalid_argument("reduced_two_mode: modes must differ");
  return {s.cov(2 * i, 2 * i), s.cov(2 * j, 2 * j), s.cov(2 * i, 2 * j),
          s.cov(2 * i + 1, 2 * j + 1)};
}

namespace detail {

// Pseudo-inverse quadratic form a^T pinv(M) a for symmetric PSD M, dropping
// eigenvalues below kPinvCutoff relative to the largest.
template <typename Scalar>
Scalar pinv_quadratic_form(const MatrixX<Scalar>& M, const VectorX<Scalar>& a) {
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(M);
  const auto& lam = es.eigenvalues();
  const Scalar lmax = lam.cwiseAbs().maxCoeff();
  const Scalar cut = Scalar(kPinvCutoff) * lmax;
  Scalar out = 0;
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (lam(k) > cut) {
      const Scalar proj = es.eigenvectors().col(k).dot(a);
      out += proj * proj / lam(k);
    }
  }
  return out;
}

}  // namespace detail

/// Variance of the target quadrature conditioned on jointly measuring the
/// given quadratures (at most one per conditioning mode): the Gaussian
/// Schur complement Var(t) - S_tv pinv(S_vv) S_vt. Empty conditioners give
/// the plain variance.
template <typename Scalar>
Scalar conditional_variance(const GaussianState<Scalar>& s, const Quadrature<Scalar>& target,
                            const std::vector<Quadrature<Scalar>>& conditioners) {
  detail::check_mode(s, target.mode, "conditional_variance");
  for (std::size_t a = 0; a < conditioners.size(); ++a) {
    detail::check_mode(s, conditioners[a].mode, "conditional_variance");
    if (conditioners[a].mode == target.mode)
      throw std::invalid_argument("conditional_variance: target mode among conditioners");
    for (std::size_t b = a + 1; b < conditioners.size(); ++b)
      if (conditioners[a].mode == conditioners[b].mode)
        throw std::invalid_argument(
            "conditional_variance: two quadratures on one conditioning mode");
  }
  auto dir = [](const Quadrature<Scalar>& q) {
    return Eigen::Matrix<Scalar, 2, 1>(std::cos(q.angle), std::sin(q.angle));
  };
  auto block = [&s](Eigen::Index mi, Eigen::Index mj) {
    return s.cov.template block<2, 2>(2 * mi, 2 * mj);
  };
  const auto ut = dir(target);
  const Scalar var_t = ut.dot(block(target.mode, target.mode) * ut);
  const Eigen::Index k = static_cast<Eigen::Index>(conditioners.size());
  if (k == 0) return var_t;
  VectorX<Scalar> a(k);
  MatrixX<Scalar> M(k, k);
  for (Eigen::Index p = 0; p < k; ++p) {
    const auto vp = dir(conditioners[p]);
    a(p) = ut.dot(block(target.mode, conditioners[p].mode) * vp);
    for (Eigen::Index q = 0; q < k; ++q) {
      const auto vq = dir(conditioners[q]);
      M(p, q) = vp.dot(block(conditioners[p].mode, conditioners[q].mode) * vq);
    }
  }
  M = ((M + M.transpose()) / Scalar(2)).eval();
  const Scalar explained = detail::pinv_quadratic_form(M, a);
  Scalar cv = var_t - explained;
  if (cv < Scalar(0)) cv = Scalar(0);
  if (cv > var_t) cv = var_t;
  return cv;
}

/// The symplectic form J: block-diagonal [[0,1],[-1,0]] per mode.
template <typename Scalar = double>
MatrixX<Scalar> symplectic_form(Eigen::Index num_modes) {
  MatrixX<Scalar> J = MatrixX<Scalar>::Zero(2 * num_modes, 2 * num_modes);
  for (Eigen::Index m = 0; m < num_modes; ++m) {
    J(2 * m, 2 * m + 1) = Scalar(1);
    J(2 * m + 1, 2 * m) = Scalar(-1);
  }
  return J;
}

template <typename Scalar = double>
struct Physicality {
  bool physical = false;
  Scalar min_eigenvalue = 0;  // of cov + iJ
};

/// Uncertainty-principle check: cov + iJ must be positive semidefinite
/// (within kPhysicalityTol). Reports the worst eigenvalue.
template <typename Scalar>
Physicality<Scalar> is_physical(const GaussianState<Scalar>& s) {
  using C = std::complex<Scalar>;
  MatrixX<C> M = s.cov.template cast<C>();
  const MatrixX<Scalar> J = symplectic_form<Scalar>(s.num_modes);
  M += C(0, 1) * J.template cast<C>();
  Eigen::SelfAdjointEigenSolver<MatrixX<C>> es(M, Eigen::EigenvaluesOnly);
  const Scalar mn = es.eigenvalues().minCoeff();
  return {mn >= Scalar(kPhysicalityTol), mn};
}

}  // namespace cvmono
