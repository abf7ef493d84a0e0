#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cvmono/gaussian_state.hpp"
#include "cvmono/golden.hpp"

// Bipartite entanglement and EPR-steering quantifiers over Gaussian states,
// plus the monogamy residual report that ties them together.

namespace cvmono {

inline constexpr double kResidualTol = -1e-9;  // residual >= this means the inequality holds
inline constexpr double kGainCutoff = 1e-12;   // below this |c| the symmetry gain is undefined

/// Symmetric EPR-variance criterion:
/// [Var(X_i - X_j) + Var(P_i + P_j)] / 4. Entanglement is certified by < 1.
template <typename Scalar>
Scalar duan_D(const GaussianState<Scalar>& s, Eigen::Index i, Eigen::Index j) {
  detail::check_mode(s, i, "duan_D");
  detail::check_mode(s, j, "duan_D");
  if (i == j) throw std::invalid_argument("duan_D: modes must differ");
  const auto& C = s.cov;
  const Scalar vx = C(2 * i, 2 * i) + C(2 * j, 2 * j) - 2 * C(2 * i, 2 * j);
  const Scalar vp = C(2 * i + 1, 2 * i + 1) + C(2 * j + 1, 2 * j + 1) + 2 * C(2 * i + 1, 2 * j + 1);
  return (vx + vp) / Scalar(4);
}

/// Gain-weighted EPR variance product
/// Delta(X_i - g_x X_j) Delta(P_i + g_p P_j) / (1 + g_x g_p); a valid
/// entanglement witness (< 1) for any real gains with positive denominator.
template <typename Scalar>
Scalar ent_g(const GaussianState<Scalar>& s, Eigen::Index i, Eigen::Index j, Scalar g_x,
             Scalar g_p) {
  detail::check_mode(s, i, "ent_g");
  detail::check_mode(s, j, "ent_g");
  if (i == j) throw std::invalid_argument("ent_g: modes must differ");
  const Scalar den = 1 + g_x * g_p;
  if (!(den > Scalar(0))) throw std::invalid_argument("ent_g: 1 + g_x*g_p must be positive");
  const auto& C = s.cov;
  Scalar vx = C(2 * i, 2 * i) - 2 * g_x * C(2 * i, 2 * j) + g_x * g_x * C(2 * j, 2 * j);
  Scalar vp = C(2 * i + 1, 2 * i + 1) + 2 * g_p * C(2 * i + 1, 2 * j + 1) +
              g_p * g_p * C(2 * j + 1, 2 * j + 1);
  vx = std::max(vx, Scalar(0));
  vp = std::max(vp, Scalar(0));
  return std::sqrt(vx) * std::sqrt(vp) / den;
}

/// Optimal symmetric gain [n - m + sqrt((n-m)^2 + 4c^2)] / (2c) for the
/// ordered pair behind `red`. Undefined (nullopt) when |c_x| is negligible;
/// callers fall back to numeric gain minimization.
template <typename Scalar>
std::optional<Scalar> g_sym(const TwoModeReduced<Scalar>& red) {
  if (std::abs(red.c_x) <= Scalar(kGainCutoff)) return std::nullopt;
  const Scalar d = red.n - red.m;
  return (d + std::sqrt(d * d + 4 * red.c_x * red.c_x)) / (2 * red.c_x);
}

template <typename Scalar = double>
struct EntOpt {
  Scalar value = 0;
  Scalar gain = 0;
};

/// Minimum of ent_g over a single gain g_x = g_p = g: golden section on
/// log|g| over [1e-6, 1e6], both signs.
template <typename Scalar>
EntOpt<Scalar> ent_opt(const GaussianState<Scalar>& s, Eigen::Index i, Eigen::Index j) {
  detail::check_mode(s, i, "ent_opt");
  detail::check_mode(s, j, "ent_opt");
  if (i == j) throw std::invalid_argument("ent_opt: modes must differ");
  const auto& C = s.cov;
  const Scalar nx = C(2 * i, 2 * i), mx = C(2 * j, 2 * j), cx = C(2 * i, 2 * j);
  const Scalar np = C(2 * i + 1, 2 * i + 1), mp = C(2 * j + 1, 2 * j + 1),
               cp = C(2 * i + 1, 2 * j + 1);
  auto value_at = [&](Scalar g) {
    const Scalar vx = std::max(nx - 2 * g * cx + g * g * mx, Scalar(0));
    const Scalar vp = std::max(np + 2 * g * cp + g * g * mp, Scalar(0));
    return std::sqrt(vx) * std::sqrt(vp) / (1 + g * g);
  };
  const Scalar lo = std::log(Scalar(1e-6)), hi = std::log(Scalar(1e6));
  EntOpt<Scalar> best{std::numeric_limits<Scalar>::max(), 0};
  for (Scalar sign : {Scalar(1), Scalar(-1)}) {
    auto f = [&](Scalar x) { return value_at(sign * std::exp(x)); };
    auto [x, fx] = golden_minimize(f, lo, hi, Scalar(1e-10));
    if (fx < best.value) best = {fx, sign * std::exp(x)};
  }
  return best;
}

/// Monogamy bound max{1, S^2} / [(1 + g_ba^2)(1 + g_bc^2)] on the product
/// of the two gain-weighted entanglement quantifiers.
template <typename Scalar>
Scalar monogamy_bound_MB(Scalar g_ba, Scalar g_bc, Scalar s_collective) {
  return std::max(Scalar(1), s_collective * s_collective) /
         ((1 + g_ba * g_ba) * (1 + g_bc * g_bc));
}

namespace detail {

// Steering optimization workspace over one steered mode and up to kMaxSteer
// conditioning modes. Everything runs on the 2x2 blocks of the covariance,
// with no heap traffic in the hot evaluation path.
inline constexpr int kMaxSteer = 4;

template <typename Scalar>
struct SteeringProblem {
  using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
  int k = 0;
  Mat2 tt;
  std::array<Mat2, kMaxSteer> ts;
  std::array<std::array<Mat2, kMaxSteer>, kMaxSteer> ss;

  // Conditional variance of the theta-quadrature of the steered mode given
  // one quadrature per steerer at angles phi[0..k).
  Scalar cv(Scalar theta, const Scalar* phi) const {
    const Eigen::Matrix<Scalar, 2, 1> u(std::cos(theta), std::sin(theta));
    const Scalar var_t = u.dot(tt * u);
    std::array<Eigen::Matrix<Scalar, 2, 1>, kMaxSteer> v;
    std::array<Scalar, kMaxSteer> a;
    for (int p = 0; p < k; ++p) {
      v[p] = {std::cos(phi[p]), std::sin(phi[p])};
      a[p] = u.dot(ts[p] * v[p]);
    }
    Scalar explained = 0;
    if (k == 1) {
      const Scalar m = v[0].dot(ss[0][0] * v[0]);
      if (m > Scalar(0)) explained = a[0] * a[0] / m;
    } else if (k == 2) {
      const Scalar m00 = v[0].dot(ss[0][0] * v[0]);
      const Scalar m11 = v[1].dot(ss[1][1] * v[1]);
      const Scalar m01 = v[0].dot(ss[0][1] * v[1]);
      // spectral pseudo-inverse of the 2x2 conditioner covariance; the
      // eigenbasis comes from the rotation angle, which stays accurate for
      // near-diagonal matrices where l1 - m00 would cancel
      const Scalar ang = Scalar(0.5) * std::atan2(2 * m01, m00 - m11);
      const Scalar cs = std::cos(ang), sn = std::sin(ang);
      const Eigen::Matrix<Scalar, 2, 1> e1(cs, sn), e2(-sn, cs);
      const Scalar l1 = cs * cs * m00 + 2 * cs * sn * m01 + sn * sn * m11;
      const Scalar l2 = sn * sn * m00 - 2 * cs * sn * m01 + cs * cs * m11;
      const Scalar cut = Scalar(kPinvCutoff) * std::max(std::abs(l1), std::abs(l2));
      const Eigen::Matrix<Scalar, 2, 1> av(a[0], a[1]);
      if (l1 > cut) explained += std::pow(e1.dot(av), 2) / l1;
      if (l2 > cut) explained += std::pow(e2.dot(av), 2) / l2;
    } else {
      MatrixX<Scalar> M(k, k);
      VectorX<Scalar> av(k);
      for (int p = 0; p < k; ++p) {
        av(p) = a[p];
        for (int q = 0; q < k; ++q) M(p, q) = v[p].dot(ss[p][q] * v[q]);
      }
      M = ((M + M.transpose()) / Scalar(2)).eval();
      explained = pinv_quadratic_form(M, av);
    }
    Scalar out = var_t - explained;
    if (out < Scalar(0)) out = Scalar(0);
    if (out > var_t) out = var_t;
    return out;
  }

  // Inference product: coords = (theta_B, phi_x[0..k), phi_p[0..k)).
  Scalar objective(const Scalar* coords) const {
    const Scalar half_pi = Scalar(1.5707963267948966192313216916398);
    const Scalar cx = cv(coords[0], coords + 1);
    const Scalar cp = cv(coords[0] + half_pi, coords + 1 + k);
    return std::sqrt(cx) * std::sqrt(cp);
  }
};

template <typename Scalar>
SteeringProblem<Scalar> make_steering_problem(const GaussianState<Scalar>& s,
                                              Eigen::Index steered,
                                              const std::vector<Eigen::Index>& steerers) {
  check_mode(s, steered, "steering");
  if (steerers.empty()) throw std::invalid_argument("steering: steerer list is empty");
  if (static_cast<int>(steerers.size()) > kMaxSteer)
    throw std::invalid_argument("steering: too many steerer modes");
  for (std::size_t a = 0; a < steerers.size(); ++a) {
    check_mode(s, steerers[a], "steering");
    if (steerers[a] == steered)
      throw std::invalid_argument("steering: steered mode among steerers");
    for (std::size_t b = a + 1; b < steerers.size(); ++b)
      if (steerers[a] == steerers[b])
        throw std::invalid_argument("steering: duplicate steerer mode");
  }
  SteeringProblem<Scalar> P;
  P.k = static_cast<int>(steerers.size());
  auto block = [&s](Eigen::Index mi, Eigen::Index mj) {
    return s.cov.template block<2, 2>(2 * mi, 2 * mj).eval();
  };
  P.tt = block(steered, steered);
  for (int p = 0; p < P.k; ++p) {
    P.ts[p] = block(steered, steerers[p]);
    for (int q = 0; q < P.k; ++q) P.ss[p][q] = block(steerers[p], steerers[q]);
  }
  return P;
}

// Pseudo-inverse of a symmetric PSD matrix with a relative eigenvalue cutoff.
template <typename Scalar>
MatrixX<Scalar> pinv_psd(const MatrixX<Scalar>& M) {
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(M);
  const auto& lam = es.eigenvalues();
  const Scalar cut = Scalar(kPinvCutoff) * lam.cwiseAbs().maxCoeff();
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(M.rows(), M.cols());
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam(i) > cut)
      out += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / lam(i);
  return out;
}

// Exact Gaussian optimum of the inference product: the residual covariance
// of the steered pair given every steerer quadrature is
// K = tt - C pinv(S_vv) C^T, and the optimal basis diagonalizes K, giving
// the value sqrt(det K). Also produces the matching measurement angles,
// used to seed the numeric search (the optimal linear predictor is a sum of
// one quadrature per steerer mode, so the optimum is attainable with a
// single measured quadrature per mode).
template <typename Scalar>
struct ClosedSteering {
  Scalar value = 0;
  std::array<Scalar, 1 + 2 * kMaxSteer> coords{};
};

template <typename Scalar>
ClosedSteering<Scalar> closed_form_steering(const SteeringProblem<Scalar>& P) {
  const int k = P.k;
  MatrixX<Scalar> svv(2 * k, 2 * k);
  MatrixX<Scalar> C(2, 2 * k);
  for (int p = 0; p < k; ++p) {
    C.template block<2, 2>(0, 2 * p) = P.ts[p];
    for (int q = 0; q < k; ++q) svv.template block<2, 2>(2 * p, 2 * q) = P.ss[p][q];
  }
  svv = ((svv + svv.transpose()) / Scalar(2)).eval();
  const MatrixX<Scalar> W = pinv_psd(svv);
  Eigen::Matrix<Scalar, 2, 2> K = P.tt - C * W * C.transpose();
  K = ((K + K.transpose()) / Scalar(2)).eval();

  ClosedSteering<Scalar> out;
  out.value = std::sqrt(std::max(K.determinant(), Scalar(0)));
  const Scalar theta = Scalar(0.5) * std::atan2(2 * K(0, 1), K(0, 0) - K(1, 1));
  out.coords[0] = theta;
  const Scalar half_pi = Scalar(1.5707963267948966192313216916398);
  for (int part = 0; part < 2; ++part) {
    const Scalar t = theta + (part == 0 ? Scalar(0) : half_pi);
    const Eigen::Matrix<Scalar, 2, 1> u(std::cos(t), std::sin(t));
    const VectorX<Scalar> w = W * (C.transpose() * u);
    for (int p = 0; p < k; ++p) {
      const Scalar wx = w(2 * p), wp = w(2 * p + 1);
      out.coords[1 + part * k + p] =
          (wx == Scalar(0) && wp == Scalar(0)) ? Scalar(0) : std::atan2(wp, wx);
    }
  }
  return out;
}

// Coarse 64-point grid per coordinate plus golden-section coordinate descent.
template <typename Scalar>
Scalar descend_angles(const SteeringProblem<Scalar>& P,
                      std::array<Scalar, 1 + 2 * kMaxSteer>& coords, int max_cycles = 8) {
  const Scalar pi = Scalar(3.1415926535897932384626433832795);
  const int n = 1 + 2 * P.k;
  Scalar best = P.objective(coords.data());
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    const Scalar at_start = best;
    for (int c = 0; c < n; ++c) {
      const Scalar saved = coords[c];
      Scalar best_angle = saved;
      for (int g = 0; g < 64; ++g) {
        coords[c] = pi * Scalar(g) / Scalar(64);
        const Scalar f = P.objective(coords.data());
        if (f < best) { best = f; best_angle = coords[c]; }
      }
      auto f1 = [&](Scalar x) {
        coords[c] = x;
        return P.objective(coords.data());
      };
      auto [xr, fr] = golden_minimize(f1, best_angle - pi / 64, best_angle + pi / 64,
                                      Scalar(1e-10));
      if (fr < best) { best = fr; best_angle = xr; }
      coords[c] = best_angle;
    }
    if (at_start - best <= Scalar(1e-13) * (1 + std::abs(best))) break;
  }
  return best;
}

template <typename Scalar>
Scalar steering_fixed(const GaussianState<Scalar>& s, Eigen::Index steered,
                      const std::vector<Eigen::Index>& steerers) {
  const auto P = make_steering_problem(s, steered, steerers);
  const Scalar half_pi = Scalar(1.5707963267948966192313216916398);
  std::array<Scalar, kMaxSteer> zeros{}, halves{};
  halves.fill(half_pi);
  return std::sqrt(P.cv(Scalar(0), zeros.data())) * std::sqrt(P.cv(half_pi, halves.data()));
}

template <typename Scalar>
Scalar steering_optimized(const GaussianState<Scalar>& s, Eigen::Index steered,
                          const std::vector<Eigen::Index>& steerers) {
  const auto P = make_steering_problem(s, steered, steerers);
  auto closed = closed_form_steering(P);
  auto coords = closed.coords;
  const Scalar from_descent = descend_angles(P, coords);
  return std::min(from_descent, closed.value);
}

}  // namespace detail

/// EPR-steering parameter S_{steered|steerer}: product of the inference
/// (conditional) standard deviations of the steered mode's conjugate
/// quadratures given one measured quadrature on the steerer. Steering is
/// certified by < 1. With optimize_angles the target basis and the measured
/// quadrature are chosen to minimize the product; otherwise plain X|X, P|P.
template <typename Scalar>
Scalar steering_S_pair(const GaussianState<Scalar>& s, Eigen::Index steered,
                       Eigen::Index steerer, bool optimize_angles = true) {
  const std::vector<Eigen::Index> one = {steerer};
  return optimize_angles ? detail::steering_optimized(s, steered, one)
                         : detail::steering_fixed(s, steered, one);
}

/// Collective steering by joint measurements on several modes, one
/// quadrature per steerer. Never exceeds the steering by any single listed
/// steerer (discarding a mode is always an admissible strategy).
template <typename Scalar>
Scalar steering_S_collective(const GaussianState<Scalar>& s, Eigen::Index steered,
                             const std::vector<Eigen::Index>& steerers,
                             bool optimize_angles = true) {
  if (!optimize_angles) return detail::steering_fixed(s, steered, steerers);
  Scalar v = detail::steering_optimized(s, steered, steerers);
  if (steerers.size() > 1)
    for (Eigen::Index one : steerers)
      v = std::min(v, detail::steering_optimized(s, steered, std::vector<Eigen::Index>{one}));
  return v;
}

/// Everything check_monogamy knows about one (B; A, C) role assignment.
/// Residuals are LHS - RHS of the five monogamy inequalities; >= 0 (within
/// kResidualTol) means the inequality holds.
template <typename Scalar = double>
struct QuantifierReport {
  Scalar D_BA = 0, D_BC = 0;
  Scalar S_BA = 0, S_BC = 0, S_collective = 0;
  Scalar g_BA = 0, g_BC = 0;        // symmetry gains (numeric fallback when c ~ 0)
  Scalar Ent_BA = 0, Ent_BC = 0;    // ent_g at the symmetry gains
  Scalar Ent_BA_opt = 0, Ent_BC_opt = 0, g_BA_opt = 0, g_BC_opt = 0;
  Scalar M_B = 0;
  Scalar residual_r1 = 0;         // D_BA + D_BC - 1
  Scalar residual_r2 = 0;         // D_BA + D_BC - max{1, S}
  Scalar residual_r3_product = 0; // Ent product bound at the optimal gains
  Scalar residual_r3_sum = 0;     // Ent sum bound at the optimal gains
  Scalar residual_r4 = 0;         // Ent product bound at the symmetry gains

  Scalar min_residual() const {
    return std::min({residual_r1, residual_r2, residual_r3_product, residual_r3_sum,
                     residual_r4});
  }

  template <typename Other>
  QuantifierReport<Other> cast() const {
    QuantifierReport<Other> o;
    o.D_BA = Other(D_BA); o.D_BC = Other(D_BC);
    o.S_BA = Other(S_BA); o.S_BC = Other(S_BC); o.S_collective = Other(S_collective);
    o.g_BA = Other(g_BA); o.g_BC = Other(g_BC);
    o.Ent_BA = Other(Ent_BA); o.Ent_BC = Other(Ent_BC);
    o.Ent_BA_opt = Other(Ent_BA_opt); o.Ent_BC_opt = Other(Ent_BC_opt);
    o.g_BA_opt = Other(g_BA_opt); o.g_BC_opt = Other(g_BC_opt);
    o.M_B = Other(M_B);
    o.residual_r1 = Other(residual_r1); o.residual_r2 = Other(residual_r2);
    o.residual_r3_product = Other(residual_r3_product);
    o.residual_r3_sum = Other(residual_r3_sum); o.residual_r4 = Other(residual_r4);
    return o;
  }
};

/// Evaluates every quantifier and monogamy residual for the role assignment
/// (steered B; parties A, C).
template <typename Scalar>
QuantifierReport<Scalar> check_monogamy(const GaussianState<Scalar>& s, Eigen::Index B,
                                        Eigen::Index A, Eigen::Index C,
                                        bool optimize_angles = true) {
  if (B == A || B == C || A == C)
    throw std::invalid_argument("check_monogamy: modes must be distinct");
  QuantifierReport<Scalar> rep;
  rep.D_BA = duan_D(s, B, A);
  rep.D_BC = duan_D(s, B, C);
  rep.S_BA = steering_S_pair(s, B, A, optimize_angles);
  rep.S_BC = steering_S_pair(s, B, C, optimize_angles);
  if (optimize_angles) {
    const Scalar joint = detail::steering_optimized(s, B, std::vector<Eigen::Index>{A, C});
    rep.S_collective = std::min({joint, rep.S_BA, rep.S_BC});
  } else {
    rep.S_collective = detail::steering_fixed(s, B, std::vector<Eigen::Index>{A, C});
  }

  const auto eo_ba = ent_opt(s, B, A);
  const auto eo_bc = ent_opt(s, B, C);
  rep.Ent_BA_opt = eo_ba.value;
  rep.Ent_BC_opt = eo_bc.value;
  rep.g_BA_opt = eo_ba.gain;
  rep.g_BC_opt = eo_bc.gain;

  rep.g_BA = g_sym(reduced_two_mode(s, B, A)).value_or(eo_ba.gain);
  rep.g_BC = g_sym(reduced_two_mode(s, B, C)).value_or(eo_bc.gain);
  rep.Ent_BA = ent_g(s, B, A, rep.g_BA, rep.g_BA);
  rep.Ent_BC = ent_g(s, B, C, rep.g_BC, rep.g_BC);
  rep.M_B = monogamy_bound_MB(rep.g_BA, rep.g_BC, rep.S_collective);

  const Scalar S = rep.S_collective;
  rep.residual_r1 = rep.D_BA + rep.D_BC - 1;
  rep.residual_r2 = rep.D_BA + rep.D_BC - std::max(Scalar(1), S);
  const Scalar ga2 = rep.g_BA_opt * rep.g_BA_opt, gc2 = rep.g_BC_opt * rep.g_BC_opt;
  rep.residual_r3_product =
      rep.Ent_BA_opt * rep.Ent_BC_opt - std::max(Scalar(1), S * S) / ((1 + ga2) * (1 + gc2));
  rep.residual_r3_sum = rep.Ent_BA_opt + rep.Ent_BC_opt -
                        S * (2 + ga2 + gc2) / ((1 + ga2) * (1 + gc2));
  rep.residual_r4 = rep.Ent_BA * rep.Ent_BC - rep.M_B;
  return rep;
}

}  // namespace cvmono
