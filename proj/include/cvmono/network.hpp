#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cvmono/gaussian_state.hpp"
#include "cvmono/quantifiers.hpp"

// The three-mode network: a (possibly thermally seeded) two-mode squeezed
// pair (B, F), loss on B, a beam splitter sending F into (A, C), then loss
// on A and C. Built constructively from the state machinery, and evaluated
// independently through the published closed-form expressions so the two
// paths can cross-check each other.

namespace cvmono {

/// Parameter values that are individually in range but outside the physical
/// domain of the network (transmissions outside [0,1], negative seeds, ...).
class NonPhysicalParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested scenario has no published closed form.
class NoClosedForm : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CircuitParams {
  double r = 0.0;     // two-mode squeeze parameter
  double eta0 = 0.5;  // splitter transmission toward A; C gets 1 - eta0
  double etaB = 1.0;  // loss transmissions
  double etaA = 1.0;
  double etaC = 1.0;
  double nB = 0.0;    // thermal seed occupations
  double nF = 0.0;

  void validate() const {
    if (!std::isfinite(r)) throw NonPhysicalParams("r must be finite");
    for (auto [v, name] : {std::pair{eta0, "eta0"}, {etaB, "etaB"}, {etaA, "etaA"},
                           {etaC, "etaC"}})
      if (!(v >= 0.0 && v <= 1.0))
        throw NonPhysicalParams(std::string(name) + " must lie in [0,1]");
    if (!(nB >= 0.0) || !(nF >= 0.0))
      throw NonPhysicalParams("thermal occupations must be >= 0");
  }
};

inline CircuitParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("params: expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"r", "eta0", "etaB", "etaA", "etaC", "nB", "nF"};
    bool ok = false;
    for (auto* k : known) ok = ok || it.key() == k;
    if (!ok) throw std::invalid_argument("params: unknown key '" + it.key() + "'");
  }
  if (!j.contains("r") || !j.contains("eta0"))
    throw std::invalid_argument("params: keys 'r' and 'eta0' are required");
  CircuitParams p;
  p.r = j.at("r").get<double>();
  p.eta0 = j.at("eta0").get<double>();
  p.etaB = j.value("etaB", 1.0);
  p.etaA = j.value("etaA", 1.0);
  p.etaC = j.value("etaC", 1.0);
  p.nB = j.value("nB", 0.0);
  p.nF = j.value("nF", 0.0);
  return p;
}

inline nlohmann::json params_to_json(const CircuitParams& p) {
  return {{"r", p.r},     {"eta0", p.eta0}, {"etaB", p.etaB}, {"etaA", p.etaA},
          {"etaC", p.etaC}, {"nB", p.nB},   {"nF", p.nF}};
}

/// Effective transmission seen by the pre-split mode F once A and C are
/// lossy: eta0*etaA + (1-eta0)*etaC.
inline double effective_eta_F(const CircuitParams& p) {
  return p.eta0 * p.etaA + (1.0 - p.eta0) * p.etaC;
}

/// Constructive pipeline. Modes are ordered (B, A, C). The phase of C is
/// fixed so that its X correlation with B is positive, matching the sign
/// convention of the closed forms.
inline GaussianState<double> build_circuit(const CircuitParams& p) {
  p.validate();
  GaussianState<double> s = thermal_seeded_tms(p.r, p.nB, p.nF);  // modes (B, F)
  s = apply_loss(s, 0, p.etaB);
  s = append_vacuum(s, 1);                  // modes (B, F, vac)
  s = apply_beamsplitter(s, 1, 2, p.eta0);  // F -> A, vac -> C
  s = apply_phase_rotation(s, 2, 3.1415926535897932384626433832795);
  s = apply_loss(s, 1, p.etaA);
  s = apply_loss(s, 2, p.etaC);
  return s;
}

// ---------------------------------------------------------------------------
// Closed forms, evaluated exactly as published (no matrix algebra).

namespace closedform {

struct PairCov {
  double n = 1, m = 1, c = 0;  // X-sector; the P cross term is -c
};

inline double duan_from_cov(const PairCov& cv) { return (cv.n - 2 * cv.c + cv.m) / 2.0; }

/// Inference product n - c^2/m for an X-P symmetric pair.
inline double steering_from_cov(const PairCov& cv) { return cv.n - cv.c * cv.c / cv.m; }

inline double g_sym_from_cov(const PairCov& cv) {
  const double d = cv.n - cv.m;
  return (d + std::sqrt(d * d + 4 * cv.c * cv.c)) / (2 * cv.c);
}

/// Gain-weighted quantifier (n - 2gc + g^2 m)/(1 + g^2) at the symmetric
/// optimum gain.
inline double ent_from_cov(const PairCov& cv) {
  const double g = g_sym_from_cov(cv);
  return (cv.n - 2 * g * cv.c + g * g * cv.m) / (1 + g * g);
}

// Covariance elements per scenario family.
inline PairCov cov_ba_ideal(double r, double eta0) {
  const double ch = std::cosh(2 * r), sh = std::sinh(2 * r);
  return {ch, eta0 * ch + (1 - eta0), std::sqrt(eta0) * sh};
}

inline PairCov cov_ba_loss_b(double r, double eta0, double etaB) {
  const double ch = std::cosh(2 * r), sh = std::sinh(2 * r);
  return {etaB * ch + (1 - etaB), eta0 * ch + (1 - eta0), std::sqrt(eta0 * etaB) * sh};
}

inline PairCov cov_ba_loss_ac(double r, double eta0, double etaA) {
  const double ch = std::cosh(2 * r), sh = std::sinh(2 * r);
  const double t = eta0 * etaA;
  return {ch, t * ch + (1 - t), std::sqrt(t) * sh};
}

inline PairCov cov_bf_thermal(double r, double nB, double nF) {
  const double ch = std::cosh(2 * r), sh = std::sinh(2 * r);
  const double s = nF + nB + 1, d = nB - nF;
  return {s * ch + d, s * ch - d, s * sh};
}

inline PairCov cov_ba_thermal(double r, double eta0, double nB, double nF) {
  const PairCov bf = cov_bf_thermal(r, nB, nF);
  return {bf.n, eta0 * bf.m + (1 - eta0), std::sqrt(eta0) * bf.c};
}

// Steering parameters.
inline double steering_ideal(double r) { return 1.0 / std::cosh(2 * r); }

inline double steering_loss_b(double r, double etaB) {
  const double ch = std::cosh(2 * r), sh = std::sinh(2 * r);
  return etaB * ch + (1 - etaB) - etaB * sh * sh / ch;
}

/// Steering with mode F attenuated to etaF (and B to etaB):
/// 1 - etaB [cosh 2r - 1][2 etaF - 1]/[1 - etaF + etaF cosh 2r].
inline double steering_eta_f(double r, double etaB, double etaF) {
  const double ch = std::cosh(2 * r);
  return 1.0 - etaB * (ch - 1) * (2 * etaF - 1) / (1 - etaF + etaF * ch);
}

inline double steering_thermal(double r, double nB, double nF) {
  const PairCov bf = cov_bf_thermal(r, nB, nF);
  return steering_from_cov(bf);  // (2 n_th + 1)/cosh 2r when nB = nF
}

// Equal observed losses etaB = eta0:
// D_BA = 1 + etaB (e^{-2r} - 1),
// D_BC = (cosh 2r + 1 - 2 sqrt(etaB(1-etaB)) sinh 2r)/2.
inline double d_ba_equal_loss(double r, double etaB) {
  return 1.0 + etaB * (std::exp(-2 * r) - 1.0);
}

inline double d_bc_equal_loss(double r, double etaB) {
  return (std::cosh(2 * r) + 1 - 2 * std::sqrt(etaB * (1 - etaB)) * std::sinh(2 * r)) / 2.0;
}

/// Symmetric gain for the undamped pair (B, A), written out explicitly.
inline double g_sym_ideal(double r, double eta0) {
  const double ch = std::cosh(2 * r), sh = std::sinh(2 * r);
  const double q = ch * (1 - eta0) - (1 - eta0);
  return (q + std::sqrt(std::pow(ch * (1 - eta0) - 1 + eta0, 2) + 4 * eta0 * sh * sh)) /
         (2 * std::sqrt(eta0) * sh);
}

}  // namespace closedform

enum class Scenario { ideal, loss_b, equal_loss, loss_ac, thermal };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::ideal: return "ideal";
    case Scenario::loss_b: return "loss_b";
    case Scenario::equal_loss: return "equal_loss";
    case Scenario::loss_ac: return "loss_ac";
    case Scenario::thermal: return "thermal";
  }
  return "?";
}

/// Picks the most specific family whose published formulas cover the
/// parameters; nullopt when none does (mixed scenarios run constructively
/// only).
inline std::optional<Scenario> detect_scenario(const CircuitParams& p) {
  const bool thermal = p.nB > 0 || p.nF > 0;
  const bool ac_ideal = p.etaA == 1.0 && p.etaC == 1.0;
  if (thermal) {
    if (p.etaB == 1.0 && ac_ideal) return Scenario::thermal;
    return std::nullopt;
  }
  if (ac_ideal) {
    if (p.etaB == 1.0) return Scenario::ideal;
    if (p.etaB == p.eta0) return Scenario::equal_loss;
    return Scenario::loss_b;
  }
  if (p.etaB == 1.0) return Scenario::loss_ac;
  return std::nullopt;
}

/// Evaluates the published formulas for the given family and fills a report
/// shaped like check_monogamy's. Throws NoClosedForm when the parameters do
/// not belong to the family.
inline QuantifierReport<double> closed_form_report(const CircuitParams& p, Scenario sc) {
  namespace cf = closedform;
  p.validate();
  cf::PairCov ba, bc;
  double S = 1;
  switch (sc) {
    case Scenario::ideal:
      if (p.etaB != 1.0 || p.etaA != 1.0 || p.etaC != 1.0 || p.nB != 0 || p.nF != 0)
        throw NoClosedForm("parameters outside the ideal family");
      ba = cf::cov_ba_ideal(p.r, p.eta0);
      bc = cf::cov_ba_ideal(p.r, 1 - p.eta0);
      S = cf::steering_ideal(p.r);
      break;
    case Scenario::equal_loss:
      if (p.etaB != p.eta0 || p.etaA != 1.0 || p.etaC != 1.0 || p.nB != 0 || p.nF != 0)
        throw NoClosedForm("parameters outside the equal-loss family");
      [[fallthrough]];
    case Scenario::loss_b:
      if (p.etaA != 1.0 || p.etaC != 1.0 || p.nB != 0 || p.nF != 0)
        throw NoClosedForm("parameters outside the loss-on-B family");
      ba = cf::cov_ba_loss_b(p.r, p.eta0, p.etaB);
      bc = cf::cov_ba_loss_b(p.r, 1 - p.eta0, p.etaB);
      S = cf::steering_loss_b(p.r, p.etaB);
      break;
    case Scenario::loss_ac:
      if (p.etaB != 1.0 || p.nB != 0 || p.nF != 0)
        throw NoClosedForm("parameters outside the loss-on-AC family");
      ba = cf::cov_ba_loss_ac(p.r, p.eta0, p.etaA);
      bc = cf::cov_ba_loss_ac(p.r, 1 - p.eta0, p.etaC);
      S = cf::steering_eta_f(p.r, 1.0, effective_eta_F(p));
      break;
    case Scenario::thermal:
      if (p.etaB != 1.0 || p.etaA != 1.0 || p.etaC != 1.0)
        throw NoClosedForm("parameters outside the thermal family");
      ba = cf::cov_ba_thermal(p.r, p.eta0, p.nB, p.nF);
      bc = cf::cov_ba_thermal(p.r, 1 - p.eta0, p.nB, p.nF);
      S = cf::steering_thermal(p.r, p.nB, p.nF);
      break;
  }

  QuantifierReport<double> rep;
  if (sc == Scenario::equal_loss) {
    rep.D_BA = cf::d_ba_equal_loss(p.r, p.etaB);
    rep.D_BC = cf::d_bc_equal_loss(p.r, p.etaB);
  } else {
    rep.D_BA = cf::duan_from_cov(ba);
    rep.D_BC = cf::duan_from_cov(bc);
  }
  rep.S_BA = cf::steering_from_cov(ba);
  rep.S_BC = cf::steering_from_cov(bc);
  rep.S_collective = S;
  rep.g_BA = (sc == Scenario::ideal) ? cf::g_sym_ideal(p.r, p.eta0) : cf::g_sym_from_cov(ba);
  rep.g_BC = (sc == Scenario::ideal) ? cf::g_sym_ideal(p.r, 1 - p.eta0)
                                     : cf::g_sym_from_cov(bc);
  rep.Ent_BA = cf::ent_from_cov(ba);
  rep.Ent_BC = cf::ent_from_cov(bc);
  rep.Ent_BA_opt = rep.Ent_BA;
  rep.Ent_BC_opt = rep.Ent_BC;
  rep.g_BA_opt = rep.g_BA;
  rep.g_BC_opt = rep.g_BC;
  rep.M_B = monogamy_bound_MB(rep.g_BA, rep.g_BC, S);
  rep.residual_r1 = rep.D_BA + rep.D_BC - 1;
  rep.residual_r2 = rep.D_BA + rep.D_BC - std::max(1.0, S);
  const double ga2 = rep.g_BA * rep.g_BA, gc2 = rep.g_BC * rep.g_BC;
  rep.residual_r3_product = rep.Ent_BA * rep.Ent_BC - rep.M_B;
  rep.residual_r3_sum =
      rep.Ent_BA + rep.Ent_BC - S * (2 + ga2 + gc2) / ((1 + ga2) * (1 + gc2));
  rep.residual_r4 = rep.Ent_BA * rep.Ent_BC - rep.M_B;
  return rep;
}

inline QuantifierReport<double> closed_form_report(const CircuitParams& p) {
  const auto sc = detect_scenario(p);
  if (!sc)
    throw NoClosedForm("no closed form for this parameter combination; "
                       "use the constructive path");
  return closed_form_report(p, *sc);
}

}  // namespace cvmono
