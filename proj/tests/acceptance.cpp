// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Criterion 4 carries extra study lines quantifying the saturation gap; see
// the notes printed beneath it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cvmono/commands.hpp"
#include "cvmono/fuzz.hpp"
#include "cvmono/network.hpp"
#include "cvmono/sampling.hpp"
#include "cvmono/sweep.hpp"

using namespace cvmono;

namespace {

int failures = 0;

void line(bool ok, int id, const std::string& label, double seconds,
          const std::string& detail) {
  std::printf("[%s] criterion %d: %-34s (%6.2f s)  %s\n", ok ? "PASS" : "FAIL", id,
              label.c_str(), seconds, detail.c_str());
  if (!ok) ++failures;
}

void note(bool ok, const std::string& text) {
  std::printf("       %s %s\n", ok ? "[study-pass]" : "[study-FAIL]", text.c_str());
  if (!ok) ++failures;
}

double run_timed(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) { return format_number(x); }

// --------------------------------------------------------------------------

void criterion_1() {
  bool ok = true;
  double worst = 0;
  double at_r4 = 0;
  const double sec = run_timed([&] {
    for (double r : {0.5, 1.0, 2.0, 4.0}) {
      CircuitParams p;
      p.r = r;
      p.eta0 = 0.5;
      p.etaB = 0.5;
      const auto s = build_circuit(p);
      const double expected = 0.5 * (1 + std::exp(-2 * r));
      const double dba = duan_D(s, 0, 1), dbc = duan_D(s, 0, 2);
      worst = std::max({worst, std::abs(dba - expected), std::abs(dbc - expected)});
      if (r == 4.0) at_r4 = dba;
    }
  });
  ok = worst <= 1e-10 && std::abs(at_r4 - 0.5) <= 3.4e-4 && sec < 1.0;
  line(ok, 1, "equal-loss D saturation", sec,
       "max |D - 0.5(1+e^{-2r})| = " + fmt(worst) +
           ", |D(r=4) - 1/2| = " + fmt(std::abs(at_r4 - 0.5)));
}

void criterion_2() {
  bool ok = true;
  double worst = 0;
  const double sec = run_timed([&] {
    const double rs[4] = {0.3, 0.8, 1.5, 2.2};
    const double etas[5] = {0.05, 0.3, 0.5, 0.7, 0.95};
    for (double r : rs)
      for (double eta0 : etas) {
        CircuitParams p;
        p.r = r;
        p.eta0 = eta0;
        const auto s = build_circuit(p);
        const double half_pi = 1.5707963267948966;
        const double s_coll =
            std::sqrt(conditional_variance(s, {0, 0.0}, {{1, 0.0}, {2, 0.0}})) *
            std::sqrt(conditional_variance(s, {0, half_pi}, {{1, half_pi}, {2, half_pi}}));
        worst = std::max(worst, std::abs(s_coll - 1.0 / std::cosh(2 * r)));
      }
  });
  ok = worst <= 1e-10 && sec < 1.0;
  line(ok, 2, "collective steering (20 points)", sec,
       "max |S - 1/cosh 2r| = " + fmt(worst));
}

// Constructive counterparts of the closed-form report fields, computed
// through the matrix pipeline with the published gain/steering structure.
QuantifierReport<double> constructive_fields(const GaussianState<double>& s) {
  QuantifierReport<double> rep;
  rep.D_BA = duan_D(s, 0, 1);
  rep.D_BC = duan_D(s, 0, 2);
  rep.S_BA = steering_S_pair(s, 0, 1, false);
  rep.S_BC = steering_S_pair(s, 0, 2, false);
  rep.S_collective = steering_S_collective(s, 0, {1, 2}, false);
  const auto g_ba = g_sym(reduced_two_mode(s, 0, 1));
  const auto g_bc = g_sym(reduced_two_mode(s, 0, 2));
  rep.g_BA = g_ba ? *g_ba : 0;
  rep.g_BC = g_bc ? *g_bc : 0;
  rep.Ent_BA = ent_g(s, 0, 1, rep.g_BA, rep.g_BA);
  rep.Ent_BC = ent_g(s, 0, 2, rep.g_BC, rep.g_BC);
  rep.M_B = monogamy_bound_MB(rep.g_BA, rep.g_BC, rep.S_collective);
  return rep;
}

double family_delta(const CircuitParams& p, Scenario sc) {
  const auto a = constructive_fields(build_circuit(p));
  const auto b = closed_form_report(p, sc);
  return std::max({std::abs(a.D_BA - b.D_BA), std::abs(a.D_BC - b.D_BC),
                   std::abs(a.S_BA - b.S_BA), std::abs(a.S_BC - b.S_BC),
                   std::abs(a.S_collective - b.S_collective), std::abs(a.g_BA - b.g_BA),
                   std::abs(a.g_BC - b.g_BC), std::abs(a.Ent_BA - b.Ent_BA),
                   std::abs(a.Ent_BC - b.Ent_BC), std::abs(a.M_B - b.M_B)});
}

void criterion_3() {
  double worst = 0;
  std::string worst_family = "-";
  const double sec = run_timed([&] {
    auto grid = [](double lo, double hi, int i) { return lo + (hi - lo) * i / 19.0; };
    auto track = [&](double d, const char* family) {
      if (d > worst) {
        worst = d;
        worst_family = family;
      }
    };
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        CircuitParams p;
        // no extra loss or noise
        p.r = grid(0.05, 2.4, i);
        p.eta0 = grid(0.03, 0.97, j);
        track(family_delta(p, Scenario::ideal), "ideal");
        // loss on the shared mode
        p = {};
        p.r = 1.1;
        p.etaB = grid(0.02, 1.0, i);
        p.eta0 = grid(0.03, 0.97, j);
        track(family_delta(p, Scenario::loss_b), "loss_b");
        // equal observed losses
        p = {};
        p.r = grid(0.05, 2.4, i);
        p.eta0 = grid(0.02, 0.99, j);
        p.etaB = p.eta0;
        track(family_delta(p, Scenario::equal_loss), "equal_loss");
        // extra loss on the outputs
        p = {};
        p.r = 1.3;
        p.eta0 = 0.6;
        p.etaA = grid(0.02, 1.0, i);
        p.etaC = grid(0.02, 1.0, j);
        track(family_delta(p, Scenario::loss_ac), "loss_ac");
        // thermal seeds
        p = {};
        p.r = 1.0;
        p.nB = p.nF = grid(0.0, 3.0, i);
        p.eta0 = grid(0.03, 0.97, j);
        track(family_delta(p, Scenario::thermal), "thermal");
        // combined B and output losses: printed steering only
        p = {};
        p.r = 1.0;
        p.eta0 = 0.6;
        p.etaC = 0.85;
        p.etaB = grid(0.02, 1.0, i);
        p.etaA = grid(0.02, 1.0, j);
        const double s_built =
            steering_S_collective(build_circuit(p), 0, {1, 2}, false);
        const double s_closed =
            closedform::steering_eta_f(p.r, p.etaB, effective_eta_F(p));
        track(std::abs(s_built - s_closed), "steering_eta_f");
      }
  });
  const bool ok = worst <= 1e-10 && sec < 10.0;
  line(ok, 3, "closed form vs constructive", sec,
       "max |delta| = " + fmt(worst) + " (family " + worst_family + ")");
}

void criterion_4() {
  auto max_rel_abs_gap = [](double r) {
    double rel = 0, abs_gap = 0;
    for (int i = 0; i <= 180; ++i) {
      const double eta0 = 0.05 + 0.9 * i / 180.0;
      CircuitParams p;
      p.r = r;
      p.eta0 = eta0;
      const auto rep = check_monogamy(build_circuit(p), 0, 1, 2);
      rel = std::max(rel, rep.residual_r4 / rep.M_B);
      abs_gap = std::max(abs_gap, rep.residual_r4);
    }
    return std::pair{rel, abs_gap};
  };

  double rel2 = 0, abs2 = 0, rel3 = 0, abs3 = 0, rel3_mid = 0;
  const double sec = run_timed([&] {
    std::tie(rel2, abs2) = max_rel_abs_gap(2.0);
    std::tie(rel3, abs3) = max_rel_abs_gap(3.0);
    for (int i = 0; i <= 100; ++i) {
      const double eta0 = 0.25 + 0.5 * i / 100.0;
      CircuitParams p;
      p.r = 3.0;
      p.eta0 = eta0;
      const auto rep = check_monogamy(build_circuit(p), 0, 1, 2);
      rel3_mid = std::max(rel3_mid, rep.residual_r4 / rep.M_B);
    }
  });

  const bool gate_ok = rel2 <= 0.1;
  const bool main_ok = rel3 <= 0.02;
  line(gate_ok && main_ok, 4, "product-bound saturation at high r", sec,
       "max rel gap: r=2 " + fmt(rel2) + " (gate 0.1), r=3 " + fmt(rel3) +
           " (limit 0.02)");

  // The relative gap at the symmetry gains has the exact high-r limit
  // 2 e^{-2r} [eta0^2 + (1-eta0)^2] / [eta0 (1-eta0)], which is 0.0945 at
  // r = 3 over eta0 in [0.05, 0.95]; the stated 0.02 (and the r = 2 gate of
  // 0.1) are below that floor, so the two lines above cannot pass for any
  // correct implementation. The checks below pin the saturation to the
  // limit-study values instead: the measured gap must match the asymptote,
  // shrink like e^{-2r}, vanish in absolute terms, and meet 0.02 on the
  // central band where the bound is not degenerate.
  note(rel3 <= 0.095, "r=3 max rel gap " + fmt(rel3) + " <= 0.095 (limit-study bound)");
  const double ratio = rel3 / rel2;
  note(ratio > 0.10 && ratio < 0.18,
       "gap ratio r3/r2 = " + fmt(ratio) + " tracks e^{-2} = 0.135");
  note(abs3 <= 0.0025, "r=3 max absolute gap " + fmt(abs3) + " <= 0.0025");
  note(rel3_mid <= 0.02,
       "r=3 max rel gap on eta0 in [0.25, 0.75] = " + fmt(rel3_mid) + " <= 0.02");
}

void criterion_5() {
  FuzzReport rep;
  const double sec = run_timed([&] { rep = fuzz_monogamy(10000, 20240817, 6); });
  double min_res = rep.min_residuals[0];
  for (double r : rep.min_residuals) min_res = std::min(min_res, r);
  const bool ok = rep.ok() && rep.min_steering_product >= 1.0 - 1e-9 &&
                  rep.max_collective_excess <= 1e-12 && sec < 60.0;
  line(ok, 5, "10^4-state property suite", sec,
       "min residual = " + fmt(min_res) +
           ", min S_BA*S_BC = " + fmt(rep.min_steering_product) +
           ", max S_coll excess = " + fmt(rep.max_collective_excess) +
           ", steerable " + std::to_string(rep.steerable_trials) + "/10000");
}

void criterion_6() {
  bool ok = true;
  std::string detail;
  const double sec = run_timed([&] {
    CircuitParams p;
    p.r = 1.0;
    p.eta0 = 0.5;
    const auto state = build_circuit(p);
    const auto batch = sample_wigner(state, 1000000, 20240817);
    const double half_pi = 1.5707963267948966;

    struct Probe {
      Quadrature<double> target;
      std::vector<Quadrature<double>> conds;
      int bins;
    };
    const std::vector<Probe> probes = {
        {{0, 0.0}, {{1, 0.0}}, 200},
        {{0, 0.0}, {{2, 0.0}}, 200},
        {{0, 0.0}, {{1, 0.0}, {2, 0.0}}, 100},
        {{0, half_pi}, {{1, half_pi}, {2, half_pi}}, 100},
    };
    double worst_reg = 0, worst_bin = 0;
    bool bias_ok = true;
    for (const auto& probe : probes) {
      const double schur = conditional_variance(state, probe.target, probe.conds);
      const double reg = regression_conditional_variance(batch, probe.target, probe.conds);
      const double bin =
          empirical_conditional_variance(batch, probe.target, probe.conds, probe.bins);
      worst_reg = std::max(worst_reg, std::abs(reg / schur - 1.0));
      worst_bin = std::max(worst_bin, std::abs(bin / schur - 1.0));
      const double se = schur * std::sqrt(2.0 / 1e6);
      bias_ok = bias_ok && bin >= schur - 3 * se && reg >= schur - 3 * se;
    }

    // monotonicity at three sigma on the regression estimates
    const double cv_a = regression_conditional_variance(batch, {0, 0.0}, {{1, 0.0}});
    const double cv_ac =
        regression_conditional_variance(batch, {0, 0.0}, {{1, 0.0}, {2, 0.0}});
    const double se = cv_ac * std::sqrt(2.0 / 1e6);
    const bool mono_ok = cv_ac <= cv_a + 3 * std::sqrt(2.0) * se;

    // no fixed gain beats the inference variance, at three sigma
    bool gain_ok = true;
    const auto xb = quadrature_samples(batch, {0, 0.0});
    const auto xa = quadrature_samples(batch, {1, 0.0});
    for (double g = -2.0; g <= 2.0; g += 0.5) {
      const Eigen::VectorXd diff = xb - g * xa;
      const double var = (diff.array() - diff.mean()).square().sum() / (diff.size() - 1);
      gain_ok = gain_ok && var >= cv_a - 3 * se;
    }

    ok = worst_reg <= 0.01 && worst_bin <= 0.03 && bias_ok && mono_ok && gain_ok;
    detail = "max regression dev = " + fmt(worst_reg) + ", max binned dev = " +
             fmt(worst_bin) + (mono_ok ? "" : ", monotonicity broken") +
             (gain_ok ? "" : ", gain bound broken");
  });
  ok = ok && sec < 30.0;
  line(ok, 6, "Monte-Carlo oracle (10^6 samples)", sec, detail);
}

void criterion_7() {
  bool ok = true;
  std::string detail;
  const double sec = run_timed([&] {
    const double r = 1.0;
    const double n_star = (std::cosh(2 * r) - 1) / 2;
    CircuitParams p;
    p.r = r;
    p.eta0 = 0.5;
    p.nB = p.nF = n_star;
    const double s_at_star = steering_S_collective(build_circuit(p), 0, {1, 2}, false);
    const double dev = std::abs(s_at_star - 1.0);

    auto s_of = [&](double nth) {
      CircuitParams q;
      q.r = r;
      q.eta0 = 0.5;
      q.nB = q.nF = nth;
      return steering_S_collective(build_circuit(q), 0, {1, 2}, false);
    };
    const bool bracket_ok = s_of(n_star - 0.1) < 1.0 && s_of(n_star + 0.1) > 1.0;

    double min_r2 = 1e300;
    for (int i = 0; i <= 60; ++i) {
      CircuitParams q;
      q.r = r;
      q.eta0 = 0.5;
      q.nB = q.nF = 3.0 * i / 60.0;
      const auto rep = check_monogamy(build_circuit(q), 0, 1, 2);
      min_r2 = std::min(min_r2, rep.residual_r2);
    }
    ok = dev <= 1e-10 && bracket_ok && min_r2 >= -1e-9;
    detail = "|S(n*) - 1| = " + fmt(dev) + ", min r2 over n_th in [0,3] = " + fmt(min_r2);
  });
  line(ok, 7, "thermal steering crossover", sec, detail);
}

void criterion_8() {
  bool ok = true;
  std::string detail;
  const double sec = run_timed([&] {
    const auto dir = std::filesystem::temp_directory_path();
    const auto p1 = dir / "cvmono_acc_fig3b_1.csv";
    const auto p2 = dir / "cvmono_acc_fig3b_2.csv";
    std::ostringstream sink, err;
    const int rc1 = cmd_sweep("fig3b", "", p1.string(), sink, err);
    const int rc2 = cmd_sweep("fig3b", "", p2.string(), sink, err);
    auto slurp = [](const std::filesystem::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    const std::string a = slurp(p1), b = slurp(p2);
    const bool identical = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;

    // last row is eta0 = 1; first data column is D_BA
    double d_ba_at_1 = 1e300;
    std::istringstream in(a);
    std::string line_text, last;
    std::getline(in, line_text);  // header
    while (std::getline(in, line_text))
      if (!line_text.empty()) last = line_text;
    std::istringstream row(last);
    std::string field;
    std::getline(row, field, ',');
    const double eta0_last = std::stod(field);
    std::getline(row, field, ',');
    d_ba_at_1 = std::stod(field);
    const double dev = std::abs(d_ba_at_1 - std::exp(-4.0));
    ok = identical && eta0_last == 1.0 && dev <= 1e-10;
    detail = std::string("byte-identical = ") + (identical ? "yes" : "NO") +
             ", |D_BA(eta0=1) - e^{-4}| = " + fmt(dev);
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
  });
  line(ok, 8, "preset determinism", sec, detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::printf("%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
