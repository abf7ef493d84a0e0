#include "cvmono/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

namespace cvmono {

namespace {

const std::vector<std::string> kColumns = {
    "D_BA", "D_BC", "D_sum", "S_BA", "S_BC", "S_coll", "bound", "Ent_BA", "Ent_BC",
    "Ent_prod", "g_BA", "g_BC", "M_B", "r1", "r2", "r3_product", "r3_sum", "r4"};

const std::vector<std::string> kResidualColumns = {"r1", "r2", "r3_product", "r3_sum", "r4"};

bool is_sweepable(const std::string& var) {
  static const char* fields[] = {"r", "eta0", "etaB", "etaA", "etaC", "nB", "nF", "nth"};
  for (auto* f : fields)
    if (var == f) return true;
  return false;
}

void bind(CircuitParams& p, const std::string& var, double v) {
  if (var == "r") p.r = v;
  else if (var == "eta0") p.eta0 = v;
  else if (var == "etaB") p.etaB = v;
  else if (var == "etaA") p.etaA = v;
  else if (var == "etaC") p.etaC = v;
  else if (var == "nB") p.nB = v;
  else if (var == "nF") p.nF = v;
  else if (var == "nth") { p.nB = v; p.nF = v; }
  else throw std::invalid_argument("sweep: unknown variable '" + var + "'");
}

double column_value(const std::string& tag, const QuantifierReport<double>& rep) {
  if (tag == "D_BA") return rep.D_BA;
  if (tag == "D_BC") return rep.D_BC;
  if (tag == "D_sum") return rep.D_BA + rep.D_BC;
  if (tag == "S_BA") return rep.S_BA;
  if (tag == "S_BC") return rep.S_BC;
  if (tag == "S_coll") return rep.S_collective;
  if (tag == "bound") return std::max(1.0, rep.S_collective);
  if (tag == "Ent_BA") return rep.Ent_BA;
  if (tag == "Ent_BC") return rep.Ent_BC;
  if (tag == "Ent_prod") return rep.Ent_BA * rep.Ent_BC;
  if (tag == "g_BA") return rep.g_BA;
  if (tag == "g_BC") return rep.g_BC;
  if (tag == "M_B") return rep.M_B;
  if (tag == "r1") return rep.residual_r1;
  if (tag == "r2") return rep.residual_r2;
  if (tag == "r3_product") return rep.residual_r3_product;
  if (tag == "r3_sum") return rep.residual_r3_sum;
  if (tag == "r4") return rep.residual_r4;
  throw std::invalid_argument("sweep: unknown column '" + tag + "'");
}

SweepSpec make_preset(const std::string& name, SweepTie tie, CircuitParams fixed,
                      const std::string& var, double start, double stop,
                      std::vector<std::string> outputs) {
  SweepSpec s;
  s.name = name;
  s.tie = tie;
  s.fixed = fixed;
  s.sweep_var = var;
  s.start = start;
  s.stop = stop;
  s.steps = 101;
  s.outputs = std::move(outputs);
  return s;
}

const std::vector<std::string> kDCols = {"D_BA", "D_BC", "D_sum", "S_coll", "bound"};
const std::vector<std::string> kEntCols = {"Ent_BA", "Ent_BC", "Ent_prod", "M_B",
                                           "g_BA", "g_BC", "S_coll"};

std::map<std::string, SweepSpec> build_presets() {
  std::map<std::string, SweepSpec> m;
  auto add = [&m](SweepSpec s) { m[s.name] = std::move(s); };
  CircuitParams p;

  // D-quantifier panels, no extra loss: r = 0.5 and r = 2 versus eta0.
  p = {};
  p.r = 0.5;
  add(make_preset("fig3a", SweepTie::none, p, "eta0", 0, 1, kDCols));
  p.r = 2.0;
  add(make_preset("fig3b", SweepTie::none, p, "eta0", 0, 1, kDCols));

  // Equal observed losses etaB = eta0.
  p = {};
  p.r = 0.5;
  add(make_preset("fig4a", SweepTie::equal_loss, p, "eta0", 0, 1, kDCols));
  p.r = 2.0;
  add(make_preset("fig4b", SweepTie::equal_loss, p, "eta0", 0, 1, kDCols));

  // Symmetric splitter, loss on B swept.
  p = {};
  p.r = 0.5;
  p.eta0 = 0.5;
  add(make_preset("fig5a", SweepTie::none, p, "etaB", 0, 1, kDCols));
  p.r = 2.0;
  add(make_preset("fig5b", SweepTie::none, p, "etaB", 0, 1, kDCols));

  // Extra losses on A and C at r = 2.
  p = {};
  p.r = 2.0;
  p.eta0 = 0.5;
  add(make_preset("fig6a", SweepTie::equal_ac, p, "etaA", 0, 1, kDCols));
  p.eta0 = 0.8;
  add(make_preset("fig6b", SweepTie::equal_ac, p, "etaA", 0, 1, kDCols));
  p.eta0 = 0.5;
  add(make_preset("fig6c", SweepTie::none, p, "etaA", 0, 1, kDCols));
  p.eta0 = 0.8;
  add(make_preset("fig6d", SweepTie::none, p, "etaA", 0, 1, kDCols));
  p.eta0 = 0.5;
  add(make_preset("fig6e", SweepTie::equal_ac, p, "etaA", 0, 1, {"S_coll", "bound"}));

  // Thermal seeds nth = nB = nF in [0,3] at r = 1 (axis range chosen here;
  // the panels fix eta0 at 0.2 / 0.5 / 0.8).
  p = {};
  p.r = 1.0;
  p.eta0 = 0.2;
  add(make_preset("fig7a", SweepTie::none, p, "nth", 0, 3, kDCols));
  p.eta0 = 0.5;
  add(make_preset("fig7b", SweepTie::none, p, "nth", 0, 3, kDCols));
  p.eta0 = 0.8;
  add(make_preset("fig7c", SweepTie::none, p, "nth", 0, 3, kDCols));

  // Ent-quantifier panels mirroring the D-panels.
  p = {};
  p.r = 0.5;
  add(make_preset("fig8a", SweepTie::none, p, "eta0", 0, 1, kEntCols));
  p.r = 2.0;
  add(make_preset("fig8b", SweepTie::none, p, "eta0", 0, 1, kEntCols));

  p = {};
  p.r = 0.5;
  add(make_preset("fig9a", SweepTie::equal_loss, p, "eta0", 0, 1, kEntCols));
  p.r = 2.0;
  add(make_preset("fig9b", SweepTie::equal_loss, p, "eta0", 0, 1, kEntCols));

  p = {};
  p.r = 2.0;
  p.eta0 = 0.5;
  add(make_preset("fig10a", SweepTie::none, p, "etaB", 0, 1, kEntCols));
  p.eta0 = 0.8;
  add(make_preset("fig10b", SweepTie::none, p, "etaB", 0, 1, kEntCols));

  p = {};
  p.r = 2.0;
  p.eta0 = 0.5;
  add(make_preset("fig11a", SweepTie::equal_ac, p, "etaA", 0, 1, kEntCols));
  p.eta0 = 0.8;
  add(make_preset("fig11b", SweepTie::equal_ac, p, "etaA", 0, 1, kEntCols));
  p.eta0 = 0.5;
  add(make_preset("fig11c", SweepTie::none, p, "etaA", 0, 1, kEntCols));
  p.eta0 = 0.8;
  add(make_preset("fig11d", SweepTie::none, p, "etaA", 0, 1, kEntCols));
  p.eta0 = 0.5;
  add(make_preset("fig11e", SweepTie::equal_ac, p, "etaA", 0, 1, {"g_BA", "g_BC"}));

  p = {};
  p.r = 1.0;
  p.eta0 = 0.8;
  add(make_preset("fig12a", SweepTie::none, p, "nth", 0, 3, kEntCols));
  p.eta0 = 0.5;
  add(make_preset("fig12b", SweepTie::none, p, "nth", 0, 3, kEntCols));

  // Bare figN aliases point at a canonical panel.
  const std::pair<const char*, const char*> aliases[] = {
      {"fig3", "fig3b"}, {"fig4", "fig4b"}, {"fig5", "fig5b"},  {"fig6", "fig6a"},
      {"fig7", "fig7b"}, {"fig8", "fig8b"}, {"fig9", "fig9b"},  {"fig10", "fig10a"},
      {"fig11", "fig11a"}, {"fig12", "fig12b"}};
  for (auto [alias, target] : aliases) {
    SweepSpec s = m.at(target);
    s.name = alias;
    m[alias] = std::move(s);
  }
  return m;
}

const std::map<std::string, SweepSpec>& presets() {
  static const std::map<std::string, SweepSpec> m = build_presets();
  return m;
}

}  // namespace

bool is_known_column(const std::string& tag) {
  return std::find(kColumns.begin(), kColumns.end(), tag) != kColumns.end() ||
         tag == "residuals";
}

void SweepSpec::validate() const {
  if (!is_sweepable(sweep_var))
    throw std::invalid_argument("sweep: '" + sweep_var + "' is not a sweepable field");
  if (steps < 2) throw std::invalid_argument("sweep: need at least 2 steps");
  if (!(start <= stop)) throw std::invalid_argument("sweep: start must not exceed stop");
  if (outputs.empty()) throw std::invalid_argument("sweep: no output columns requested");
  for (const auto& tag : outputs)
    if (!is_known_column(tag))
      throw std::invalid_argument("sweep: unknown column '" + tag + "'");
  // Range must stay inside the field's domain; the per-row validate() would
  // catch it anyway, but failing early gives a better message.
  CircuitParams probe = fixed;
  bind(probe, sweep_var, start);
  probe.validate();
  bind(probe, sweep_var, stop);
  probe.validate();
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[48];
  if (std::abs(x) < 1e-4)
    std::snprintf(buf, sizeof(buf), "%.11e", x);
  else
    std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

SweepSpec spec_from_json(const nlohmann::json& j) {
  SweepSpec s;
  s.name = j.value("scenario", std::string("custom"));
  const std::string tie = j.value("tie", std::string("none"));
  if (tie == "none") s.tie = SweepTie::none;
  else if (tie == "equal_loss") s.tie = SweepTie::equal_loss;
  else if (tie == "equal_ac") s.tie = SweepTie::equal_ac;
  else throw std::invalid_argument("sweep: unknown tie '" + tie + "'");
  if (j.contains("fixed")) {
    nlohmann::json fx = j.at("fixed");
    if (!fx.contains("r")) fx["r"] = 0.0;
    if (!fx.contains("eta0")) fx["eta0"] = 0.5;
    s.fixed = params_from_json(fx);
  }
  s.sweep_var = j.at("sweep_var").get<std::string>();
  const auto& range = j.at("range");
  s.start = range.at(0).get<double>();
  s.stop = range.at(1).get<double>();
  s.steps = range.at(2).get<int>();
  s.outputs = j.at("outputs").get<std::vector<std::string>>();
  s.validate();
  return s;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, spec] : presets()) names.push_back(name);
  return names;
}

SweepSpec preset(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end())
    throw std::invalid_argument("unknown preset '" + name + "'");
  return it->second;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepResult result;
  result.spec = spec;
  for (const auto& tag : spec.outputs) {
    if (tag == "residuals")
      result.columns.insert(result.columns.end(), kResidualColumns.begin(),
                            kResidualColumns.end());
    else
      result.columns.push_back(tag);
  }
  result.rows.reserve(static_cast<std::size_t>(spec.steps));
  for (int i = 0; i < spec.steps; ++i) {
    const double v = spec.start + (spec.stop - spec.start) * i / (spec.steps - 1);
    CircuitParams p = spec.fixed;
    bind(p, spec.sweep_var, v);
    if (spec.tie == SweepTie::equal_loss) p.etaB = p.eta0;
    if (spec.tie == SweepTie::equal_ac) p.etaC = p.etaA;
    const auto state = build_circuit(p);
    const auto rep = check_monogamy(state, 0, 1, 2, /*optimize_angles=*/true);
    SweepRow row;
    row.value = v;
    row.columns.reserve(result.columns.size());
    for (const auto& tag : result.columns) row.columns.push_back(column_value(tag, rep));
    result.rows.push_back(std::move(row));
  }
  return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  out << result.spec.sweep_var;
  for (const auto& c : result.columns) out << ',' << c;
  out << '\n';
  for (const auto& row : result.rows) {
    out << format_number(row.value);
    for (double v : row.columns) out << ',' << format_number(v);
    out << '\n';
  }
}

}  // namespace cvmono
