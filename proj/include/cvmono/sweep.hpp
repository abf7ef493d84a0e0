#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvmono/network.hpp"

// Parameter sweeps over the network, emitted as byte-deterministic CSV.
// Presets named after commonly plotted panels (fig3a, fig8b, ...) bundle the
// parameter choices used throughout the library's documentation.

namespace cvmono {

/// Ties applied while sweeping: equal_loss locks etaB to eta0, equal_ac
/// locks etaC to etaA. "none" sweeps exactly one field.
enum class SweepTie { none, equal_loss, equal_ac };

struct SweepSpec {
  std::string name = "custom";
  SweepTie tie = SweepTie::none;
  CircuitParams fixed;
  std::string sweep_var;  // r | eta0 | etaB | etaA | etaC | nB | nF | nth
  double start = 0, stop = 1;
  int steps = 101;
  std::vector<std::string> outputs;  // column tags

  void validate() const;
};

/// Column tags understood by sweeps: D_BA D_BC D_sum S_BA S_BC S_coll bound
/// Ent_BA Ent_BC Ent_prod g_BA g_BC M_B r1 r2 r3_product r3_sum r4; the tag
/// "residuals" expands to the five residual columns.
bool is_known_column(const std::string& tag);

/// 12-significant-digit formatting, scientific below 1e-4 in magnitude.
std::string format_number(double x);

SweepSpec spec_from_json(const nlohmann::json& j);

/// All bundled preset names, in a stable order.
std::vector<std::string> preset_names();

/// Throws std::invalid_argument for unknown names.
SweepSpec preset(const std::string& name);

struct SweepRow {
  double value = 0;
  std::vector<double> columns;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<std::string> columns;  // expanded tags
  std::vector<SweepRow> rows;
};

SweepResult run_sweep(const SweepSpec& spec);

void write_csv(const SweepResult& result, std::ostream& out);

}  // namespace cvmono
