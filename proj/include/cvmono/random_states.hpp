#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cvmono/gaussian_state.hpp"
#include "cvmono/network.hpp"
#include "cvmono/rng.hpp"

// Reproducible random physical states. A state is described by a recipe
// (thermal seeds plus a list of layer descriptors); the recipe serializes to
// JSON and rebuilds the exact state, so any anomaly found while fuzzing can
// be replayed from its printed recipe.

namespace cvmono {

struct LayerTms {
  int i = 0, j = 1;
  double r = 0;
};
struct LayerBeamsplitter {
  int i = 0, j = 1;
  double eta = 1;
};
struct LayerPhase {
  int mode = 0;
  double theta = 0;
};
struct LayerLoss {
  int mode = 0;
  double eta = 1;
};

using Layer = std::variant<LayerTms, LayerBeamsplitter, LayerPhase, LayerLoss>;

struct StateRecipe {
  int num_modes = 0;
  std::vector<double> occupations;  // thermal seeds, one per mode
  std::vector<Layer> layers;
};

inline nlohmann::json recipe_to_json(const StateRecipe& r) {
  nlohmann::json layers = nlohmann::json::array();
  layers.push_back({{"op", "thermal"}, {"occupations", r.occupations}});
  for (const auto& l : r.layers) {
    if (const auto* t = std::get_if<LayerTms>(&l))
      layers.push_back({{"op", "tms"}, {"i", t->i}, {"j", t->j}, {"r", t->r}});
    else if (const auto* b = std::get_if<LayerBeamsplitter>(&l))
      layers.push_back({{"op", "beamsplitter"}, {"i", b->i}, {"j", b->j}, {"eta", b->eta}});
    else if (const auto* p = std::get_if<LayerPhase>(&l))
      layers.push_back({{"op", "phase"}, {"mode", p->mode}, {"theta", p->theta}});
    else if (const auto* q = std::get_if<LayerLoss>(&l))
      layers.push_back({{"op", "loss"}, {"mode", q->mode}, {"eta", q->eta}});
  }
  return layers;
}

inline StateRecipe recipe_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("recipe: expected a JSON array");
  StateRecipe r;
  const auto& first = j.at(0);
  if (first.at("op") != "thermal")
    throw std::invalid_argument("recipe: first layer must be 'thermal'");
  r.occupations = first.at("occupations").get<std::vector<double>>();
  r.num_modes = static_cast<int>(r.occupations.size());
  for (std::size_t k = 1; k < j.size(); ++k) {
    const auto& l = j.at(k);
    const std::string op = l.at("op").get<std::string>();
    if (op == "tms")
      r.layers.push_back(LayerTms{l.at("i").get<int>(), l.at("j").get<int>(),
                                  l.at("r").get<double>()});
    else if (op == "beamsplitter")
      r.layers.push_back(LayerBeamsplitter{l.at("i").get<int>(), l.at("j").get<int>(),
                                           l.at("eta").get<double>()});
    else if (op == "phase")
      r.layers.push_back(LayerPhase{l.at("mode").get<int>(), l.at("theta").get<double>()});
    else if (op == "loss")
      r.layers.push_back(LayerLoss{l.at("mode").get<int>(), l.at("eta").get<double>()});
    else
      throw std::invalid_argument("recipe: unknown op '" + op + "'");
  }
  return r;
}

/// Replays a recipe at any scalar precision. Layer parameters are doubles;
/// the transforms themselves run in Scalar, so a long double build recovers
/// the squeezed directions that a double covariance cannot resolve.
template <typename Scalar = double>
GaussianState<Scalar> build_recipe(const StateRecipe& r) {
  std::vector<Scalar> occ(r.occupations.begin(), r.occupations.end());
  GaussianState<Scalar> s = thermal_product(occ);
  for (const auto& l : r.layers) {
    if (const auto* t = std::get_if<LayerTms>(&l))
      s = apply_two_mode_squeeze(s, t->i, t->j, Scalar(t->r));
    else if (const auto* b = std::get_if<LayerBeamsplitter>(&l))
      s = apply_beamsplitter(s, b->i, b->j, Scalar(b->eta));
    else if (const auto* p = std::get_if<LayerPhase>(&l))
      s = apply_phase_rotation(s, p->mode, Scalar(p->theta));
    else if (const auto* q = std::get_if<LayerLoss>(&l))
      s = apply_loss(s, q->mode, Scalar(q->eta));
  }
  return s;
}

/// Thermal product (occupations ~ Exp(mean 1)) followed by `depth` random
/// layers drawn from {two-mode squeeze r in [-2,2], beam splitter eta in
/// [0,1], phase in [0,2pi), loss eta in [0.1,1]}. The loss floor keeps
/// trivially decoupled states from dominating the sample.
inline StateRecipe random_recipe(int num_modes, std::uint64_t seed, int depth) {
  if (num_modes < 2) throw std::invalid_argument("random_recipe: need at least two modes");
  if (depth < 0) throw std::invalid_argument("random_recipe: negative depth");
  rng::Stream st(seed);
  StateRecipe r;
  r.num_modes = num_modes;
  r.occupations.resize(static_cast<std::size_t>(num_modes));
  for (auto& o : r.occupations) o = st.exponential();
  for (int layer = 0; layer < depth; ++layer) {
    const auto op = st.integer(4);
    const int i = static_cast<int>(st.integer(num_modes));
    int j = static_cast<int>(st.integer(num_modes - 1));
    if (j >= i) ++j;
    switch (op) {
      case 0: r.layers.push_back(LayerTms{i, j, st.uniform(-2.0, 2.0)}); break;
      case 1: r.layers.push_back(LayerBeamsplitter{i, j, st.uniform(0.0, 1.0)}); break;
      case 2:
        r.layers.push_back(LayerPhase{i, st.uniform(0.0, 6.283185307179586476925286766559)});
        break;
      default: r.layers.push_back(LayerLoss{i, st.uniform(0.1, 1.0)}); break;
    }
  }
  return r;
}

inline GaussianState<double> random_physical_state(int num_modes, std::uint64_t seed,
                                                   int depth) {
  return build_recipe(random_recipe(num_modes, seed, depth));
}

/// Recipe equivalent of build_circuit, for injecting network states into
/// recipe-driven runs.
inline StateRecipe circuit_recipe(const CircuitParams& p) {
  p.validate();
  StateRecipe r;
  r.num_modes = 3;
  r.occupations = {p.nB, p.nF, 0.0};
  r.layers.push_back(LayerTms{0, 1, p.r});
  r.layers.push_back(LayerLoss{0, p.etaB});
  r.layers.push_back(LayerBeamsplitter{1, 2, p.eta0});
  r.layers.push_back(LayerPhase{2, 3.1415926535897932384626433832795});
  r.layers.push_back(LayerLoss{1, p.etaA});
  r.layers.push_back(LayerLoss{2, p.etaC});
  return r;
}

}  // namespace cvmono
