#pragma once

#include <string>

#include "oceancast/autodiff.hpp"

namespace ocean {

enum class Activation { Silu, Relu, Linear };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation a);

// MLP shape: `hidden_layers` blocks of affine+activation, an affine output
// layer, and optionally a final layer normalization.
struct MlpSpec {
  int in = 0;
  int hidden = 192;
  int out = 192;
  int hidden_layers = 1;
  bool final_layer_norm = true;
  Activation activation = Activation::Silu;
};

// Registers the MLP's parameters under `prefix` (idempotent-unfriendly:
// call once per prefix).
template <class T>
void create_mlp_params(ParamStore<T>& store, const std::string& prefix, const MlpSpec& spec) {
  if (spec.in <= 0 || spec.hidden <= 0 || spec.out <= 0 || spec.hidden_layers < 0)
    throw ConfigError("MlpSpec: widths must be positive");
  int width = spec.in;
  for (int l = 0; l < spec.hidden_layers; ++l) {
    store.add(prefix + "/w" + std::to_string(l), width, spec.hidden, ParamInit::TruncNormalFanIn);
    store.add(prefix + "/b" + std::to_string(l), 1, spec.hidden, ParamInit::Zero);
    width = spec.hidden;
  }
  store.add(prefix + "/wout", width, spec.out, ParamInit::TruncNormalFanIn);
  store.add(prefix + "/bout", 1, spec.out, ParamInit::Zero);
  if (spec.final_layer_norm) {
    store.add(prefix + "/ln_g", 1, spec.out, ParamInit::One);
    store.add(prefix + "/ln_b", 1, spec.out, ParamInit::Zero);
  }
}

template <class T>
int mlp_forward(Tape<T>& tape, const std::string& prefix, const MlpSpec& spec, int input) {
  if (tape.value(input).cols != spec.in)
    throw NumericError("mlp_forward: input width mismatch for " + prefix);
  int h = input;
  for (int l = 0; l < spec.hidden_layers; ++l) {
    h = tape.affine(h, tape.param(prefix + "/w" + std::to_string(l)),
                    tape.param(prefix + "/b" + std::to_string(l)));
    switch (spec.activation) {
      case Activation::Silu: h = tape.silu(h); break;
      case Activation::Relu: h = tape.relu(h); break;
      case Activation::Linear: break;
    }
  }
  h = tape.affine(h, tape.param(prefix + "/wout"), tape.param(prefix + "/bout"));
  if (spec.final_layer_norm)
    h = tape.layer_norm(h, tape.param(prefix + "/ln_g"), tape.param(prefix + "/ln_b"));
  return h;
}

}  // namespace ocean
