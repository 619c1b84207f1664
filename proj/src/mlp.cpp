#include "thermolearn/mlp.hpp"

#include <cmath>

namespace thermo::nets {

Activation activation_from_name(const std::string& name) {
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "tanh") return Activation::kTanh;
  throw UnsupportedPrimitive("unknown activation: " + name);
}

std::string activation_name(Activation a) {
  return a == Activation::kSigmoid ? "sigmoid" : "tanh";
}

int param_count(const MlpArchitecture& arch) {
  int count = 0;
  int in_dim = arch.input_dim;
  for (int h : arch.hidden) {
    count += (in_dim + 1) * h;
    in_dim = h;
  }
  count += (in_dim + 1) * arch.output_dim;
  return count;
}

Vec mlp_forward(const MlpModel& m, std::span<const double> x) {
  return mlp_forward_t<double>(m.arch, m.params, x);
}

std::vector<ad::Var> mlp_forward(ad::Tape& tape, const MlpArchitecture& arch,
                                 std::span<const ad::Var> params,
                                 std::span<const ad::Var> x) {
  (void)tape;  // all operands already live on the callers' tape
  return mlp_forward_t<ad::Var>(arch, params, x);
}

MlpModel init_mlp(const MlpArchitecture& arch, Rng& rng, double scale) {
  MlpModel m;
  m.arch = arch;
  m.params.assign(param_count(arch), 0.0);
  std::size_t off = 0;
  int in_dim = arch.input_dim;
  const std::size_t n_layers = arch.hidden.size() + 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int out_dim =
        (l == n_layers - 1) ? arch.output_dim : arch.hidden[l];
    const double r = scale * std::sqrt(6.0 / (in_dim + out_dim));
    for (int i = 0; i < in_dim * out_dim; ++i)
      m.params[off + i] = rng.uniform(-r, r);
    // biases stay zero
    off += static_cast<std::size_t>(in_dim + 1) * out_dim;
    in_dim = out_dim;
  }
  return m;
}

}  // namespace thermo::nets
