#pragma once

#include <span>
#include <string>
#include <vector>

#include "thermolearn/errors.hpp"
#include "thermolearn/linalg.hpp"
#include "thermolearn/rng.hpp"
#include "thermolearn/tape.hpp"

namespace thermo::nets {

enum class Activation { kSigmoid, kTanh };

Activation activation_from_name(const std::string& name);
std::string activation_name(Activation a);

struct MlpArchitecture {
  int input_dim = 1;
  std::vector<int> hidden;
  int output_dim = 1;
  Activation activation = Activation::kSigmoid;
};

/// Trainable parameter count including biases: sum over layers of (in+1)*out.
int param_count(const MlpArchitecture& arch);

struct MlpModel {
  MlpArchitecture arch;
  Vec params;  // per layer: weights row-major (out x in), then biases
};

// Affine -> activation per hidden layer, final layer affine. Written once for
// both plain doubles and tape variables.
template <class S>
std::vector<S> mlp_forward_t(const MlpArchitecture& arch,
                             std::span<const S> params, std::span<const S> x) {
  if (static_cast<int>(x.size()) != arch.input_dim)
    throw ArityMismatch("mlp_forward: expected " +
                        std::to_string(arch.input_dim) + " inputs, got " +
                        std::to_string(x.size()));
  if (static_cast<int>(params.size()) != param_count(arch))
    throw ArityMismatch("mlp_forward: expected " +
                        std::to_string(param_count(arch)) + " params, got " +
                        std::to_string(params.size()));

  std::vector<S> cur(x.begin(), x.end());
  std::vector<S> next;
  std::size_t off = 0;
  const std::size_t n_layers = arch.hidden.size() + 1;
  int in_dim = arch.input_dim;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const bool last = (l == n_layers - 1);
    const int out_dim = last ? arch.output_dim : arch.hidden[l];
    next.clear();
    next.reserve(out_dim);
    for (int o = 0; o < out_dim; ++o) {
      S acc = params[off + in_dim * out_dim + o];  // bias
      for (int i = 0; i < in_dim; ++i)
        acc = acc + params[off + o * in_dim + i] * cur[i];
      if (!last)
        acc = (arch.activation == Activation::kSigmoid) ? ad::sigmoid(acc)
                                                        : ad::tanh(acc);
      next.push_back(acc);
    }
    off += static_cast<std::size_t>(in_dim + 1) * out_dim;
    cur.swap(next);
    in_dim = out_dim;
  }
  return cur;
}

Vec mlp_forward(const MlpModel& m, std::span<const double> x);

std::vector<ad::Var> mlp_forward(ad::Tape& tape, const MlpArchitecture& arch,
                                 std::span<const ad::Var> params,
                                 std::span<const ad::Var> x);

/// Glorot-uniform weights (r = sqrt(6/(fan_in+fan_out))), zero biases.
MlpModel init_mlp(const MlpArchitecture& arch, Rng& rng, double scale = 1.0);

}  // namespace thermo::nets
