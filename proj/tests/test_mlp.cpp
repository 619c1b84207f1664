#include <cmath>

#include "doctest.h"
#include "thermolearn/mlp.hpp"
#include "thermolearn/rng.hpp"

using namespace thermo;
using nets::Activation;
using nets::MlpArchitecture;
using nets::MlpModel;

namespace {

// Independent forward pass, written against the documented parameter layout
// (per layer: weights row-major out x in, then biases) with explicit loops.
std::vector<double> oracle_forward(const MlpArchitecture& arch,
                                   const std::vector<double>& params,
                                   std::vector<double> x) {
  std::size_t pos = 0;
  std::vector<int> dims;
  dims.push_back(arch.input_dim);
  for (int h : arch.hidden) dims.push_back(h);
  dims.push_back(arch.output_dim);
  for (std::size_t layer = 0; layer + 1 < dims.size(); ++layer) {
    const int in = dims[layer], out = dims[layer + 1];
    std::vector<double> y(out);
    for (int o = 0; o < out; ++o) {
      double acc = 0.0;
      for (int i = 0; i < in; ++i) acc += params[pos + o * in + i] * x[i];
      acc += params[pos + in * out + o];
      if (layer + 2 < dims.size()) {
        acc = arch.activation == Activation::kSigmoid
                  ? 1.0 / (1.0 + std::exp(-acc))
                  : std::tanh(acc);
      }
      y[o] = acc;
    }
    pos += static_cast<std::size_t>(in + 1) * out;
    x = y;
  }
  return x;
}

}  // namespace

TEST_CASE("param_count matches the stock experiment network sizes") {
  CHECK(nets::param_count({4, {24, 24, 24}, 1, Activation::kSigmoid}) == 1345);
  CHECK(nets::param_count({4, {24, 24, 24}, 6, Activation::kSigmoid}) == 1470);
  CHECK(nets::param_count({1, {}, 1, Activation::kSigmoid}) == 2);
}

TEST_CASE("zero parameters give zero output") {
  MlpArchitecture arch{3, {4, 4}, 2, Activation::kSigmoid};
  MlpModel m{arch, Vec(nets::param_count(arch), 0.0)};
  auto y = nets::mlp_forward(m, std::vector<double>{1.0, -2.0, 0.5});
  // Hidden sigmoids saturate at 1/2 but the zero output layer kills them.
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.0);
}

TEST_CASE("single affine neuron is the identity for w=1, b=0") {
  MlpArchitecture arch{1, {}, 1, Activation::kSigmoid};
  MlpModel m{arch, {1.0, 0.0}};
  for (double x : {-2.0, 0.0, 3.25})
    CHECK(nets::mlp_forward(m, std::vector<double>{x})[0] ==
          doctest::Approx(x));
}

TEST_CASE("seeded 4->24^3->1 forward matches an independent re-implementation") {
  MlpArchitecture arch{4, {24, 24, 24}, 1, Activation::kSigmoid};
  Rng rng(123);
  MlpModel m = nets::init_mlp(arch, rng);
  REQUIRE(static_cast<int>(m.params.size()) == 1345);

  for (auto& x : std::vector<std::vector<double>>{
           {0.0, 0.0, 0.0, 0.0}, {0.5, -0.5, 0.8951, 0.7926}}) {
    const double got = nets::mlp_forward(m, x)[0];
    const double want = oracle_forward(arch, m.params, x)[0];
    CHECK(std::fabs(got - want) < 1e-12);
  }
}

TEST_CASE("mlp_forward rejects wrong input or parameter length") {
  MlpArchitecture arch{2, {3}, 1, Activation::kSigmoid};
  MlpModel m{arch, Vec(nets::param_count(arch), 0.1)};
  CHECK_THROWS_AS(nets::mlp_forward(m, std::vector<double>{1.0}),
                  ArityMismatch);
  m.params.pop_back();
  CHECK_THROWS_AS(nets::mlp_forward(m, std::vector<double>{1.0, 2.0}),
                  ArityMismatch);
}

TEST_CASE("tanh activation is honored") {
  MlpArchitecture arch{1, {1}, 1, Activation::kTanh};
  // hidden: w=2, b=0; output: w=1, b=0 -> y = tanh(2x)
  MlpModel m{arch, {2.0, 0.0, 1.0, 0.0}};
  CHECK(nets::mlp_forward(m, std::vector<double>{0.3})[0] ==
        doctest::Approx(std::tanh(0.6)));
}
