#pragma once

#include <functional>
#include <span>
#include <vector>

#include "thermolearn/tape.hpp"

namespace thermo::ad {

/// A twice-differentiable scalar field (params, x) -> real, expressed in the
/// tape's closed primitive set. Evaluation must be pure.
struct DiffScalarField {
  int arity = 0;
  std::function<Var(Tape&, std::span<const Var> params, std::span<const Var> x)>
      eval;
};

/// A scalar loss over parameters, typically assembled from grad_input
/// results of one or more DiffScalarFields.
using ParamLoss = std::function<Var(Tape&, std::span<const Var> params)>;

/// Exact input gradient of f at (params, x); not a finite-difference estimate.
std::vector<double> grad_input(const DiffScalarField& f,
                               std::span<const double> params,
                               std::span<const double> x);

/// Exact parameter gradient of a loss built from supported primitives,
/// including losses that contain first derivatives of fields.
std::vector<double> grad_params(const ParamLoss& loss,
                                std::span<const double> params);

/// Recorded input gradient for composing losses on an existing tape.
std::vector<Var> grad_input_vars(Tape& tape, const DiffScalarField& f,
                                 std::span<const Var> params,
                                 std::span<const Var> x);

}  // namespace thermo::ad
