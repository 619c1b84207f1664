#include "thermolearn/diff_field.hpp"

#include <string>

namespace thermo::ad {

std::vector<Var> grad_input_vars(Tape& tape, const DiffScalarField& f,
                                 std::span<const Var> params,
                                 std::span<const Var> x) {
  if (static_cast<int>(x.size()) != f.arity)
    throw ArityMismatch("grad_input: field arity " + std::to_string(f.arity) +
                        ", got " + std::to_string(x.size()) + " inputs");
  Var y = f.eval(tape, params, x);
  return tape.gradient(y, x);
}

std::vector<double> grad_input(const DiffScalarField& f,
                               std::span<const double> params,
                               std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.arity)
    throw ArityMismatch("grad_input: field arity " + std::to_string(f.arity) +
                        ", got " + std::to_string(x.size()) + " inputs");
  Tape tape;
  auto pv = tape.leaves(params);
  auto xv = tape.leaves(x);
  Var y = f.eval(tape, pv, xv);
  return tape.gradient_values(y, xv);
}

std::vector<double> grad_params(const ParamLoss& loss,
                                std::span<const double> params) {
  Tape tape;
  auto pv = tape.leaves(params);
  Var y = loss(tape, pv);
  return tape.gradient_values(y, pv);
}

}  // namespace thermo::ad
