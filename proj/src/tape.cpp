#include "thermolearn/tape.hpp"

#include <algorithm>

namespace thermo::ad {

namespace {
constexpr std::int32_t kNone = -1;
}

std::vector<Var> Tape::gradient(Var y, std::span<const Var> wrt) {
  const std::int32_t top = y.index();
  // Adjoints held as node indices so the sweep itself lands on the tape.
  adj_var_.assign(top + 1, kNone);
  adj_var_[top] = constant(1.0).index();

  auto var_at = [this](std::int32_t i) { return Var(this, i); };
  auto accumulate = [&](std::int32_t node, Var contrib) {
    if (node > top) return;  // only nodes in the original range matter
    if (adj_var_[node] == kNone) {
      adj_var_[node] = contrib.index();
    } else {
      adj_var_[node] = (var_at(adj_var_[node]) + contrib).index();
    }
  };

  for (std::int32_t i = top; i >= 0; --i) {
    if (adj_var_[i] == kNone) continue;
    const Var zbar = var_at(adj_var_[i]);
    const std::int32_t a = arg_a_[i];
    const std::int32_t b = arg_b_[i];
    switch (ops_[i]) {
      case Op::kConst:
      case Op::kLeaf:
        break;
      case Op::kAdd:
        accumulate(a, zbar);
        accumulate(b, zbar);
        break;
      case Op::kSub:
        accumulate(a, zbar);
        accumulate(b, -zbar);
        break;
      case Op::kMul:
        accumulate(a, zbar * var_at(b));
        accumulate(b, zbar * var_at(a));
        break;
      case Op::kDiv: {
        Var t = zbar / var_at(b);
        accumulate(a, t);
        accumulate(b, -(t * var_at(i)));
        break;
      }
      case Op::kNeg:
        accumulate(a, -zbar);
        break;
      case Op::kExp:
        accumulate(a, zbar * var_at(i));
        break;
      case Op::kLog:
        accumulate(a, zbar / var_at(a));
        break;
      case Op::kSqrt:
        accumulate(a, zbar / (2.0 * var_at(i)));
        break;
      case Op::kTanh: {
        Var z = var_at(i);
        accumulate(a, zbar * (1.0 - z * z));
        break;
      }
      case Op::kSigmoid: {
        Var z = var_at(i);
        accumulate(a, zbar * (z * (1.0 - z)));
        break;
      }
    }
  }

  std::vector<Var> out;
  out.reserve(wrt.size());
  for (Var w : wrt) {
    const std::int32_t adj =
        (w.index() <= top) ? adj_var_[w.index()] : kNone;
    out.push_back(adj == kNone ? constant(0.0) : var_at(adj));
  }
  return out;
}

std::vector<double> Tape::gradient_values(Var y, std::span<const Var> wrt) {
  const std::int32_t top = y.index();
  adj_val_.assign(top + 1, 0.0);
  adj_val_[top] = 1.0;

  for (std::int32_t i = top; i >= 0; --i) {
    const double zbar = adj_val_[i];
    if (zbar == 0.0) continue;
    const std::int32_t a = arg_a_[i];
    const std::int32_t b = arg_b_[i];
    switch (ops_[i]) {
      case Op::kConst:
      case Op::kLeaf:
        break;
      case Op::kAdd:
        adj_val_[a] += zbar;
        adj_val_[b] += zbar;
        break;
      case Op::kSub:
        adj_val_[a] += zbar;
        adj_val_[b] -= zbar;
        break;
      case Op::kMul:
        adj_val_[a] += zbar * vals_[b];
        adj_val_[b] += zbar * vals_[a];
        break;
      case Op::kDiv: {
        const double t = zbar / vals_[b];
        adj_val_[a] += t;
        adj_val_[b] -= t * vals_[i];
        break;
      }
      case Op::kNeg:
        adj_val_[a] -= zbar;
        break;
      case Op::kExp:
        adj_val_[a] += zbar * vals_[i];
        break;
      case Op::kLog:
        adj_val_[a] += zbar / vals_[a];
        break;
      case Op::kSqrt:
        adj_val_[a] += zbar / (2.0 * vals_[i]);
        break;
      case Op::kTanh: {
        const double z = vals_[i];
        adj_val_[a] += zbar * (1.0 - z * z);
        break;
      }
      case Op::kSigmoid: {
        const double z = vals_[i];
        adj_val_[a] += zbar * z * (1.0 - z);
        break;
      }
    }
  }

  std::vector<double> out;
  out.reserve(wrt.size());
  for (Var w : wrt)
    out.push_back(w.index() <= top ? adj_val_[w.index()] : 0.0);
  return out;
}

}  // namespace thermo::ad
