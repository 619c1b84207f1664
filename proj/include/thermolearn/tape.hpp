#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "thermolearn/errors.hpp"

namespace thermo::ad {

// Closed primitive set. Extending it requires a paired derivative rule in
// both reverse sweeps plus a finite-difference test (see test_tape.cpp).
enum class Op : std::uint8_t {
  kConst,
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kExp,
  kLog,
  kSqrt,
  kTanh,
  kSigmoid,
};

class Tape;

/// Handle to one tape node. Valid until the owning tape is rewound past it.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::int32_t index) : tape_(tape), index_(index) {}

  Tape* tape() const { return tape_; }
  std::int32_t index() const { return index_; }
  bool valid() const { return tape_ != nullptr && index_ >= 0; }
  double value() const;

 private:
  Tape* tape_ = nullptr;
  std::int32_t index_ = -1;
};

// Recording tape for exact reverse-mode differentiation. The backward sweep
// can itself be recorded (gradient()), so expressions containing first
// derivatives of other expressions stay differentiable; gradient_values()
// is the plain terminal sweep.
class Tape {
 public:
  Tape() { reserve(1 << 12); }

  void reserve(std::size_t n) {
    ops_.reserve(n);
    arg_a_.reserve(n);
    arg_b_.reserve(n);
    vals_.reserve(n);
  }

  std::size_t size() const { return ops_.size(); }
  std::size_t mark() const { return ops_.size(); }

  /// Truncate back to a previous mark(); capacity is kept.
  void rewind(std::size_t m) {
    ops_.resize(m);
    arg_a_.resize(m);
    arg_b_.resize(m);
    vals_.resize(m);
  }

  void clear() { rewind(0); }

  Var leaf(double v) { return record(Op::kLeaf, -1, -1, v); }
  Var constant(double v) { return record(Op::kConst, -1, -1, v); }

  std::vector<Var> leaves(std::span<const double> values) {
    std::vector<Var> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(leaf(v));
    return out;
  }

  double value(Var v) const { return vals_[v.index()]; }

  /// Overwrite a leaf's value. Downstream nodes are stale until re-recorded;
  /// only meant for leaves created immediately before re-recording.
  void set_leaf(Var v, double value) { vals_[v.index()] = value; }

  Var record(Op op, std::int32_t a, std::int32_t b, double value) {
    ops_.push_back(op);
    arg_a_.push_back(a);
    arg_b_.push_back(b);
    vals_.push_back(value);
    return Var(this, static_cast<std::int32_t>(ops_.size()) - 1);
  }

  /// d(y)/d(wrt), recorded as new tape nodes (differentiable again).
  /// Entries of wrt that do not influence y come back as constant 0.
  std::vector<Var> gradient(Var y, std::span<const Var> wrt);

  /// d(y)/d(wrt) as plain numbers; nothing is recorded.
  std::vector<double> gradient_values(Var y, std::span<const Var> wrt);

 private:
  std::vector<Op> ops_;
  std::vector<std::int32_t> arg_a_, arg_b_;
  std::vector<double> vals_;
  // Scratch buffers reused across sweeps.
  std::vector<std::int32_t> adj_var_;
  std::vector<double> adj_val_;
};

inline double Var::value() const { return tape_->value(*this); }

namespace detail {
inline Tape* tape_of(Var a, Var b) { return a.valid() ? a.tape() : b.tape(); }
}  // namespace detail

inline Var operator+(Var a, Var b) {
  return a.tape()->record(Op::kAdd, a.index(), b.index(),
                          a.value() + b.value());
}
inline Var operator-(Var a, Var b) {
  return a.tape()->record(Op::kSub, a.index(), b.index(),
                          a.value() - b.value());
}
inline Var operator*(Var a, Var b) {
  return a.tape()->record(Op::kMul, a.index(), b.index(),
                          a.value() * b.value());
}
inline Var operator/(Var a, Var b) {
  return a.tape()->record(Op::kDiv, a.index(), b.index(),
                          a.value() / b.value());
}
inline Var operator-(Var a) {
  return a.tape()->record(Op::kNeg, a.index(), -1, -a.value());
}

inline Var operator+(Var a, double c) { return a + a.tape()->constant(c); }
inline Var operator+(double c, Var a) { return a.tape()->constant(c) + a; }
inline Var operator-(Var a, double c) { return a - a.tape()->constant(c); }
inline Var operator-(double c, Var a) { return a.tape()->constant(c) - a; }
inline Var operator*(Var a, double c) { return a * a.tape()->constant(c); }
inline Var operator*(double c, Var a) { return a.tape()->constant(c) * a; }
inline Var operator/(Var a, double c) { return a / a.tape()->constant(c); }
inline Var operator/(double c, Var a) { return a.tape()->constant(c) / a; }

inline Var exp(Var a) {
  return a.tape()->record(Op::kExp, a.index(), -1, std::exp(a.value()));
}
inline Var log(Var a) {
  return a.tape()->record(Op::kLog, a.index(), -1, std::log(a.value()));
}
inline Var sqrt(Var a) {
  return a.tape()->record(Op::kSqrt, a.index(), -1, std::sqrt(a.value()));
}
inline Var tanh(Var a) {
  return a.tape()->record(Op::kTanh, a.index(), -1, std::tanh(a.value()));
}
inline Var sigmoid(Var a) {
  return a.tape()->record(Op::kSigmoid, a.index(), -1,
                          1.0 / (1.0 + std::exp(-a.value())));
}
inline Var square(Var a) { return a * a; }

// double twins so numeric kernels can be written once and instantiated for
// either scalar type.
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double square(double x) { return x * x; }
using std::exp;
using std::log;
using std::sqrt;
using std::tanh;

inline double value_of(double x) { return x; }
inline double value_of(Var x) { return x.value(); }

}  // namespace thermo::ad
