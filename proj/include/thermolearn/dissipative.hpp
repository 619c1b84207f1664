#pragma once

#include <span>
#include <vector>

#include "thermolearn/linalg.hpp"
#include "thermolearn/mlp.hpp"
#include "thermolearn/tape.hpp"

namespace thermo::nets {

/// Sum of c_ij * E_ij over i<j in lexicographic order, where E_ij carries +1
/// at (i,j) and -1 at (j,i). c must have n(n-1)/2 entries.
Mat skew_from_coords(std::span<const double> c, int n);

/// exp(A) for antisymmetric A: Rodrigues for n=3, closed form for n<=2,
/// scaled Taylor/squaring otherwise. Result is orthogonal with det +1.
Mat orthogonal_exp(const Mat& a);

// Force network whose outputs parameterize S = Q diag(fbar^2) Q^T and
// F = -S v, so F.v <= 0 holds for every parameter vector. The first
// n(n-1)/2 net outputs are the so(n) coordinates of Q, the next n are fbar;
// the optional antisymmetric head adds n(n-1)/2 more outputs A_ij and the
// force becomes -(S+A) v (unused by both stock systems).
struct DissipativeForceModel {
  MlpModel net;
  int n = 1;
  bool antisymmetric_part = false;

  int expected_outputs() const {
    return n * (n + 1) / 2 + (antisymmetric_part ? n * (n - 1) / 2 : 0);
  }
};

Vec dissipative_force(const DissipativeForceModel& m,
                      std::span<const double> obs, std::span<const double> v);

/// Tape path for training; params are the net parameters as tape leaves.
/// Uses scaled Taylor/squaring for the orthogonal factor at every n (the
/// same matrix function Rodrigues computes; sin/cos are not tape primitives).
std::vector<ad::Var> dissipative_force(ad::Tape& tape,
                                       const DissipativeForceModel& shape,
                                       std::span<const ad::Var> params,
                                       std::span<const ad::Var> obs,
                                       std::span<const ad::Var> v);

}  // namespace thermo::nets
