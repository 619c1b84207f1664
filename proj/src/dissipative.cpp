#include "thermolearn/dissipative.hpp"

#include <cmath>
#include <string>

namespace thermo::nets {

namespace {

template <class S>
double scalar_value(const S& x) {
  if constexpr (std::is_same_v<S, double>)
    return x;
  else
    return x.value();
}

// Row-major n x n helpers shared by the double and tape paths.
template <class S>
std::vector<S> matmul_t(std::span<const S> a, std::span<const S> b, int n) {
  std::vector<S> c;
  c.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      S acc = a[i * n] * b[j];
      for (int k = 1; k < n; ++k) acc = acc + a[i * n + k] * b[k * n + j];
      c.push_back(acc);
    }
  return c;
}

template <class S>
std::vector<S> skew_t(std::span<const S> c, int n, const S& zero) {
  std::vector<S> a(n * n, zero);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a[i * n + j] = c[idx];
      a[j * n + i] = -c[idx];
      ++idx;
    }
  return a;
}

// Scaling and squaring with a fixed-length Taylor series; after scaling the
// max-norm is <= 1/4 so 16 terms put the truncation error near rounding.
template <class S>
std::vector<S> exp_taylor_t(std::span<const S> a_in, int n, const S& zero,
                            const S& one) {
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += std::fabs(scalar_value(a_in[i * n + j]));
    norm = std::max(norm, row);
  }
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.25 && squarings < 60) {
    scale *= 0.5;
    ++squarings;
  }

  std::vector<S> b;
  b.reserve(n * n);
  for (int i = 0; i < n * n; ++i) b.push_back(a_in[i] * scale);

  std::vector<S> result(n * n, zero);
  for (int i = 0; i < n; ++i) result[i * n + i] = one;
  std::vector<S> term = result;  // B^0
  double factorial = 1.0;
  for (int k = 1; k <= 16; ++k) {
    term = matmul_t<S>(term, b, n);
    factorial *= k;
    for (int i = 0; i < n * n; ++i)
      result[i] = result[i] + term[i] * (1.0 / factorial);
  }
  for (int s = 0; s < squarings; ++s) result = matmul_t<S>(result, result, n);
  return result;
}

Mat rodrigues(const Mat& a) {
  const double wx = a(2, 1), wy = a(0, 2), wz = a(1, 0);
  const double theta2 = wx * wx + wy * wy + wz * wz;
  const double theta = std::sqrt(theta2);
  double c1, c2;  // sin(t)/t and (1-cos(t))/t^2
  if (theta < 1e-4) {
    c1 = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    c2 = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    c1 = std::sin(theta) / theta;
    c2 = (1.0 - std::cos(theta)) / theta2;
  }
  Mat a2 = a * a;
  Mat q = Mat::identity(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) q(i, j) += c1 * a(i, j) + c2 * a2(i, j);
  return q;
}

template <class S>
std::vector<S> force_t(const DissipativeForceModel& shape,
                       std::span<const S> outputs, std::span<const S> v,
                       const S& zero, const S& one, bool use_rodrigues) {
  const int n = shape.n;
  const int n_skew = n * (n - 1) / 2;

  // Q^T v, with Q = exp(skew(c)).
  std::vector<S> qt_v;
  std::vector<S> q;
  if (n_skew == 0) {
    qt_v.assign(v.begin(), v.end());
  } else {
    std::vector<S> coords(outputs.begin(), outputs.begin() + n_skew);
    if (use_rodrigues) {
      if constexpr (std::is_same_v<S, double>) {
        Mat qm = orthogonal_exp(skew_from_coords(coords, n));
        q.resize(n * n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) q[i * n + j] = qm(i, j);
      }
    }
    if (q.empty()) {
      auto a = skew_t<S>(coords, n, zero);
      q = exp_taylor_t<S>(a, n, zero, one);
    }
    qt_v.assign(n, zero);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) qt_v[i] = qt_v[i] + q[j * n + i] * v[j];
  }

  // D = diag(fbar^2) applied in the rotated frame.
  for (int i = 0; i < n; ++i) {
    const S& f = outputs[n_skew + i];
    qt_v[i] = qt_v[i] * (f * f);
  }

  std::vector<S> force(n, zero);
  if (n_skew == 0) {
    for (int i = 0; i < n; ++i) force[i] = -qt_v[i];
  } else {
    for (int i = 0; i < n; ++i) {
      S acc = q[i * n] * qt_v[0];
      for (int j = 1; j < n; ++j) acc = acc + q[i * n + j] * qt_v[j];
      force[i] = -acc;
    }
  }

  if (shape.antisymmetric_part && n_skew > 0) {
    std::vector<S> ac(outputs.begin() + n * (n + 1) / 2, outputs.end());
    auto a = skew_t<S>(ac, n, zero);
    for (int i = 0; i < n; ++i) {
      S acc = a[i * n] * v[0];
      for (int j = 1; j < n; ++j) acc = acc + a[i * n + j] * v[j];
      force[i] = force[i] - acc;
    }
  }
  return force;
}

void check_shapes(const DissipativeForceModel& m, std::size_t obs_size,
                  std::size_t v_size) {
  if (static_cast<int>(obs_size) != m.net.arch.input_dim)
    throw ArityMismatch("dissipative_force: obs size " +
                        std::to_string(obs_size) + " != net input " +
                        std::to_string(m.net.arch.input_dim));
  if (static_cast<int>(v_size) != m.n)
    throw ArityMismatch("dissipative_force: v size " + std::to_string(v_size) +
                        " != n " + std::to_string(m.n));
  if (m.net.arch.output_dim != m.expected_outputs())
    throw ArityMismatch("dissipative_force: net outputs " +
                        std::to_string(m.net.arch.output_dim) + " != " +
                        std::to_string(m.expected_outputs()));
}

}  // namespace

Mat skew_from_coords(std::span<const double> c, int n) {
  if (static_cast<int>(c.size()) != n * (n - 1) / 2)
    throw ArityMismatch("skew_from_coords: need n(n-1)/2 = " +
                        std::to_string(n * (n - 1) / 2) + " coords, got " +
                        std::to_string(c.size()));
  Mat a(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = c[idx];
      a(j, i) = -c[idx];
      ++idx;
    }
  return a;
}

Mat orthogonal_exp(const Mat& a) {
  const int n = a.rows();
  if (n <= 1) return Mat::identity(std::max(n, 1));
  if (n == 2) {
    const double t = a(0, 1);  // A = [[0, t], [-t, 0]]
    Mat q(2, 2);
    q(0, 0) = std::cos(t);
    q(0, 1) = std::sin(t);
    q(1, 0) = -std::sin(t);
    q(1, 1) = std::cos(t);
    return q;
  }
  if (n == 3) return rodrigues(a);
  std::vector<double> flat(a.data().begin(), a.data().end());
  auto r = exp_taylor_t<double>(flat, n, 0.0, 1.0);
  Mat q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q(i, j) = r[i * n + j];
  return q;
}

Vec dissipative_force(const DissipativeForceModel& m,
                      std::span<const double> obs, std::span<const double> v) {
  check_shapes(m, obs.size(), v.size());
  Vec out = mlp_forward(m.net, obs);
  return force_t<double>(m, out, v, 0.0, 1.0, /*use_rodrigues=*/true);
}

std::vector<ad::Var> dissipative_force(ad::Tape& tape,
                                       const DissipativeForceModel& shape,
                                       std::span<const ad::Var> params,
                                       std::span<const ad::Var> obs,
                                       std::span<const ad::Var> v) {
  check_shapes(shape, obs.size(), v.size());
  auto out = mlp_forward(tape, shape.net.arch, params, obs);
  return force_t<ad::Var>(shape, out, v, tape.constant(0.0),
                          tape.constant(1.0), /*use_rodrigues=*/false);
}

}  // namespace thermo::nets
