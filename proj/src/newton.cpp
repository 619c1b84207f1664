#include "thermolearn/newton.hpp"

#include <cmath>
#include <string>

namespace thermo {

bool lu_solve(Mat& a, Vec& b) {
  const int n = a.rows();
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
    if (a(pivot, col) == 0.0 || !std::isfinite(a(pivot, col))) return false;
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      std::swap(b[col], b[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int j = r + 1; j < n; ++j) s -= a(r, j) * b[j];
    b[r] = s / a(r, r);
  }
  return true;
}

NewtonResult newton_solve(const NewtonResidual& residual, Vec x0,
                          const NewtonOptions& opts) {
  const int m = static_cast<int>(x0.size());
  Vec x = std::move(x0);
  Vec r(m), r_hi(m), r_lo(m), x_trial(m), r_trial(m);

  if (!residual(x, r))
    throw NewtonDiverged("newton_solve: initial point outside domain",
                         std::numeric_limits<double>::infinity(), 0);
  double rnorm = norm_inf(r);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (rnorm < opts.tol) return {std::move(x), rnorm, iter};
    if (!std::isfinite(rnorm))
      throw NewtonDiverged("newton_solve: nonfinite residual", rnorm, iter);

    Mat jac(m, m);
    Vec xp = x;
    for (int j = 0; j < m; ++j) {
      const double step = opts.fd_step * std::max(1.0, std::fabs(x[j]));
      xp[j] = x[j] + step;
      bool ok_hi = residual(xp, r_hi);
      xp[j] = x[j] - step;
      bool ok_lo = residual(xp, r_lo);
      xp[j] = x[j];
      if (!ok_hi || !ok_lo)
        throw NewtonDiverged(
            "newton_solve: Jacobian probe left the domain at variable " +
                std::to_string(j),
            rnorm, iter);
      for (int i = 0; i < m; ++i)
        jac(i, j) = (r_hi[i] - r_lo[i]) / (2.0 * step);
    }

    Vec delta(m);
    for (int i = 0; i < m; ++i) delta[i] = -r[i];
    if (!lu_solve(jac, delta))
      throw NewtonDiverged("newton_solve: singular Jacobian", rnorm, iter);

    // Damped update: halve until the residual decreases (or drops under tol).
    double lambda = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings <= opts.max_halvings; ++halvings) {
      for (int i = 0; i < m; ++i) x_trial[i] = x[i] + lambda * delta[i];
      if (residual(x_trial, r_trial)) {
        const double rn = norm_inf(r_trial);
        if (std::isfinite(rn) && (rn < rnorm || rn < opts.tol)) {
          x.swap(x_trial);
          r.swap(r_trial);
          rnorm = rn;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted)
      throw NewtonDiverged("newton_solve: line search stalled", rnorm, iter);
  }

  if (rnorm < opts.tol) return {std::move(x), rnorm, opts.max_iter};
  throw NewtonDiverged("newton_solve: no convergence after " +
                           std::to_string(opts.max_iter) + " iterations",
                       rnorm, opts.max_iter);
}

}  // namespace thermo
