#include "thermolearn/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thermo::ode {

namespace {

// Dormand-Prince 5(4) coefficients (RK45, FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th-order embedded weights.
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

}  // namespace

std::vector<Vec> integrate(const Rhs& rhs, const Vec& y0,
                           std::span<const double> t_grid,
                           const OdeOptions& opts) {
  const std::size_t n = y0.size();
  std::vector<Vec> out;
  out.reserve(t_grid.size());

  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("ode::integrate: t_grid must increase");

  Vec y = y0, ytmp(n), ynew(n), yerr(n);
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);

  double t = t_grid.front();
  out.push_back(y);
  std::size_t next_grid = 1;
  if (next_grid >= t_grid.size()) return out;

  double h = opts.initial_step;
  const double t_end = t_grid.back();
  rhs(t, y, k1);
  long steps = 0;

  while (next_grid < t_grid.size()) {
    if (++steps > opts.max_steps)
      throw StepSizeUnderflow("ode::integrate: step budget exhausted at t = " +
                              std::to_string(t));
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    h = std::min(h, t_end - t);
    // Land exactly on the next grid time when the step would cross it.
    bool hit_grid = false;
    if (t + h >= t_grid[next_grid] - 1e-14 * std::max(1.0, std::fabs(t))) {
      h = t_grid[next_grid] - t;
      hit_grid = true;
    }
    if (!(h > 0.0) || t + h == t)
      throw StepSizeUnderflow("ode::integrate: step underflow at t = " +
                              std::to_string(t));

    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                            a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                            b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double y4 = y[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                    e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opts.abs_tol +
                        opts.rel_tol * std::max(std::fabs(y[i]),
                                                std::fabs(ynew[i]));
      const double d = (ynew[i] - y4) / sc;
      err += d * d;
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (err <= 1.0 || !(std::isfinite(err))) {
      if (!std::isfinite(err))
        throw StepSizeUnderflow("ode::integrate: nonfinite state at t = " +
                                std::to_string(t));
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      if (hit_grid) {
        out.push_back(y);
        ++next_grid;
      }
    }
    const double factor =
        std::clamp(0.9 * std::pow(std::max(err, 1e-300), -0.2), 0.2, 5.0);
    h *= factor;
    if (h < 1e-14 * std::max(1.0, std::fabs(t)))
      throw StepSizeUnderflow("ode::integrate: step underflow at t = " +
                              std::to_string(t));
  }
  return out;
}

}  // namespace thermo::ode
