#ifndef SEMIBAYES_QUADRATURE_HPP_
#define SEMIBAYES_QUADRATURE_HPP_

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "semibayes/errors.hpp"

namespace semibayes {

// Tail integrands may hit 0 * inf far out, where the true value underflows.
inline double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

/// Integral of f over the real line. The window [center - 10 scale,
/// center + 10 scale] is cut into unit-scale tanh-sinh panels and the two tails
/// are handled by exp-sinh after reflection. Throws NumericError when the
/// accumulated error estimate exceeds `abs_tol`.
template <typename F>
QuadratureResult integrate_real_line(const F &f, double center, double scale,
                                     double abs_tol = 1e-9,
                                     int half_panels = 10) {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::tanh_sinh;
  thread_local tanh_sinh<double> finite(15);
  thread_local exp_sinh<double> tail(9);
  const double inner_tol = 1e-13;

  QuadratureResult out;
  std::ostringstream diag;
  auto add = [&](double v, double err, const char *what, double a, double b) {
    out.value += v;
    out.error += err;
    if (!std::isfinite(v) || !std::isfinite(err))
      diag << what << "[" << a << "," << b << "] non-finite; ";
  };

  const double lo = center - half_panels * scale;
  for (int k = 0; k < 2 * half_panels; ++k) {
    const double a = lo + k * scale;
    const double b = a + scale;
    double err = 0.0, l1 = 0.0;
    const double v = finite.integrate(f, a, b, inner_tol, &err, &l1);
    add(v, err, "panel", a, b);
  }
  const double right = center + half_panels * scale;
  {
    double err = 0.0, l1 = 0.0;
    auto g = [&](double t) { return finite_or_zero(f(right + t)); };
    const double v = tail.integrate(g, inner_tol, &err, &l1);
    add(v, err, "right tail", right, std::numeric_limits<double>::infinity());
  }
  {
    double err = 0.0, l1 = 0.0;
    auto g = [&](double t) { return finite_or_zero(f(lo - t)); };
    const double v = tail.integrate(g, inner_tol, &err, &l1);
    add(v, err, "left tail", -std::numeric_limits<double>::infinity(), lo);
  }
  if (!std::isfinite(out.value) || out.error > abs_tol) {
    diag << "estimate=" << out.value << " error=" << out.error
         << " tolerance=" << abs_tol;
    throw NumericError("quadrature did not converge: " + diag.str());
  }
  return out;
}

}  // namespace semibayes

#endif  // SEMIBAYES_QUADRATURE_HPP_
