#include "sdspec/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sdspec {

void QuadratureSpec::validate() const {
  if (!(relative_tolerance > 0.0)) {
    throw std::invalid_argument("QuadratureSpec: relative tolerance must be positive");
  }
  if (max_subdivisions < 1) {
    throw std::invalid_argument("QuadratureSpec: max subdivisions must be at least 1");
  }
}

QuadratureResult integrate_detailed(const RealFunction& f, double a, double b,
                                    const QuadratureSpec& spec) {
  spec.validate();
  if (std::isnan(a) || std::isnan(b) || a > b) {
    throw std::invalid_argument("integrate: require a <= b");
  }
  QuadratureResult out;
  if (a == b) {
    return out;
  }
  const auto depth = static_cast<unsigned>(spec.max_subdivisions);
  out.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, depth, spec.relative_tolerance, &out.estimated_error, &out.l1_norm);

  // Measured against the L1 norm so that cancelling integrands (odd
  // functions on symmetric intervals) still terminate.
  const double allowed =
      std::max(spec.relative_tolerance * out.l1_norm, std::numeric_limits<double>::min());
  if (!std::isfinite(out.value) || out.estimated_error > allowed) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "integrate: no convergence on [" << a << ", " << b << "] after "
        << spec.max_subdivisions << " levels; estimate " << out.value << ", error "
        << out.estimated_error;
    throw QuadratureError(msg.str(), out.value, out.estimated_error);
  }
  return out;
}

double integrate(const RealFunction& f, double a, double b, const QuadratureSpec& spec) {
  return integrate_detailed(f, a, b, spec).value;
}

namespace {

constexpr std::size_t kPrescanPoints = 65;
constexpr std::size_t kFallbackGridPoints = 100001;

// Golden-section search for the maximum of f on [lo, hi].
MaximizeResult golden_section(const RealFunction& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  MaximizeResult out;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  out.evaluations += 2;
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++out.evaluations;
  }
  if (fc >= fd) {
    out.s_star = c;
    out.f_star = fc;
  } else {
    out.s_star = d;
    out.f_star = fd;
  }
  return out;
}

}  // namespace

MaximizeResult maximize_1d(const RealFunction& f, double lo, double hi, double tol) {
  if (!(lo < hi)) {
    throw std::invalid_argument("maximize_1d: require lo < hi");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("maximize_1d: tolerance must be positive");
  }

  // Coarse scan to catch obviously multimodal objectives. Plateaus count as
  // unimodal; only strict interior peaks separated by a strict dip trigger the
  // fallback.
  std::array<double, kPrescanPoints> grid{};
  std::array<double, kPrescanPoints> values{};
  for (std::size_t i = 0; i < kPrescanPoints; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kPrescanPoints - 1);
    values[i] = f(grid[i]);
  }
  std::size_t direction_changes = 0;
  int last_sign = 0;
  for (std::size_t i = 1; i < kPrescanPoints; ++i) {
    const double diff = values[i] - values[i - 1];
    const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    if (sign != 0) {
      if (last_sign == -1 && sign == 1) {
        ++direction_changes;
      }
      last_sign = sign;
    }
  }

  MaximizeResult out;
  if (direction_changes > 0) {
    out.grid_fallback = true;
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    double best_s = lo;
    for (std::size_t i = 0; i < kFallbackGridPoints; ++i) {
      const double s = i + 1 == kFallbackGridPoints
                           ? hi
                           : lo + (hi - lo) * static_cast<double>(i) /
                                      static_cast<double>(kFallbackGridPoints - 1);
      const double v = f(s);
      if (v > best_value) {
        best_value = v;
        best_s = s;
        best = i;
      }
    }
    out.evaluations = kPrescanPoints + kFallbackGridPoints;
    const double step = (hi - lo) / static_cast<double>(kFallbackGridPoints - 1);
    if (best > 0 && best + 1 < kFallbackGridPoints && step > tol) {
      auto local = golden_section(f, std::max(lo, best_s - step), std::min(hi, best_s + step), tol);
      out.evaluations += local.evaluations;
      if (local.f_star > best_value) {
        best_value = local.f_star;
        best_s = local.s_star;
      }
    }
    out.s_star = best_s;
    out.f_star = best_value;
    return out;
  }

  out = golden_section(f, lo, hi, tol);
  out.evaluations += kPrescanPoints;
  // Exact endpoints win ties so that boundary maxima are reported as lo/hi.
  if (values.front() >= out.f_star) {
    out.s_star = lo;
    out.f_star = values.front();
  }
  if (values.back() > out.f_star) {
    out.s_star = hi;
    out.f_star = values.back();
  }
  return out;
}

}  // namespace sdspec
