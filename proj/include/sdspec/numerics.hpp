#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace sdspec {

/// Adaptive quadrature settings. Tolerance is relative to the integral value.
struct QuadratureSpec {
  double relative_tolerance = 1e-9;
  std::size_t max_subdivisions = 15;

  void validate() const;
};

/// Outcome of a quadrature call. `estimated_error` is the absolute error
/// estimate reported by the Gauss-Kronrod pair.
struct QuadratureResult {
  double value = 0.0;
  double estimated_error = 0.0;
  double l1_norm = 0.0;
};

/// Thrown when adaptive subdivision is exhausted before the tolerance is met.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double best_estimate, double error_bound)
      : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

using RealFunction = std::function<double(double)>;

QuadratureResult integrate_detailed(const RealFunction& f, double a, double b,
                                    const QuadratureSpec& spec = {});

/// \int_a^b f. Infinite limits are accepted.
double integrate(const RealFunction& f, double a, double b, const QuadratureSpec& spec = {});

struct MaximizeResult {
  double s_star = 0.0;
  double f_star = 0.0;
  // Set when the coarse pre-scan found more than one local maximum and the
  // dense grid fallback was used instead of golden-section search.
  bool grid_fallback = false;
  std::size_t evaluations = 0;
};

inline constexpr double kDefaultOptimizerTolerance = 1e-10;

/// Golden-section maximization of a unimodal function on [lo, hi].
/// Endpoint maxima are returned as exactly lo or hi.
MaximizeResult maximize_1d(const RealFunction& f, double lo, double hi,
                           double tol = kDefaultOptimizerTolerance);

}  // namespace sdspec
