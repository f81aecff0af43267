#include "sdspec/detection_bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace sdspec {

std::string_view to_string(ExponentMethod method) {
  switch (method) {
    case ExponentMethod::Quantum:
      return "quantum";
    case ExponentMethod::Uspc:
      return "uspc";
    case ExponentMethod::Homodyne:
      return "homodyne";
    case ExponentMethod::LowSnrUspc:
      return "low-snr-uspc";
    case ExponentMethod::LowSnrHomodyne:
      return "low-snr-homodyne";
  }
  return "unknown";
}

namespace {

void require_positive_time(double observation_time) {
  if (!(observation_time > 0.0) || !std::isfinite(observation_time)) {
    throw std::invalid_argument("observation time must be positive");
  }
}

// scale * \int dw/2pi f(w) over the model support.
ExponentReport spectral_exponent(const NoiseSpectrumModel& model, const RealFunction& f,
                                 double scale, double observation_time,
                                 const QuadratureSpec& spec, ExponentMethod method) {
  require_positive_time(observation_time);
  const auto integral = detail::integrate_over_support(model, f, spec);
  ExponentReport report;
  report.method = method;
  report.observation_time = observation_time;
  report.value = scale * (integral.value / kTwoPi);
  report.quadrature.relative_tolerance = spec.relative_tolerance;
  report.quadrature.estimated_error = std::abs(scale) * (integral.error / kTwoPi);
  return report;
}

ExponentReport discrete_report(double value, ExponentMethod method, const ModeGrid& grid) {
  ExponentReport report;
  report.value = value;
  report.method = method;
  report.observation_time = grid.observation_time();
  report.quadrature.modes = grid.size();
  return report;
}

}  // namespace

ExponentReport quantum_chernoff(const NoiseSpectrumModel& model, double theta_h1,
                                const ProbeProfile& profile, double observation_time,
                                const QuadratureSpec& spec) {
  model.check_theta(theta_h1);
  auto integrand = [&](double w) {
    return std::log1p(2.0 * probe_psd(profile, w) * model.psd(w, theta_h1));
  };
  return spectral_exponent(model, integrand, 0.5 * observation_time, observation_time, spec,
                           ExponentMethod::Quantum);
}

ExponentReport quantum_chernoff_discrete(const NoiseSpectrumModel& model, double theta_h1,
                                         const ProbeProfile& profile, const ModeGrid& grid) {
  model.check_theta(theta_h1);
  double total = 0.0;
  for (std::size_t m = 1; m <= grid.size(); ++m) {
    const double w = grid.omega(m);
    total += std::log1p(2.0 * probe_psd(profile, w) * model.psd(w, theta_h1));
  }
  return discrete_report(total, ExponentMethod::Quantum, grid);
}

ExponentReport chernoff_uspc(const NoiseSpectrumModel& model, double theta_h1,
                             const ProbeProfile& profile, double observation_time,
                             const QuadratureSpec& spec) {
  model.check_theta(theta_h1);
  auto integrand = [&](double w) {
    const double intensity = profile.mean_flux() * profile.antisqueezing_gain(w);
    return std::log1p(2.0 * intensity * model.psd(w, theta_h1));
  };
  return spectral_exponent(model, integrand, 0.5 * observation_time, observation_time, spec,
                           ExponentMethod::Uspc);
}

ExponentReport chernoff_uspc_discrete(const NoiseSpectrumModel& model, double theta_h1,
                                      const ProbeProfile& profile, const ModeGrid& grid) {
  model.check_theta(theta_h1);
  double total = 0.0;
  for (std::size_t m = 1; m <= grid.size(); ++m) {
    const double w = grid.omega(m);
    const double intensity = profile.mean_flux() * profile.antisqueezing_gain(w);
    total += std::log1p(2.0 * intensity * model.psd(w, theta_h1));
  }
  return discrete_report(total, ExponentMethod::Uspc, grid);
}

double homodyne_chernoff_density(double s, double snr) {
  return std::log1p((1.0 - s) * snr) - (1.0 - s) * std::log1p(snr);
}

ExponentReport chernoff_homodyne(const NoiseSpectrumModel& model, double theta_h1,
                                 const ProbeProfile& profile, double observation_time,
                                 const QuadratureSpec& spec, double optimizer_tolerance) {
  model.check_theta(theta_h1);
  require_positive_time(observation_time);
  double last_error = 0.0;
  auto objective = [&](double s) {
    auto integrand = [&](double w) {
      const double snr = model.psd(w, theta_h1) / phase_psd(profile, w);
      return homodyne_chernoff_density(s, snr);
    };
    const auto integral = detail::integrate_over_support(model, integrand, spec);
    last_error = integral.error;
    return 0.5 * observation_time * (integral.value / kTwoPi);
  };
  const auto best = maximize_1d(objective, 0.0, 1.0, optimizer_tolerance);
  // Refresh the error estimate at the optimum.
  const double value = objective(best.s_star);

  ExponentReport report;
  report.method = ExponentMethod::Homodyne;
  report.observation_time = observation_time;
  report.value = std::max(0.0, value);
  report.s_star = best.s_star;
  report.grid_fallback = best.grid_fallback;
  report.quadrature.relative_tolerance = spec.relative_tolerance;
  report.quadrature.estimated_error = 0.5 * observation_time * (last_error / kTwoPi);
  return report;
}

ExponentReport chernoff_homodyne_discrete(const NoiseSpectrumModel& model, double theta_h1,
                                          const ProbeProfile& profile, const ModeGrid& grid,
                                          double optimizer_tolerance) {
  model.check_theta(theta_h1);
  std::vector<double> snr(grid.size());
  for (std::size_t m = 1; m <= grid.size(); ++m) {
    const double w = grid.omega(m);
    snr[m - 1] = model.psd(w, theta_h1) / phase_psd(profile, w);
  }
  auto objective = [&](double s) {
    double total = 0.0;
    for (double r : snr) {
      total += homodyne_chernoff_density(s, r);
    }
    return total;
  };
  const auto best = maximize_1d(objective, 0.0, 1.0, optimizer_tolerance);
  auto report = discrete_report(std::max(0.0, best.f_star), ExponentMethod::Homodyne, grid);
  report.s_star = best.s_star;
  report.grid_fallback = best.grid_fallback;
  return report;
}

LowSnrExponents chernoff_low_snr(const NoiseSpectrumModel& model, double theta_h1,
                                 const ProbeProfile& profile, double observation_time,
                                 const QuadratureSpec& spec) {
  model.check_theta(theta_h1);
  auto linear = [&](double w) { return probe_psd(profile, w) * model.psd(w, theta_h1); };
  auto quadratic = [&](double w) {
    const double x = probe_psd(profile, w) * model.psd(w, theta_h1);
    return x * x;
  };
  return LowSnrExponents{
      spectral_exponent(model, linear, observation_time, observation_time, spec,
                        ExponentMethod::LowSnrUspc),
      spectral_exponent(model, quadratic, observation_time, observation_time, spec,
                        ExponentMethod::LowSnrHomodyne)};
}

ErrorProbabilityBounds error_prob_bounds(double bhattacharyya, double chernoff_exponent) {
  if (!(bhattacharyya >= 0.0 && bhattacharyya <= 1.0)) {
    throw std::domain_error("error_prob_bounds: Bhattacharyya coefficient must lie in [0, 1]");
  }
  if (!(chernoff_exponent >= 0.0)) {
    throw std::domain_error("error_prob_bounds: Chernoff exponent must be nonnegative");
  }
  const double b2 = bhattacharyya * bhattacharyya;
  // 1 - sqrt(1 - B^2) = B^2 / (1 + sqrt(1 - B^2)), exact for tiny B.
  ErrorProbabilityBounds out;
  out.lower = 0.5 * b2 / (1.0 + std::sqrt(1.0 - b2));
  out.upper = 0.5 * std::exp(-chernoff_exponent);
  return out;
}

double fidelity_uspc(const NoiseSpectrumModel& model, double theta_h1,
                     const ProbeProfile& profile, double observation_time,
                     const QuadratureSpec& spec) {
  const auto zeta = quantum_chernoff(model, theta_h1, profile, observation_time, spec);
  return std::exp(-0.5 * zeta.value);
}

}  // namespace sdspec
