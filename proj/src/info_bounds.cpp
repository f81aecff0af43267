#include "sdspec/info_bounds.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sdspec {

std::string_view to_string(InfoMethod method) {
  switch (method) {
    case InfoMethod::QuantumBound:
      return "quantum-bound";
    case InfoMethod::UspcContinuum:
      return "uspc-continuum";
    case InfoMethod::UspcDiscrete:
      return "uspc-discrete";
    case InfoMethod::Homodyne:
      return "homodyne";
    case InfoMethod::HomodyneDiscrete:
      return "homodyne-discrete";
    case InfoMethod::LowSnrUspc:
      return "low-snr-uspc";
    case InfoMethod::LowSnrHomodyne:
      return "low-snr-homodyne";
    case InfoMethod::FlatClosedForm:
      return "flat-closed-form";
  }
  return "unknown";
}

namespace detail {

SupportIntegral integrate_over_support(const NoiseSpectrumModel& model, const RealFunction& f,
                                       const QuadratureSpec& spec) {
  SupportIntegral out;
  for (const auto& piece : model.support().pieces()) {
    const auto r = integrate_detailed(f, piece.lo, piece.hi, spec);
    out.value += r.value;
    out.error += r.estimated_error;
  }
  return out;
}

}  // namespace detail

namespace {

void require_positive_time(double observation_time) {
  if (!(observation_time > 0.0) || !std::isfinite(observation_time)) {
    throw std::invalid_argument("observation time must be positive");
  }
}

// T \int dw/2pi f(w), packaged as a report.
InfoReport time_integral(const NoiseSpectrumModel& model, const RealFunction& f,
                         double observation_time, const QuadratureSpec& spec,
                         InfoMethod method) {
  require_positive_time(observation_time);
  const auto integral = detail::integrate_over_support(model, f, spec);
  InfoReport report;
  report.method = method;
  report.observation_time = observation_time;
  report.value = observation_time * (integral.value / kTwoPi);
  report.quadrature.relative_tolerance = spec.relative_tolerance;
  report.quadrature.estimated_error = observation_time * (integral.error / kTwoPi);
  return report;
}

}  // namespace

InfoReport quantum_fisher_bound(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                                double theta, double observation_time,
                                const QuadratureSpec& spec) {
  model.check_theta(theta);
  // (d ln S)^2 / (2 + 1/(S_k S)) rewritten as [(dS)^2/S] S_k / (2 S_k S + 1),
  // which stays finite at theta = 0.
  auto integrand = [&](double w) {
    const double sk = probe_psd(profile, w);
    const double sx = model.psd(w, theta);
    return model.score_density(w, theta) * sk / (2.0 * sk * sx + 1.0);
  };
  return time_integral(model, integrand, observation_time, spec, InfoMethod::QuantumBound);
}

InfoReport fisher_uspc_continuum(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                                 double theta, double observation_time,
                                 const QuadratureSpec& spec) {
  model.check_theta(theta);
  auto integrand = [&](double w) {
    const double intensity = profile.mean_flux() * profile.antisqueezing_gain(w);
    const double sx = model.psd(w, theta);
    return model.score_density(w, theta) * intensity / (2.0 * intensity * sx + 1.0);
  };
  return time_integral(model, integrand, observation_time, spec, InfoMethod::UspcContinuum);
}

InfoReport fisher_uspc_discrete(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                                double theta, const ModeGrid& grid) {
  model.check_theta(theta);
  // Each term (d ln N)^2 / (1 + 1/N) = [(dN)^2 / N] / (1 + N) and
  // (dN)^2 / N = 2 |alpha g|^2 (dS)^2 / S.
  double total = 0.0;
  for (std::size_t m = 1; m <= grid.size(); ++m) {
    const double w = grid.omega(m);
    const double intensity = profile.mean_flux() * profile.antisqueezing_gain(w);
    const double mean_count = 2.0 * intensity * model.psd(w, theta);
    total += 2.0 * intensity * model.score_density(w, theta) / (1.0 + mean_count);
  }
  InfoReport report;
  report.value = total;
  report.method = InfoMethod::UspcDiscrete;
  report.observation_time = grid.observation_time();
  report.quadrature.modes = grid.size();
  return report;
}

InfoReport fisher_homodyne(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                           double theta, double observation_time, const QuadratureSpec& spec) {
  model.check_theta(theta);
  auto integrand = [&](double w) {
    const double ds = model.psd_dtheta(w, theta);
    const double total = model.psd(w, theta) + phase_psd(profile, w);
    return ds * ds / (2.0 * total * total);
  };
  return time_integral(model, integrand, observation_time, spec, InfoMethod::Homodyne);
}

InfoReport fisher_homodyne_snr_form(const NoiseSpectrumModel& model,
                                    const ProbeProfile& profile, double theta,
                                    double observation_time, const QuadratureSpec& spec) {
  model.check_theta(theta);
  auto integrand = [&](double w) {
    const double sx = model.psd(w, theta);
    if (sx == 0.0) {
      return 0.0;
    }
    const double dlog = model.psd_dtheta(w, theta) / sx;
    const double ratio = phase_psd(profile, w) / sx;
    return dlog * dlog / (2.0 + 4.0 * ratio + 2.0 * ratio * ratio);
  };
  return time_integral(model, integrand, observation_time, spec, InfoMethod::Homodyne);
}

InfoReport fisher_homodyne_discrete(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                                    double theta, const ModeGrid& grid) {
  model.check_theta(theta);
  double total = 0.0;
  for (std::size_t m = 1; m <= grid.size(); ++m) {
    const double w = grid.omega(m);
    const double ds = model.psd_dtheta(w, theta);
    const double mean = model.psd(w, theta) + phase_psd(profile, w);
    total += ds * ds / (mean * mean);
  }
  InfoReport report;
  report.value = total;
  report.method = InfoMethod::HomodyneDiscrete;
  report.observation_time = grid.observation_time();
  report.quadrature.modes = grid.size();
  return report;
}

LowSnrInfo fisher_low_snr(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                          double theta, double observation_time, const QuadratureSpec& spec) {
  model.check_theta(theta);
  // S_k S (d ln S)^2 = S_k (dS)^2/S;  8 (S_k S)^2 (d ln S)^2 = 8 S_k^2 S (dS)^2/S.
  auto uspc = [&](double w) { return probe_psd(profile, w) * model.score_density(w, theta); };
  auto homodyne = [&](double w) {
    const double sk = probe_psd(profile, w);
    return 8.0 * sk * sk * model.psd(w, theta) * model.score_density(w, theta);
  };
  return LowSnrInfo{
      time_integral(model, uspc, observation_time, spec, InfoMethod::LowSnrUspc),
      time_integral(model, homodyne, observation_time, spec, InfoMethod::LowSnrHomodyne)};
}

FlatBandInfo fisher_flat_closed_form(double theta, double bandwidth, double observation_time) {
  if (!(theta >= 0.0)) {
    throw std::domain_error("fisher_flat_closed_form: theta must be nonnegative");
  }
  if (!(bandwidth > 0.0) || !(observation_time > 0.0)) {
    throw std::invalid_argument("fisher_flat_closed_form: B and T must be positive");
  }
  const double bt4 = 4.0 * bandwidth * observation_time;
  const double t2 = theta * theta;
  FlatBandInfo out;
  out.uspc = bt4 / (t2 + 2.0);
  out.homodyne = theta == 0.0 ? 0.0 : bt4 / (t2 + 2.0 + 1.0 / t2);
  return out;
}

double convexity_objective(double dlog_variance, double v_k, double variance, double dlog_gamma) {
  const double residual = dlog_variance - 2.0 * dlog_gamma;
  return 4.0 * v_k * variance * dlog_gamma * dlog_gamma + 0.5 * residual * residual;
}

double convexity_bound_gaussian(const std::function<double(double)>& variance, double v_k,
                                double theta, const std::function<double(double)>& dvariance) {
  const double v_x = variance(theta);
  if (!(v_x > 0.0)) {
    throw std::domain_error("convexity_bound_gaussian: v_X must be positive");
  }
  if (!(v_k > 0.0)) {
    throw std::domain_error("convexity_bound_gaussian: v_k must be positive");
  }
  double dv = 0.0;
  if (dvariance) {
    dv = dvariance(theta);
  } else {
    const double h = 1e-6 * std::max(1.0, std::abs(theta));
    dv = (variance(theta + h) - variance(theta - h)) / (2.0 * h);
  }
  const double dlog_v = dv / v_x;
  const double dlog_gamma = dlog_v / (2.0 + 4.0 * v_k * v_x);
  return convexity_objective(dlog_v, v_k, v_x, dlog_gamma);
}

double convexity_bound_object_size(const RealFunction& density, double z_lo, double z_hi,
                                   double v_k, const QuadratureSpec& spec) {
  if (!(v_k >= 0.0)) {
    throw std::domain_error("convexity_bound_object_size: v_k must be nonnegative");
  }
  const double norm = integrate(density, z_lo, z_hi, spec);
  if (std::abs(norm - 1.0) > 1e-6) {
    throw std::invalid_argument("convexity_bound_object_size: density is not normalized");
  }
  const double second_moment =
      integrate([&](double z) { return density(z) * z * z; }, z_lo, z_hi, spec);
  return 4.0 * v_k * second_moment;
}

double convexity_bound_object_size(const std::vector<double>& points,
                                   const std::vector<double>& weights, double v_k) {
  if (points.size() != weights.size() || points.empty()) {
    throw std::invalid_argument("convexity_bound_object_size: points and weights must match");
  }
  double norm = 0.0;
  double second_moment = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(weights[i] >= 0.0)) {
      throw std::invalid_argument("convexity_bound_object_size: negative weight");
    }
    norm += weights[i];
    second_moment += weights[i] * points[i] * points[i];
  }
  if (std::abs(norm - 1.0) > 1e-12) {
    throw std::invalid_argument("convexity_bound_object_size: weights do not sum to 1");
  }
  return 4.0 * v_k * second_moment;
}

}  // namespace sdspec
