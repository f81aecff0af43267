#include "sdspec/spectral_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sdspec {

Support::Support(std::vector<Interval> pieces) : pieces_(std::move(pieces)) {
  std::sort(pieces_.begin(), pieces_.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!(pieces_[i].lo <= pieces_[i].hi)) {
      throw std::invalid_argument("Support: interval with lo > hi");
    }
    if (i > 0 && pieces_[i].lo < pieces_[i - 1].hi) {
      throw std::invalid_argument("Support: overlapping intervals");
    }
  }
}

Support Support::symmetric_band(double half_width) {
  if (!(half_width > 0.0)) {
    throw std::invalid_argument("Support: band half-width must be positive");
  }
  return Support({{-half_width, 0.0}, {0.0, half_width}});
}

Support Support::from_knots(const std::vector<double>& knots) {
  std::vector<Interval> pieces;
  pieces.reserve(knots.size());
  for (std::size_t i = 1; i < knots.size(); ++i) {
    pieces.push_back({knots[i - 1], knots[i]});
  }
  return Support(std::move(pieces));
}

Support Support::whole_line() {
  const double inf = std::numeric_limits<double>::infinity();
  return Support({{-inf, 0.0}, {0.0, inf}});
}

bool Support::contains(double omega) const noexcept {
  // Edges are closed and padded by a relative 1e-12 so that mode frequencies
  // computed as 2 pi m / T land inside a band edge they nominally sit on.
  return std::any_of(pieces_.begin(), pieces_.end(), [omega](const Interval& p) {
    const double slack = 1e-12 * std::max(std::abs(p.lo), std::abs(p.hi));
    return omega >= p.lo - slack && omega <= p.hi + slack;
  });
}

double Support::max_abs_frequency() const noexcept {
  double out = 0.0;
  for (const auto& p : pieces_) {
    out = std::max({out, std::abs(p.lo), std::abs(p.hi)});
  }
  return out;
}

TabulatedSpectrum::TabulatedSpectrum(std::vector<double> omega, std::vector<double> values)
    : omega_(std::move(omega)), values_(std::move(values)) {
  if (omega_.size() != values_.size()) {
    throw std::invalid_argument("TabulatedSpectrum: column lengths differ");
  }
  if (omega_.size() < 2) {
    throw std::invalid_argument("TabulatedSpectrum: need at least two samples");
  }
  for (std::size_t i = 1; i < omega_.size(); ++i) {
    if (!(omega_[i] > omega_[i - 1])) {
      throw std::invalid_argument("TabulatedSpectrum: frequencies must be strictly increasing");
    }
  }
  const double scale = std::max(std::abs(omega_.front()), std::abs(omega_.back()));
  for (std::size_t i = 0, j = omega_.size() - 1; i <= j; ++i, --j) {
    if (std::abs(omega_[i] + omega_[j]) > 1e-12 * scale) {
      throw std::invalid_argument("TabulatedSpectrum: frequency grid must be symmetric about 0");
    }
    if (std::abs(values_[i] - values_[j]) > 1e-12 * std::max(std::abs(values_[i]), 1e-300)) {
      throw std::invalid_argument("TabulatedSpectrum: spectrum must be even in omega");
    }
    if (j == 0) {
      break;
    }
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("TabulatedSpectrum: values must be finite and nonnegative");
    }
  }
}

double TabulatedSpectrum::operator()(double omega) const {
  // Interpolating on |omega| makes the result exactly even; the grid and the
  // values are symmetric, so nothing else changes.
  omega = std::abs(omega);
  if (omega < omega_.front() || omega > omega_.back()) {
    return 0.0;
  }
  auto it = std::upper_bound(omega_.begin(), omega_.end(), omega);
  if (it == omega_.end()) {
    return values_.back();
  }
  const auto hi = static_cast<std::size_t>(it - omega_.begin());
  const std::size_t lo = hi - 1;
  const double t = (omega - omega_[lo]) / (omega_[hi] - omega_[lo]);
  return values_[lo] + t * (values_[hi] - values_[lo]);
}

TabulatedSpectrum read_tabulated_spectrum(std::istream& in) {
  std::vector<double> omega;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double w = 0.0;
    double v = 0.0;
    if (!(fields >> w >> v)) {
      throw std::runtime_error("tabulated spectrum: malformed line " + std::to_string(line_no));
    }
    omega.push_back(w);
    values.push_back(v);
  }
  return TabulatedSpectrum(std::move(omega), std::move(values));
}

TabulatedSpectrum load_tabulated_spectrum(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open spectrum file " + path.string());
  }
  return read_tabulated_spectrum(in);
}

NoiseSpectrumModel NoiseSpectrumModel::magnitude_squared(RealFunction shape, Support support) {
  if (!shape) {
    throw std::invalid_argument("NoiseSpectrumModel: shape function required");
  }
  NoiseSpectrumModel m;
  m.kind_ = ParametrizationKind::MagnitudeSquared;
  m.shape_ = std::move(shape);
  m.support_ = std::move(support);
  m.theta_min_ = 0.0;
  m.theta_max_ = std::numeric_limits<double>::infinity();
  return m;
}

NoiseSpectrumModel NoiseSpectrumModel::general(SpectrumFunction psd,
                                               std::optional<SpectrumFunction> dpsd,
                                               Support support, double theta_min,
                                               double theta_max) {
  if (!psd) {
    throw std::invalid_argument("NoiseSpectrumModel: psd function required");
  }
  if (!(theta_min <= theta_max)) {
    throw std::invalid_argument("NoiseSpectrumModel: empty admissible theta range");
  }
  NoiseSpectrumModel m;
  m.kind_ = ParametrizationKind::General;
  m.psd_ = std::move(psd);
  if (dpsd && *dpsd) {
    m.dpsd_ = std::move(dpsd);
  }
  m.support_ = std::move(support);
  m.theta_min_ = theta_min;
  m.theta_max_ = theta_max;
  return m;
}

void NoiseSpectrumModel::check_theta(double theta) const {
  if (std::isnan(theta) || theta < theta_min_ || theta > theta_max_) {
    throw std::domain_error("NoiseSpectrumModel: theta outside admissible range");
  }
}

double NoiseSpectrumModel::shape(double omega) const {
  if (kind_ != ParametrizationKind::MagnitudeSquared) {
    throw std::logic_error("NoiseSpectrumModel: shape is defined for magnitude-squared models only");
  }
  return support_.contains(omega) ? shape_(omega) : 0.0;
}

double NoiseSpectrumModel::psd(double omega, double theta) const {
  check_theta(theta);
  if (!support_.contains(omega)) {
    return 0.0;
  }
  if (kind_ == ParametrizationKind::MagnitudeSquared) {
    return theta * theta * shape_(omega);
  }
  return psd_(omega, theta);
}

double NoiseSpectrumModel::psd_dtheta(double omega, double theta) const {
  check_theta(theta);
  if (kind_ == ParametrizationKind::General && !dpsd_) {
    throw std::logic_error("NoiseSpectrumModel: no derivative supplied for general model");
  }
  if (!support_.contains(omega)) {
    return 0.0;
  }
  if (kind_ == ParametrizationKind::MagnitudeSquared) {
    return 2.0 * theta * shape_(omega);
  }
  return (*dpsd_)(omega, theta);
}

double NoiseSpectrumModel::score_density(double omega, double theta) const {
  if (kind_ == ParametrizationKind::MagnitudeSquared) {
    check_theta(theta);
    return support_.contains(omega) ? 4.0 * shape_(omega) : 0.0;
  }
  const double s = psd(omega, theta);
  const double ds = psd_dtheta(omega, theta);
  if (s == 0.0) {
    if (ds != 0.0) {
      throw std::domain_error("NoiseSpectrumModel: derivative nonzero where the PSD vanishes");
    }
    return 0.0;
  }
  return ds * ds / s;
}

ProbeProfile::ProbeProfile(double mean_flux) : ProbeProfile(mean_flux, [](double) { return 1.0; }) {}

ProbeProfile::ProbeProfile(double mean_flux, RealFunction gain)
    : mean_flux_(mean_flux), gain_(std::move(gain)) {
  if (!(mean_flux_ > 0.0) || !std::isfinite(mean_flux_)) {
    throw std::invalid_argument("ProbeProfile: mean flux must be positive");
  }
  if (!gain_) {
    throw std::invalid_argument("ProbeProfile: gain function required");
  }
}

double ProbeProfile::antisqueezing_gain(double omega) const {
  const double g = gain_(omega);
  if (!(g > 0.0)) {
    throw std::domain_error("ProbeProfile: antisqueezing gain must be positive");
  }
  return g;
}

double probe_psd(const ProbeProfile& profile, double omega) {
  return profile.mean_flux() * profile.antisqueezing_gain(omega);
}

double phase_psd(const ProbeProfile& profile, double omega) {
  const double sk = probe_psd(profile, omega);
  if (!(sk > 0.0)) {
    throw std::domain_error("phase_psd: probe PSD vanishes");
  }
  return 0.25 / sk;
}

double eval_noise_psd(const NoiseSpectrumModel& model, double omega, double theta) {
  return model.psd(omega, theta);
}

double eval_noise_psd_dtheta(const NoiseSpectrumModel& model, double omega, double theta) {
  return model.psd_dtheta(omega, theta);
}

void FlatBandConfig::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("FlatBandConfig: bandwidth must be positive");
  }
  if (!(probe_psd > 0.0) || !std::isfinite(probe_psd)) {
    throw std::invalid_argument("FlatBandConfig: probe PSD must be positive");
  }
  if (!(theta >= 0.0)) {
    throw std::invalid_argument("FlatBandConfig: theta must be nonnegative");
  }
}

FlatBand make_flat_band(const FlatBandConfig& config) {
  config.validate();
  const double level = 0.25 / config.probe_psd;
  auto model = NoiseSpectrumModel::magnitude_squared([level](double) { return level; },
                                                     Support::symmetric_band(config.band_edge()));
  return FlatBand{std::move(model), ProbeProfile(config.probe_psd), config};
}

}  // namespace sdspec
