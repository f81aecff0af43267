#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "sdspec/numerics.hpp"

namespace sdspec {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Closed frequency interval [lo, hi] in rad/s.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Where a spectrum may be nonzero, split into pieces on which it is smooth.
/// Integrals over a model are evaluated piece by piece so that band edges and
/// interpolation knots never fall inside a quadrature panel.
class Support {
 public:
  Support() = default;
  explicit Support(std::vector<Interval> pieces);

  /// Band [-w, w], split at 0.
  static Support symmetric_band(double half_width);
  /// Consecutive knots become the pieces.
  static Support from_knots(const std::vector<double>& knots);
  static Support whole_line();

  const std::vector<Interval>& pieces() const noexcept { return pieces_; }
  bool contains(double omega) const noexcept;
  bool empty() const noexcept { return pieces_.empty(); }
  /// Largest |omega| covered; infinity for unbounded supports.
  double max_abs_frequency() const noexcept;

 private:
  std::vector<Interval> pieces_;
};

/// Piecewise-linear spectrum sampled on a grid symmetric about omega = 0.
/// Zero outside the sampled range.
class TabulatedSpectrum {
 public:
  TabulatedSpectrum(std::vector<double> omega, std::vector<double> values);

  double operator()(double omega) const;

  const std::vector<double>& omega() const noexcept { return omega_; }
  const std::vector<double>& values() const noexcept { return values_; }
  Support support() const { return Support::from_knots(omega_); }

 private:
  std::vector<double> omega_;
  std::vector<double> values_;
};

/// Two columns (omega, value) separated by whitespace or a comma. Blank
/// lines and lines starting with '#' are skipped.
TabulatedSpectrum read_tabulated_spectrum(std::istream& in);
TabulatedSpectrum load_tabulated_spectrum(const std::filesystem::path& path);

enum class ParametrizationKind { MagnitudeSquared, General };

using SpectrumFunction = std::function<double(double omega, double theta)>;

/// Parametric displacement-noise spectrum S_X(omega | theta).
///
/// Two parametrizations are supported. MagnitudeSquared uses
/// S_X = theta^2 R(omega) with a known shape R and admissible theta >= 0.
/// General takes S_X and its theta-derivative as callables; the derivative
/// may be omitted, in which case only PSD evaluation is available.
///
/// Models are immutable once built.
class NoiseSpectrumModel {
 public:
  static NoiseSpectrumModel magnitude_squared(RealFunction shape, Support support);

  static NoiseSpectrumModel general(SpectrumFunction psd, std::optional<SpectrumFunction> dpsd,
                                    Support support,
                                    double theta_min = -std::numeric_limits<double>::infinity(),
                                    double theta_max = std::numeric_limits<double>::infinity());

  ParametrizationKind kind() const noexcept { return kind_; }
  const Support& support() const noexcept { return support_; }
  double theta_min() const noexcept { return theta_min_; }
  double theta_max() const noexcept { return theta_max_; }

  /// Shape R(omega); only meaningful for MagnitudeSquared.
  double shape(double omega) const;

  double psd(double omega, double theta) const;
  double psd_dtheta(double omega, double theta) const;

  /// (dS_X/dtheta)^2 / S_X, the per-frequency score density. Finite at
  /// theta = 0 for MagnitudeSquared models (equals 4 R). Zero where both
  /// S_X and its derivative vanish; a domain error where only S_X does.
  double score_density(double omega, double theta) const;

  void check_theta(double theta) const;

 private:
  NoiseSpectrumModel() = default;

  ParametrizationKind kind_ = ParametrizationKind::MagnitudeSquared;
  RealFunction shape_;
  SpectrumFunction psd_;
  std::optional<SpectrumFunction> dpsd_;
  Support support_;
  double theta_min_ = 0.0;
  double theta_max_ = std::numeric_limits<double>::infinity();
};

/// Squeezed probe: mean photon flux |alpha|^2 and antisqueezing gain
/// |g(omega)|^2. The squeezing gain is |h|^2 = 1 / |g|^2.
class ProbeProfile {
 public:
  /// Unsqueezed (coherent) probe with unit gain.
  explicit ProbeProfile(double mean_flux);
  ProbeProfile(double mean_flux, RealFunction gain);

  double mean_flux() const noexcept { return mean_flux_; }
  double antisqueezing_gain(double omega) const;
  double squeezing_gain(double omega) const { return 1.0 / antisqueezing_gain(omega); }

 private:
  double mean_flux_;
  RealFunction gain_;
};

/// S_k = |alpha|^2 |g(omega)|^2.
double probe_psd(const ProbeProfile& profile, double omega);

/// Quantum-limited phase-quadrature PSD, 1 / (4 S_k).
double phase_psd(const ProbeProfile& profile, double omega);

double eval_noise_psd(const NoiseSpectrumModel& model, double omega, double theta);
double eval_noise_psd_dtheta(const NoiseSpectrumModel& model, double omega, double theta);

struct FlatBandConfig {
  double bandwidth = 1.0;  // B, in Hz: the band is |omega| <= 2 pi B
  double probe_psd = 1.0;  // S_k(0)
  double theta = 1.0;      // reference parameter value; spectral SNR is theta^2

  void validate() const;
  double band_edge() const { return kTwoPi * bandwidth; }
};

struct FlatBand {
  NoiseSpectrumModel model;
  ProbeProfile profile;
  FlatBandConfig config;
};

/// Flat probe and shape R = 1 / (4 S_k(0)) inside |omega| <= 2 pi B, so that
/// S_X / S_eta = theta^2 in band.
FlatBand make_flat_band(const FlatBandConfig& config);

}  // namespace sdspec
