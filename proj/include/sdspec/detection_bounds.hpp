#pragma once

#include <optional>
#include <string_view>

#include "sdspec/info_bounds.hpp"
#include "sdspec/mode_grid.hpp"
#include "sdspec/numerics.hpp"
#include "sdspec/spectral_models.hpp"

namespace sdspec {

// Detection problem: H0 has no displacement (S_X = 0), H1 has the spectrum
// S_X(w) = model.psd(w, theta_h1). All bounds assume equal priors.

enum class ExponentMethod {
  Quantum,
  Uspc,
  Homodyne,
  LowSnrUspc,
  LowSnrHomodyne,
};

std::string_view to_string(ExponentMethod method);

struct ExponentReport {
  double value = 0.0;
  /// Optimal Chernoff s, reported where an optimization over s happens.
  std::optional<double> s_star;
  ExponentMethod method = ExponentMethod::Quantum;
  double observation_time = 0.0;
  QuadratureMeta quadrature;
  bool grid_fallback = false;
};

/// (T/2) \int dw/2pi ln(1 + 2 S_k S_X).
ExponentReport quantum_chernoff(const NoiseSpectrumModel& model, double theta_h1,
                                const ProbeProfile& profile, double observation_time,
                                const QuadratureSpec& spec = {});

/// Finite-mode quantum exponent sum_m ln(1 + 2 S_k(w_m) S_X(w_m)).
ExponentReport quantum_chernoff_discrete(const NoiseSpectrumModel& model, double theta_h1,
                                         const ProbeProfile& profile, const ModeGrid& grid);

/// (T/2) \int dw/2pi ln(1 + 2 |alpha g|^2 S_X). The infimum over s of the
/// count-record Chernoff coefficient sits at s -> 1, so no optimization runs.
ExponentReport chernoff_uspc(const NoiseSpectrumModel& model, double theta_h1,
                             const ProbeProfile& profile, double observation_time,
                             const QuadratureSpec& spec = {});

/// sum_m ln(1 + N_m) on a mode grid; exp(-value) is the exact miss
/// probability of the count-based likelihood-ratio test.
ExponentReport chernoff_uspc_discrete(const NoiseSpectrumModel& model, double theta_h1,
                                      const ProbeProfile& profile, const ModeGrid& grid);

/// Per-mode homodyne Chernoff integrand,
/// ln[(1 + (1-s) r) / (1 + r)^(1-s)] with r = S_X / S_eta.
double homodyne_chernoff_density(double s, double snr);

/// sup over s in [0,1] of (T/2) \int dw/2pi homodyne_chernoff_density.
/// The integral is evaluated for each trial s, then maximized.
ExponentReport chernoff_homodyne(const NoiseSpectrumModel& model, double theta_h1,
                                 const ProbeProfile& profile, double observation_time,
                                 const QuadratureSpec& spec = {},
                                 double optimizer_tolerance = kDefaultOptimizerTolerance);

/// sup over s of sum_m homodyne_chernoff_density(s, r_m): the exact Chernoff
/// exponent of the per-mode exponential periodogram.
ExponentReport chernoff_homodyne_discrete(const NoiseSpectrumModel& model, double theta_h1,
                                          const ProbeProfile& profile, const ModeGrid& grid,
                                          double optimizer_tolerance = kDefaultOptimizerTolerance);

struct LowSnrExponents {
  ExponentReport uspc;
  ExponentReport homodyne;
};

/// uspc = T \int dw/2pi S_k S_X, homodyne = T \int dw/2pi (S_k S_X)^2.
LowSnrExponents chernoff_low_snr(const NoiseSpectrumModel& model, double theta_h1,
                                 const ProbeProfile& profile, double observation_time,
                                 const QuadratureSpec& spec = {});

struct ErrorProbabilityBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// lower = (1 - sqrt(1 - B^2))/2 from a Bhattacharyya coefficient (or any
/// lower bound on it such as the fidelity), upper = exp(-xi)/2.
ErrorProbabilityBounds error_prob_bounds(double bhattacharyya, double chernoff_exponent);

/// Uhlmann fidelity between the H0 and H1 probe states, exp(-zeta/2).
double fidelity_uspc(const NoiseSpectrumModel& model, double theta_h1,
                     const ProbeProfile& profile, double observation_time,
                     const QuadratureSpec& spec = {});

}  // namespace sdspec
