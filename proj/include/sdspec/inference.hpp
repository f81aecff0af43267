#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "sdspec/detection_bounds.hpp"
#include "sdspec/info_bounds.hpp"
#include "sdspec/mode_grid.hpp"
#include "sdspec/numerics.hpp"
#include "sdspec/spectral_models.hpp"
#include "sdspec/stochastic_sim.hpp"

namespace sdspec {

enum class MeasurementMethod { Uspc, Homodyne };

std::string_view to_string(MeasurementMethod method);
MeasurementMethod parse_measurement_method(std::string_view text);

enum class Hypothesis { H0, H1 };

struct Bracket {
  double lo = 0.0;
  double hi = 1.0;
};

/// [0, 10 max(theta, 1)].
Bracket default_bracket(double theta_true);

struct MleResult {
  double theta_hat = 0.0;
  double log_likelihood = 0.0;
  /// False when the optimizer had to fall back to a grid scan.
  bool converged = true;
  /// The estimate sits on a bracket end (e.g. an all-zero count record).
  bool at_boundary = false;
};

/// Bose-Einstein log-likelihood sum_m [n_m ln(N_m/(1+N_m)) - ln(1+N_m)].
/// Returns -infinity when a mode with N_m = 0 has a nonzero count.
double loglik_uspc(const PhotonCountRecord& counts, const NoiseSpectrumModel& model,
                   const ProbeProfile& profile, double theta);

/// Whittle log-likelihood sum_m [-ln(S_eta + S_X) - I_m / (S_eta + S_X)].
double loglik_homodyne(const HomodynePeriodogram& periodogram, const NoiseSpectrumModel& model,
                       const ProbeProfile& profile, double theta);

MleResult mle_uspc(const PhotonCountRecord& counts, const NoiseSpectrumModel& model,
                   const ProbeProfile& profile, Bracket bracket,
                   double optimizer_tolerance = kDefaultOptimizerTolerance);

MleResult mle_homodyne(const HomodynePeriodogram& periodogram, const NoiseSpectrumModel& model,
                       const ProbeProfile& profile, Bracket bracket,
                       double optimizer_tolerance = kDefaultOptimizerTolerance);

/// H0 gives the all-zero record with probability one, so the likelihood-ratio
/// test declares H1 on any nonzero count.
Hypothesis lrt_detect_uspc(const PhotonCountRecord& counts);

/// Log-likelihood ratio ln f1/f0 of a periodogram,
/// sum_m I_m [1/S_eta - 1/(S_eta + S_X)] - sum_m ln(1 + S_X/S_eta).
double homodyne_log_likelihood_ratio(const HomodynePeriodogram& periodogram,
                                     const NoiseSpectrumModel& model, double theta_h1,
                                     const ProbeProfile& profile);

/// H1 iff the log-likelihood ratio reaches `threshold` (0 for equal priors).
Hypothesis lrt_detect_homodyne(const HomodynePeriodogram& periodogram,
                               const NoiseSpectrumModel& model, double theta_h1,
                               const ProbeProfile& profile, double threshold = 0.0);

struct McEstimationConfig {
  NoiseSpectrumModel model;
  ProbeProfile profile;
  ModeGrid grid;
  double theta_true = 1.0;
  std::uint64_t trials = 1;
  SeedSpec seed;
  MeasurementMethod method = MeasurementMethod::Uspc;
  std::optional<Bracket> bracket;
  double optimizer_tolerance = kDefaultOptimizerTolerance;
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

struct McEstimationResult {
  std::uint64_t trials = 0;
  double mean_estimate = 0.0;
  double bias = 0.0;
  std::optional<double> bias_stderr;
  double mse = 0.0;
  /// Jackknife standard error; absent for a single trial.
  std::optional<double> mse_stderr;
  /// Finite-mode Fisher information of the simulated measurement.
  double fisher = 0.0;
  double crb = 0.0;
  double efficiency = 0.0;  // mse * fisher
  std::uint64_t boundary_hits = 0;
};

McEstimationResult mc_estimation(const McEstimationConfig& config);

struct McDetectionConfig {
  NoiseSpectrumModel model;
  ProbeProfile profile;
  ModeGrid grid;
  double theta_h1 = 1.0;
  std::uint64_t trials = 1;
  SeedSpec seed;
  MeasurementMethod method = MeasurementMethod::Uspc;
  double threshold = 0.0;
  double optimizer_tolerance = kDefaultOptimizerTolerance;
  unsigned threads = 0;
};

struct ProbabilityEstimate {
  double value = 0.0;
  double standard_error = 0.0;  // Wald binomial
};

struct McDetectionResult {
  std::uint64_t trials = 0;  // per hypothesis
  ProbabilityEstimate false_alarm;
  ProbabilityEstimate miss;
  ProbabilityEstimate error;  // equal-prior average
  /// Finite-mode Chernoff exponent of the simulated measurement.
  double chernoff_exponent = 0.0;
  std::optional<double> s_star;
  /// Finite-mode quantum exponent and the fidelity exp(-zeta/2).
  double quantum_exponent = 0.0;
  double fidelity = 1.0;
  ErrorProbabilityBounds bounds;
  /// Exact miss probability exp(-xi) for the count-based test.
  std::optional<double> exact_miss;
};

McDetectionResult mc_detection(const McDetectionConfig& config);

}  // namespace sdspec
