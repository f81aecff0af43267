#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "sdspec/mode_grid.hpp"
#include "sdspec/numerics.hpp"
#include "sdspec/spectral_models.hpp"

namespace sdspec {

enum class InfoMethod {
  QuantumBound,
  UspcContinuum,
  UspcDiscrete,
  Homodyne,
  HomodyneDiscrete,
  LowSnrUspc,
  LowSnrHomodyne,
  FlatClosedForm,
};

std::string_view to_string(InfoMethod method);

/// Quadrature bookkeeping attached to analytic results. Discrete (finite-mode)
/// results carry zero error and the mode count instead.
struct QuadratureMeta {
  double relative_tolerance = 0.0;
  double estimated_error = 0.0;
  std::size_t modes = 0;
};

/// A Fisher information (or an upper bound on it) for a record of length T.
struct InfoReport {
  double value = 0.0;
  InfoMethod method = InfoMethod::QuantumBound;
  double observation_time = 0.0;
  QuadratureMeta quadrature;
};

/// Extended-convexity upper bound on the quantum Fisher information,
/// T \int dw/2pi (d ln S_X)^2 / (2 + 1/(S_k S_X)).
InfoReport quantum_fisher_bound(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                                double theta, double observation_time,
                                const QuadratureSpec& spec = {});

/// Long-time Fisher information of unsqueeze-then-count, with
/// |alpha g|^2 taken from the probe profile.
InfoReport fisher_uspc_continuum(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                                 double theta, double observation_time,
                                 const QuadratureSpec& spec = {});

/// Exact finite-mode information of the Bose-Einstein count model,
/// sum_m (d ln N_m)^2 / (1 + 1/N_m) with N_m = 2 |alpha g(w_m)|^2 S_X(w_m).
InfoReport fisher_uspc_discrete(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                                double theta, const ModeGrid& grid);

/// Homodyne (Whittle) information T \int dw/2pi (dS_X)^2 / (2 (S_X + S_eta)^2)
/// with the quantum-limited S_eta = 1/(4 S_k).
InfoReport fisher_homodyne(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                           double theta, double observation_time,
                           const QuadratureSpec& spec = {});

/// Same quantity written in terms of the spectral SNR,
/// (d ln S_X)^2 / (2 + 4 S_eta/S_X + 2 (S_eta/S_X)^2). Kept as an independent
/// algebraic route for cross-checks; points with S_X = 0 contribute their limit 0.
InfoReport fisher_homodyne_snr_form(const NoiseSpectrumModel& model,
                                    const ProbeProfile& profile, double theta,
                                    double observation_time, const QuadratureSpec& spec = {});

/// Per-mode exponential periodogram information, sum_m (dS_X)^2 / (S_X + S_eta)^2.
InfoReport fisher_homodyne_discrete(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                                    double theta, const ModeGrid& grid);

struct LowSnrInfo {
  InfoReport uspc;
  InfoReport homodyne;
};

/// Leading-order expansions for S_X / S_eta << 1:
/// uspc = T \int S_k S_X (d ln S_X)^2, homodyne = 8 T \int (S_k S_X)^2 (d ln S_X)^2.
LowSnrInfo fisher_low_snr(const NoiseSpectrumModel& model, const ProbeProfile& profile,
                          double theta, double observation_time, const QuadratureSpec& spec = {});

struct FlatBandInfo {
  double uspc = 0.0;
  double homodyne = 0.0;
};

/// 4BT/(theta^2 + 2) and 4BT/(theta^2 + 2 + 1/theta^2); the homodyne value
/// at theta = 0 is its limit 0.
FlatBandInfo fisher_flat_closed_form(double theta, double bandwidth, double observation_time);

/// Single-mode extended-convexity bound for a Gaussian displacement of
/// variance v_X(theta), using the optimal rescaling
/// d ln gamma = d ln v_X / (2 + 4 v_k v_X). Without `dvariance`, the
/// derivative is a central difference with step 1e-6 max(1, |theta|).
double convexity_bound_gaussian(const std::function<double(double)>& variance, double v_k,
                                double theta,
                                const std::function<double(double)>& dvariance = {});

/// The extended-convexity objective 4 v_k v_X g^2 + (d ln v_X - 2 g)^2 / 2 as a
/// function of g = d ln gamma.
double convexity_objective(double dlog_variance, double v_k, double variance, double dlog_gamma);

/// Object-size convexity bound 4 v_k \int w(Z) Z^2 dZ for a density w on
/// [z_lo, z_hi]. Throws std::invalid_argument if w does not integrate to 1
/// within 1e-6.
double convexity_bound_object_size(const RealFunction& density, double z_lo, double z_hi,
                                   double v_k, const QuadratureSpec& spec = {});

/// Discrete version for atomic distributions (weights must sum to 1).
double convexity_bound_object_size(const std::vector<double>& points,
                                   const std::vector<double>& weights, double v_k);

namespace detail {

struct SupportIntegral {
  double value = 0.0;
  double error = 0.0;
};

/// \int f over the support of `model`, piece by piece.
SupportIntegral integrate_over_support(const NoiseSpectrumModel& model, const RealFunction& f,
                                       const QuadratureSpec& spec);

}  // namespace detail

}  // namespace sdspec
