#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "sdspec/mode_grid.hpp"
#include "sdspec/spectral_models.hpp"

namespace sdspec {

/// Independent random streams are keyed by what they are used for.
enum class StreamPurpose : std::uint32_t {
  FourierCoefficients = 1,
  PhotonCounts = 2,
  Periodogram = 3,
  DetectionNull = 4,
  DetectionSignal = 5,
};

/// Master seed plus the rule deriving one engine per (trial, purpose).
/// Within a stream, modes m = 1..M consume draws in increasing order, so a
/// draw is a deterministic function of (trial, mode, purpose).
struct SeedSpec {
  std::uint64_t master = 0;

  std::mt19937_64 stream(std::uint64_t trial, StreamPurpose purpose) const;
};

/// Uniform on the open interval (0, 1) from the top 53 bits of one draw.
double open_uniform(std::mt19937_64& engine);

struct FourierCoefficients {
  ModeGrid grid;
  /// X_m for m = 1..M (index m-1); X_{-m} = conj(X_m) and X_0 = 0 are implicit.
  std::vector<std::complex<double>> values;
};

struct PhotonCountRecord {
  ModeGrid grid;
  std::vector<std::uint64_t> counts;
};

struct HomodynePeriodogram {
  ModeGrid grid;
  std::vector<double> values;
};

/// Mean sideband-pair photon numbers N_m = 2 |alpha g(w_m)|^2 S_X(w_m | theta).
std::vector<double> mean_photon_counts(const NoiseSpectrumModel& model, double theta,
                                       const ProbeProfile& profile, const ModeGrid& grid);

/// Independent complex Gaussians with E|X_m|^2 = S_X(w_m | theta).
FourierCoefficients sample_fourier_coeffs(const NoiseSpectrumModel& model, double theta,
                                          const ModeGrid& grid, const SeedSpec& seed,
                                          std::uint64_t trial = 0);

/// X(t) = (2/sqrt(T)) sum_m Re[X_m exp(-i w_m t)] at each requested time in [0, T].
std::vector<double> synthesize_process(const FourierCoefficients& coeffs,
                                       std::span<const double> times);

/// Draws from P(n) = N^n / (1 + N)^(n+1) for a mean count N, by inversion:
/// n = floor(ln U / ln(N / (1 + N))). Throws std::overflow_error past 2^63 - 1.
std::uint64_t sample_bose_einstein(double mean, std::mt19937_64& engine);

/// Exponential draw with the given mean, -mean ln U.
double sample_exponential(double mean, std::mt19937_64& engine);

PhotonCountRecord sample_uspc_counts(const NoiseSpectrumModel& model, double theta,
                                     const ProbeProfile& profile, const ModeGrid& grid,
                                     const SeedSpec& seed, std::uint64_t trial = 0);

/// Whittle periodogram ordinates: I_m exponential with mean S_eta(w_m) + S_X(w_m | theta).
HomodynePeriodogram sample_homodyne_periodogram(const NoiseSpectrumModel& model, double theta,
                                                const ProbeProfile& profile,
                                                const ModeGrid& grid, const SeedSpec& seed,
                                                std::uint64_t trial = 0);

// Row-per-mode text format: header "mode,omega,value", then one row per mode.
void write_record(std::ostream& out, const PhotonCountRecord& record);
void write_record(std::ostream& out, const HomodynePeriodogram& record);
PhotonCountRecord read_count_record(std::istream& in, double observation_time);
HomodynePeriodogram read_periodogram(std::istream& in, double observation_time);

}  // namespace sdspec
