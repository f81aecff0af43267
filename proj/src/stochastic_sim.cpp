#include "sdspec/stochastic_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sdspec {

std::mt19937_64 SeedSpec::stream(std::uint64_t trial, StreamPurpose purpose) const {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

double open_uniform(std::mt19937_64& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1p-53;
}

std::vector<double> mean_photon_counts(const NoiseSpectrumModel& model, double theta,
                                       const ProbeProfile& profile, const ModeGrid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t m = 1; m <= grid.size(); ++m) {
    const double w = grid.omega(m);
    out[m - 1] = 2.0 * profile.mean_flux() * profile.antisqueezing_gain(w) * model.psd(w, theta);
  }
  return out;
}

FourierCoefficients sample_fourier_coeffs(const NoiseSpectrumModel& model, double theta,
                                          const ModeGrid& grid, const SeedSpec& seed,
                                          std::uint64_t trial) {
  auto engine = seed.stream(trial, StreamPurpose::FourierCoefficients);
  std::normal_distribution<double> normal;
  FourierCoefficients out{grid, std::vector<std::complex<double>>(grid.size())};
  for (std::size_t m = 1; m <= grid.size(); ++m) {
    const double scale = std::sqrt(model.psd(grid.omega(m), theta) / 2.0);
    const double u = normal(engine);
    const double v = normal(engine);
    out.values[m - 1] = {scale * u, scale * v};
  }
  return out;
}

std::vector<double> synthesize_process(const FourierCoefficients& coeffs,
                                       std::span<const double> times) {
  const double period = coeffs.grid.observation_time();
  const double prefactor = 2.0 / std::sqrt(period);
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!(t >= 0.0 && t <= period)) {
      throw std::invalid_argument("synthesize_process: time outside [0, T]");
    }
    double sum = 0.0;
    for (std::size_t m = 1; m <= coeffs.values.size(); ++m) {
      const double phase = coeffs.grid.omega(m) * t;
      // Re[X exp(-i phase)] = Re X cos(phase) + Im X sin(phase)
      sum += coeffs.values[m - 1].real() * std::cos(phase) +
             coeffs.values[m - 1].imag() * std::sin(phase);
    }
    out.push_back(prefactor * sum);
  }
  return out;
}

std::uint64_t sample_bose_einstein(double mean, std::mt19937_64& engine) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::domain_error("sample_bose_einstein: mean must be finite and nonnegative");
  }
  const double u = open_uniform(engine);
  if (mean == 0.0) {
    return 0;
  }
  // ln(N / (1 + N)) = -log1p(1/N)
  const double n = std::floor(std::log(u) / -std::log1p(1.0 / mean));
  constexpr double kCap = 9223372036854775807.0;  // 2^63 - 1 rounds to 2^63
  if (!(n < kCap)) {
    throw std::overflow_error("sample_bose_einstein: count exceeds 2^63 - 1");
  }
  return static_cast<std::uint64_t>(n);
}

double sample_exponential(double mean, std::mt19937_64& engine) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::domain_error("sample_exponential: mean must be finite and nonnegative");
  }
  return -mean * std::log(open_uniform(engine));
}

PhotonCountRecord sample_uspc_counts(const NoiseSpectrumModel& model, double theta,
                                     const ProbeProfile& profile, const ModeGrid& grid,
                                     const SeedSpec& seed, std::uint64_t trial) {
  auto engine = seed.stream(trial, StreamPurpose::PhotonCounts);
  const auto means = mean_photon_counts(model, theta, profile, grid);
  PhotonCountRecord out{grid, std::vector<std::uint64_t>(grid.size())};
  for (std::size_t i = 0; i < means.size(); ++i) {
    out.counts[i] = sample_bose_einstein(means[i], engine);
  }
  return out;
}

HomodynePeriodogram sample_homodyne_periodogram(const NoiseSpectrumModel& model, double theta,
                                                const ProbeProfile& profile,
                                                const ModeGrid& grid, const SeedSpec& seed,
                                                std::uint64_t trial) {
  auto engine = seed.stream(trial, StreamPurpose::Periodogram);
  HomodynePeriodogram out{grid, std::vector<double>(grid.size())};
  for (std::size_t m = 1; m <= grid.size(); ++m) {
    const double w = grid.omega(m);
    out.values[m - 1] = sample_exponential(phase_psd(profile, w) + model.psd(w, theta), engine);
  }
  return out;
}

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <typename Value>
std::vector<Value> read_rows(std::istream& in, double observation_time, std::size_t& modes) {
  std::string line;
  std::vector<Value> values;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("mode,", 0) == 0) {
        continue;
      }
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::size_t m = 0;
    double omega = 0.0;
    Value v{};
    if (!(fields >> m >> omega >> v)) {
      throw std::runtime_error("record: malformed row '" + line + "'");
    }
    if (m != values.size() + 1) {
      throw std::runtime_error("record: mode indices must run 1..M in order");
    }
    const double expected = kTwoPi * static_cast<double>(m) / observation_time;
    if (std::abs(omega - expected) > 1e-9 * expected) {
      throw std::runtime_error("record: omega column does not match 2 pi m / T");
    }
    values.push_back(v);
  }
  modes = values.size();
  return values;
}

}  // namespace

void write_record(std::ostream& out, const PhotonCountRecord& record) {
  out << "mode,omega,value\n";
  for (std::size_t m = 1; m <= record.counts.size(); ++m) {
    out << m << ',' << format_double(record.grid.omega(m)) << ',' << record.counts[m - 1] << '\n';
  }
}

void write_record(std::ostream& out, const HomodynePeriodogram& record) {
  out << "mode,omega,value\n";
  for (std::size_t m = 1; m <= record.values.size(); ++m) {
    out << m << ',' << format_double(record.grid.omega(m)) << ','
        << format_double(record.values[m - 1]) << '\n';
  }
}

PhotonCountRecord read_count_record(std::istream& in, double observation_time) {
  std::size_t modes = 0;
  auto counts = read_rows<std::uint64_t>(in, observation_time, modes);
  return PhotonCountRecord{ModeGrid(observation_time, modes), std::move(counts)};
}

HomodynePeriodogram read_periodogram(std::istream& in, double observation_time) {
  std::size_t modes = 0;
  auto values = read_rows<double>(in, observation_time, modes);
  for (double v : values) {
    if (!(v >= 0.0)) {
      throw std::runtime_error("record: periodogram values must be nonnegative");
    }
  }
  return HomodynePeriodogram{ModeGrid(observation_time, modes), std::move(values)};
}

}  // namespace sdspec
