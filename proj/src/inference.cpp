#include "sdspec/inference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace sdspec {

std::string_view to_string(MeasurementMethod method) {
  return method == MeasurementMethod::Uspc ? "uspc" : "homodyne";
}

MeasurementMethod parse_measurement_method(std::string_view text) {
  if (text == "uspc") {
    return MeasurementMethod::Uspc;
  }
  if (text == "homodyne") {
    return MeasurementMethod::Homodyne;
  }
  throw std::invalid_argument("unknown measurement method '" + std::string(text) + "'");
}

Bracket default_bracket(double theta_true) { return {0.0, 10.0 * std::max(theta_true, 1.0)}; }

namespace {

constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

void check_grid(const ModeGrid& record_grid, std::size_t values) {
  if (record_grid.size() != values) {
    throw std::invalid_argument("record length does not match its mode grid");
  }
}

void check_bracket(const NoiseSpectrumModel& model, Bracket bracket) {
  if (!(bracket.lo < bracket.hi)) {
    throw std::invalid_argument("MLE bracket must satisfy lo < hi");
  }
  model.check_theta(bracket.lo);
  model.check_theta(bracket.hi);
}

// Modes are pooled by their theta-independent coefficients whenever the model
// factorizes (magnitude-squared), so that a likelihood evaluation costs one
// term per distinct spectral level and depends on counts only through
// per-level totals.
class UspcLikelihood {
 public:
  UspcLikelihood(const PhotonCountRecord& record, const NoiseSpectrumModel& model,
                 const ProbeProfile& profile)
      : model_(model), profile_(profile) {
    check_grid(record.grid, record.counts.size());
    const auto& grid = record.grid;
    if (model.kind() == ParametrizationKind::MagnitudeSquared) {
      std::map<double, Group> pooled;
      for (std::size_t m = 1; m <= grid.size(); ++m) {
        const double w = grid.omega(m);
        const double base = 2.0 * profile.mean_flux() * profile.antisqueezing_gain(w) * model.shape(w);
        auto& g = pooled[base];
        g.base = base;
        add_count(g, record.counts[m - 1]);
      }
      for (auto& [key, g] : pooled) {
        groups_.push_back(g);
      }
      factorized_ = true;
    } else {
      for (std::size_t m = 1; m <= grid.size(); ++m) {
        Group g;
        g.omega = grid.omega(m);
        add_count(g, record.counts[m - 1]);
        groups_.push_back(g);
      }
    }
  }

  double operator()(double theta) const {
    double total = 0.0;
    for (const auto& g : groups_) {
      const double mean =
          factorized_ ? theta * theta * g.base
                      : 2.0 * profile_.mean_flux() * profile_.antisqueezing_gain(g.omega) *
                            model_.psd(g.omega, theta);
      if (mean == 0.0) {
        if (g.count_total > 0) {
          return kMinusInfinity;
        }
        continue;
      }
      total += static_cast<double>(g.count_total) * -std::log1p(1.0 / mean) -
               static_cast<double>(g.modes) * std::log1p(mean);
    }
    return total;
  }

 private:
  struct Group {
    double base = 0.0;
    double omega = 0.0;
    std::uint64_t count_total = 0;
    std::uint64_t modes = 0;
  };

  static void add_count(Group& g, std::uint64_t n) {
    if (__builtin_add_overflow(g.count_total, n, &g.count_total)) {
      throw std::overflow_error("photon count total overflows 64 bits");
    }
    ++g.modes;
  }

  const NoiseSpectrumModel& model_;
  const ProbeProfile& profile_;
  std::vector<Group> groups_;
  bool factorized_ = false;
};

class WhittleLikelihood {
 public:
  WhittleLikelihood(const HomodynePeriodogram& record, const NoiseSpectrumModel& model,
                    const ProbeProfile& profile)
      : model_(model) {
    check_grid(record.grid, record.values.size());
    const auto& grid = record.grid;
    if (model.kind() == ParametrizationKind::MagnitudeSquared) {
      std::map<std::pair<double, double>, Group> pooled;
      for (std::size_t m = 1; m <= grid.size(); ++m) {
        const double w = grid.omega(m);
        const double noise = phase_psd(profile, w);
        const double shape = model.shape(w);
        auto& g = pooled[{noise, shape}];
        g.noise = noise;
        g.shape = shape;
        g.value_total += record.values[m - 1];
        ++g.modes;
      }
      for (auto& [key, g] : pooled) {
        groups_.push_back(g);
      }
      factorized_ = true;
    } else {
      for (std::size_t m = 1; m <= grid.size(); ++m) {
        Group g;
        g.omega = grid.omega(m);
        g.noise = phase_psd(profile, g.omega);
        g.value_total = record.values[m - 1];
        g.modes = 1;
        groups_.push_back(g);
      }
    }
  }

  double operator()(double theta) const {
    double total = 0.0;
    for (const auto& g : groups_) {
      const double signal = factorized_ ? theta * theta * g.shape : model_.psd(g.omega, theta);
      const double mean = g.noise + signal;
      total -= static_cast<double>(g.modes) * std::log(mean) + g.value_total / mean;
    }
    return total;
  }

 private:
  struct Group {
    double noise = 0.0;
    double shape = 0.0;
    double omega = 0.0;
    double value_total = 0.0;
    std::uint64_t modes = 0;
  };

  const NoiseSpectrumModel& model_;
  std::vector<Group> groups_;
  bool factorized_ = false;
};

template <typename Likelihood>
MleResult maximize_likelihood(const Likelihood& likelihood, Bracket bracket, double tol) {
  const auto best = maximize_1d([&](double theta) { return likelihood(theta); }, bracket.lo,
                                bracket.hi, tol);
  MleResult out;
  out.theta_hat = best.s_star;
  out.log_likelihood = best.f_star;
  out.converged = !best.grid_fallback;
  out.at_boundary = best.s_star == bracket.lo || best.s_star == bracket.hi;
  return out;
}

// Runs body(i) for i in [0, n) on `threads` workers with a static partition.
// The first exception thrown by any worker is rethrown on the caller.
template <typename Body>
void parallel_for(std::uint64_t n, unsigned threads, Body body) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) {
      body(i);
    }
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = n * w / workers;
    const std::uint64_t end = n * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::uint64_t i = begin; i < end; ++i) {
          body(i);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

// Jackknife standard error of a sample mean.
std::optional<double> jackknife_stderr(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) {
    return std::nullopt;
  }
  double sum = 0.0;
  for (double v : x) {
    sum += v;
  }
  const double nm1 = static_cast<double>(n - 1);
  double loo_mean = 0.0;
  for (double v : x) {
    loo_mean += (sum - v) / nm1;
  }
  loo_mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) {
    const double d = (sum - v) / nm1 - loo_mean;
    ss += d * d;
  }
  return std::sqrt(nm1 / static_cast<double>(n) * ss);
}

ProbabilityEstimate binomial_estimate(std::uint64_t hits, std::uint64_t trials) {
  ProbabilityEstimate out;
  out.value = static_cast<double>(hits) / static_cast<double>(trials);
  out.standard_error = std::sqrt(out.value * (1.0 - out.value) / static_cast<double>(trials));
  return out;
}

}  // namespace

double loglik_uspc(const PhotonCountRecord& counts, const NoiseSpectrumModel& model,
                   const ProbeProfile& profile, double theta) {
  model.check_theta(theta);
  return UspcLikelihood(counts, model, profile)(theta);
}

double loglik_homodyne(const HomodynePeriodogram& periodogram, const NoiseSpectrumModel& model,
                       const ProbeProfile& profile, double theta) {
  model.check_theta(theta);
  return WhittleLikelihood(periodogram, model, profile)(theta);
}

MleResult mle_uspc(const PhotonCountRecord& counts, const NoiseSpectrumModel& model,
                   const ProbeProfile& profile, Bracket bracket, double optimizer_tolerance) {
  check_bracket(model, bracket);
  const UspcLikelihood likelihood(counts, model, profile);
  return maximize_likelihood(likelihood, bracket, optimizer_tolerance);
}

MleResult mle_homodyne(const HomodynePeriodogram& periodogram, const NoiseSpectrumModel& model,
                       const ProbeProfile& profile, Bracket bracket, double optimizer_tolerance) {
  check_bracket(model, bracket);
  const WhittleLikelihood likelihood(periodogram, model, profile);
  return maximize_likelihood(likelihood, bracket, optimizer_tolerance);
}

Hypothesis lrt_detect_uspc(const PhotonCountRecord& counts) {
  const bool any = std::any_of(counts.counts.begin(), counts.counts.end(),
                               [](std::uint64_t n) { return n != 0; });
  return any ? Hypothesis::H1 : Hypothesis::H0;
}

namespace {

struct HomodyneTest {
  std::vector<double> weights;  // 1/S_eta - 1/(S_eta + S_X)
  double offset = 0.0;          // sum ln(1 + S_X/S_eta)

  HomodyneTest(const NoiseSpectrumModel& model, double theta_h1, const ProbeProfile& profile,
               const ModeGrid& grid) {
    model.check_theta(theta_h1);
    weights.resize(grid.size());
    for (std::size_t m = 1; m <= grid.size(); ++m) {
      const double w = grid.omega(m);
      const double noise = phase_psd(profile, w);
      const double signal = model.psd(w, theta_h1);
      weights[m - 1] = 1.0 / noise - 1.0 / (noise + signal);
      offset += std::log1p(signal / noise);
    }
  }

  double statistic(const std::vector<double>& values) const {
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      total += values[i] * weights[i];
    }
    return total - offset;
  }
};

}  // namespace

double homodyne_log_likelihood_ratio(const HomodynePeriodogram& periodogram,
                                     const NoiseSpectrumModel& model, double theta_h1,
                                     const ProbeProfile& profile) {
  check_grid(periodogram.grid, periodogram.values.size());
  return HomodyneTest(model, theta_h1, profile, periodogram.grid).statistic(periodogram.values);
}

Hypothesis lrt_detect_homodyne(const HomodynePeriodogram& periodogram,
                               const NoiseSpectrumModel& model, double theta_h1,
                               const ProbeProfile& profile, double threshold) {
  return homodyne_log_likelihood_ratio(periodogram, model, theta_h1, profile) >= threshold
             ? Hypothesis::H1
             : Hypothesis::H0;
}

McEstimationResult mc_estimation(const McEstimationConfig& config) {
  if (config.trials < 1) {
    throw std::invalid_argument("mc_estimation: need at least one trial");
  }
  config.model.check_theta(config.theta_true);
  const Bracket bracket = config.bracket.value_or(default_bracket(config.theta_true));
  check_bracket(config.model, bracket);

  std::vector<double> estimates(config.trials);
  std::vector<char> boundary(config.trials, 0);
  parallel_for(config.trials, config.threads, [&](std::uint64_t trial) {
    MleResult fit;
    if (config.method == MeasurementMethod::Uspc) {
      const auto record = sample_uspc_counts(config.model, config.theta_true, config.profile,
                                             config.grid, config.seed, trial);
      fit = mle_uspc(record, config.model, config.profile, bracket, config.optimizer_tolerance);
    } else {
      const auto record = sample_homodyne_periodogram(config.model, config.theta_true,
                                                      config.profile, config.grid, config.seed,
                                                      trial);
      fit = mle_homodyne(record, config.model, config.profile, bracket,
                         config.optimizer_tolerance);
    }
    estimates[trial] = fit.theta_hat;
    boundary[trial] = fit.at_boundary ? 1 : 0;
  });

  McEstimationResult out;
  out.trials = config.trials;
  std::vector<double> errors(config.trials);
  std::vector<double> squared(config.trials);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t i = 0; i < config.trials; ++i) {
    errors[i] = estimates[i] - config.theta_true;
    squared[i] = errors[i] * errors[i];
    sum += estimates[i];
    sum_sq += squared[i];
    out.boundary_hits += static_cast<std::uint64_t>(boundary[i]);
  }
  const double n = static_cast<double>(config.trials);
  out.mean_estimate = sum / n;
  out.bias = out.mean_estimate - config.theta_true;
  out.bias_stderr = jackknife_stderr(errors);
  out.mse = sum_sq / n;
  out.mse_stderr = jackknife_stderr(squared);
  out.fisher = config.method == MeasurementMethod::Uspc
                   ? fisher_uspc_discrete(config.model, config.profile, config.theta_true,
                                          config.grid)
                         .value
                   : fisher_homodyne_discrete(config.model, config.profile, config.theta_true,
                                              config.grid)
                         .value;
  out.crb = out.fisher > 0.0 ? 1.0 / out.fisher : std::numeric_limits<double>::infinity();
  out.efficiency = out.mse * out.fisher;
  return out;
}

McDetectionResult mc_detection(const McDetectionConfig& config) {
  if (config.trials < 1) {
    throw std::invalid_argument("mc_detection: need at least one trial");
  }
  config.model.check_theta(config.theta_h1);

  // Per-trial decisions: bit 0 = false alarm under H0, bit 1 = miss under H1.
  std::vector<unsigned char> outcome(config.trials, 0);
  if (config.method == MeasurementMethod::Uspc) {
    const auto means = mean_photon_counts(config.model, config.theta_h1, config.profile, config.grid);
    parallel_for(config.trials, config.threads, [&](std::uint64_t trial) {
      // Under H0 every mode is in vacuum; sampling still goes through the
      // count generator so both hypotheses share one code path.
      auto null_stream = config.seed.stream(trial, StreamPurpose::DetectionNull);
      auto signal_stream = config.seed.stream(trial, StreamPurpose::DetectionSignal);
      PhotonCountRecord h0{config.grid, std::vector<std::uint64_t>(config.grid.size())};
      PhotonCountRecord h1{config.grid, std::vector<std::uint64_t>(config.grid.size())};
      for (std::size_t i = 0; i < means.size(); ++i) {
        h0.counts[i] = sample_bose_einstein(0.0, null_stream);
        h1.counts[i] = sample_bose_einstein(means[i], signal_stream);
      }
      unsigned char bits = 0;
      if (lrt_detect_uspc(h0) == Hypothesis::H1) {
        bits |= 1;
      }
      if (lrt_detect_uspc(h1) == Hypothesis::H0) {
        bits |= 2;
      }
      outcome[trial] = bits;
    });
  } else {
    const HomodyneTest test(config.model, config.theta_h1, config.profile, config.grid);
    std::vector<double> noise(config.grid.size());
    std::vector<double> signal(config.grid.size());
    for (std::size_t m = 1; m <= config.grid.size(); ++m) {
      noise[m - 1] = phase_psd(config.profile, config.grid.omega(m));
      signal[m - 1] = config.model.psd(config.grid.omega(m), config.theta_h1);
    }
    parallel_for(config.trials, config.threads, [&](std::uint64_t trial) {
      auto null_stream = config.seed.stream(trial, StreamPurpose::DetectionNull);
      auto signal_stream = config.seed.stream(trial, StreamPurpose::DetectionSignal);
      std::vector<double> h0(noise.size());
      std::vector<double> h1(noise.size());
      for (std::size_t i = 0; i < noise.size(); ++i) {
        h0[i] = sample_exponential(noise[i], null_stream);
        h1[i] = sample_exponential(noise[i] + signal[i], signal_stream);
      }
      unsigned char bits = 0;
      if (test.statistic(h0) >= config.threshold) {
        bits |= 1;
      }
      if (test.statistic(h1) < config.threshold) {
        bits |= 2;
      }
      outcome[trial] = bits;
    });
  }

  std::uint64_t false_alarms = 0;
  std::uint64_t misses = 0;
  for (auto bits : outcome) {
    false_alarms += bits & 1u;
    misses += (bits >> 1) & 1u;
  }

  McDetectionResult out;
  out.trials = config.trials;
  out.false_alarm = binomial_estimate(false_alarms, config.trials);
  out.miss = binomial_estimate(misses, config.trials);
  out.error.value = 0.5 * (out.false_alarm.value + out.miss.value);
  out.error.standard_error =
      0.5 * std::hypot(out.false_alarm.standard_error, out.miss.standard_error);

  out.quantum_exponent =
      quantum_chernoff_discrete(config.model, config.theta_h1, config.profile, config.grid).value;
  out.fidelity = std::exp(-0.5 * out.quantum_exponent);
  if (config.method == MeasurementMethod::Uspc) {
    out.chernoff_exponent =
        chernoff_uspc_discrete(config.model, config.theta_h1, config.profile, config.grid).value;
    out.exact_miss = std::exp(-out.chernoff_exponent);
  } else {
    const auto xi = chernoff_homodyne_discrete(config.model, config.theta_h1, config.profile,
                                               config.grid, config.optimizer_tolerance);
    out.chernoff_exponent = xi.value;
    out.s_star = xi.s_star;
  }
  out.bounds = error_prob_bounds(out.fidelity, out.chernoff_exponent);
  return out;
}

}  // namespace sdspec
