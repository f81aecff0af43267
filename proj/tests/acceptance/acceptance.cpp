// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sdspec/detection_bounds.hpp"
#include "sdspec/inference.hpp"
#include "sdspec/info_bounds.hpp"
#include "sdspec/runs.hpp"
#include "test_support.hpp"

using namespace sdspec;
using sdspec::testing::rel_err;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  }
  return out;
}

// 1. Flat-band Fisher closed forms, runtime < 1 s.
Outcome flat_band_fisher() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto fb = testing::flat(1.0, 1.0);
  double worst = 0.0;
  for (double theta : {0.01, 0.1, 1.0, 10.0}) {
    const auto want = fisher_flat_closed_form(theta, 1.0, 1.0);
    worst = std::max(worst, rel_err(fisher_uspc_continuum(fb.model, fb.profile, theta, 1.0).value,
                                    4.0 / (theta * theta + 2.0)));
    worst = std::max(worst, rel_err(fisher_homodyne(fb.model, fb.profile, theta, 1.0).value,
                                    4.0 / (theta * theta + 2.0 + 1.0 / (theta * theta))));
    worst = std::max(worst, rel_err(want.uspc, 4.0 / (theta * theta + 2.0)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-9 && secs < 1.0, fmt("max rel err %.3g (tol 1e-9), %.3f s (limit 1 s)", worst, secs)};
}

// 2 and 3 share the randomized configuration set.
Outcome identity(bool exponents) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(exponents ? 303 : 202);
  std::uniform_real_distribution<double> param(0.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto cfg = testing::random_config(rng, i);
    const double p = param(rng);
    const double T = std::pow(10.0, std::uniform_real_distribution<double>(-1.0, 2.0)(rng));
    double a = 0.0;
    double b = 0.0;
    if (exponents) {
      a = chernoff_uspc(cfg.model, p, cfg.profile, T).value;
      b = quantum_chernoff(cfg.model, p, cfg.profile, T).value;
    } else {
      a = fisher_uspc_continuum(cfg.model, cfg.profile, p, T).value;
      b = quantum_fisher_bound(cfg.model, cfg.profile, p, T).value;
    }
    worst = std::max(worst, rel_err(a, b));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool fast = exponents || secs < 10.0;
  return {worst <= 1e-12 && fast,
          fmt("100 configs, max rel diff %.3g (tol 1e-12), %.3f s%s", worst, secs,
              exponents ? "" : " (limit 10 s)")};
}

// 4. Flat-band Chernoff values at phi = 1, BT = 1.
Outcome flat_band_chernoff() {
  const auto fb = testing::flat(1.0, 1.0);
  const double xi_uspc = chernoff_uspc(fb.model, 1.0, fb.profile, 1.0).value;
  const auto hom = chernoff_homodyne(fb.model, 1.0, fb.profile, 1.0);
  // Analytic reduction: f(s) = ln(2 - s) - (1 - s) ln 2, maximized at s = 2 - 1/ln 2.
  const double s_exact = 2.0 - 1.0 / std::log(2.0);
  const double xi_exact = std::log(2.0 - s_exact) - (1.0 - s_exact) * std::log(2.0);
  const double e_uspc = rel_err(xi_uspc, std::log(1.5));
  const double e_hom = std::abs(hom.value - xi_exact);
  const double e_s = std::abs(hom.s_star.value_or(-1.0) - s_exact);
  const bool ok = e_uspc <= 1e-9 && e_hom <= 1e-6 && e_s <= 1e-6;
  return {ok, fmt("xi_uspc=%.9f (ln1.5, rel err %.2g), xi_hom=%.9f (analytic %.9f), s*=%.7f "
                  "(analytic %.7f)",
                  xi_uspc, e_uspc, hom.value, xi_exact, *hom.s_star, s_exact)};
}

// 5. Low-SNR forms and the phi^2 exponent-ratio scaling.
Outcome low_snr() {
  const auto fb = testing::flat(1.0, 1.0);
  double worst = 0.0;
  std::vector<double> lx;
  std::vector<double> ly;
  for (double p : log_grid(1e-4, 1e-2, 9)) {
    const auto info = fisher_low_snr(fb.model, fb.profile, p, 1.0);
    worst = std::max(worst, std::abs(info.uspc.value /
                                         fisher_uspc_continuum(fb.model, fb.profile, p, 1.0).value -
                                     1.0));
    worst = std::max(worst, std::abs(info.homodyne.value /
                                         fisher_homodyne(fb.model, fb.profile, p, 1.0).value -
                                     1.0));
    const auto exps = chernoff_low_snr(fb.model, p, fb.profile, 1.0);
    const double xu = chernoff_uspc(fb.model, p, fb.profile, 1.0).value;
    const double xh = chernoff_homodyne(fb.model, p, fb.profile, 1.0).value;
    worst = std::max(worst, std::abs(exps.uspc.value / xu - 1.0));
    worst = std::max(worst, std::abs(exps.homodyne.value / xh - 1.0));
    lx.push_back(std::log(p));
    ly.push_back(std::log(xh / xu));
  }
  // Least-squares slope of log ratio against log phi.
  const double n = static_cast<double>(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const bool ok = worst <= 1e-3 && std::abs(slope - 2.0) <= 0.05;
  return {ok, fmt("max |approx/full-1| %.3g (tol 1e-3), ratio slope %.5f (2.0 +/- 0.05)", worst, slope)};
}

// 6. Exact USPC miss probability, runtime < 30 s.
Outcome uspc_miss() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto fb = testing::flat(1.0, 1.0);
  const McDetectionConfig cfg{.model = fb.model,
                              .profile = fb.profile,
                              .grid = ModeGrid::for_band(1.0, 10.0),
                              .theta_h1 = 1.0,
                              .trials = 100000,
                              .seed = SeedSpec{6},
                              .method = MeasurementMethod::Uspc};
  const auto r = mc_detection(cfg);
  const double p = std::pow(1.5, -10.0);
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.trials));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = cfg.grid.size() == 10 && std::abs(r.miss.value - p) <= 3.0 * sigma &&
                  r.false_alarm.value == 0.0 && secs < 30.0;
  return {ok, fmt("miss %.6f vs 1.5^-10 = %.6f (3 sigma = %.6f), false alarm %.3g, %.2f s",
                  r.miss.value, p, 3.0 * sigma, r.false_alarm.value, secs)};
}

// 7. MLE efficiency against the finite-mode CRB, runtime < 5 min.
Outcome crb_efficiency() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto fb = testing::flat(1.0, 1.0);
  std::string detail;
  bool ok = true;
  for (auto method : {MeasurementMethod::Uspc, MeasurementMethod::Homodyne}) {
    const McEstimationConfig cfg{.model = fb.model,
                                 .profile = fb.profile,
                                 .grid = ModeGrid::for_band(1.0, 1000.0),
                                 .theta_true = 1.0,
                                 .trials = 10000,
                                 .seed = SeedSpec{method == MeasurementMethod::Uspc ? 71u : 72u},
                                 .method = method};
    const auto r = mc_estimation(cfg);
    ok = ok && cfg.grid.size() == 1000 && r.efficiency >= 0.9 && r.efficiency <= 1.1;
    detail += fmt("%s MSE*J=%.4f (+/- %.4f) ", std::string(to_string(method)).c_str(),
                  r.efficiency, r.mse_stderr.value_or(0.0) * r.fisher);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ok = ok && secs < 300.0;
  return {ok, detail + fmt("in [0.9, 1.1], %.2f s", secs)};
}

// 8. Convexity bounds.
Outcome convexity() {
  auto v = [](double t) { return t * t; };
  const double closed = convexity_bound_gaussian(v, 1.0, 1.0);
  // Grid search over gamma' with a parabolic polish around the best node.
  const double dlog = 2.0;
  const int n = 400001;
  double best = INFINITY;
  double g_best = 0.0;
  const double lo = -4.0;
  const double hi = 4.0;
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double g = lo + h * i;
    const double val = convexity_objective(dlog, 1.0, 1.0, g);
    if (val < best) {
      best = val;
      g_best = g;
    }
  }
  const double fm = convexity_objective(dlog, 1.0, 1.0, g_best - h);
  const double fp = convexity_objective(dlog, 1.0, 1.0, g_best + h);
  const double shift = 0.5 * h * (fm - fp) / (fm - 2.0 * best + fp);
  best = std::min(best, convexity_objective(dlog, 1.0, 1.0, g_best + shift));
  const double size = convexity_bound_object_size([](double) { return 1.0; }, -0.5, 0.5, 1.0);
  const bool ok = std::abs(closed - 4.0 / 3.0) <= 1e-6 && std::abs(closed - best) <= 1e-6 &&
                  std::abs(size - 1.0 / 3.0) <= 1e-15;
  return {ok, fmt("gaussian %.12f (4/3), grid search %.12f, object size %.17g (1/3)", closed, best, size)};
}

// 9. Homodyne error probability inside the error-probability bracket.
Outcome homodyne_bracket() {
  const auto fb = testing::flat(1.0, 1.0);
  const McDetectionConfig cfg{.model = fb.model,
                              .profile = fb.profile,
                              .grid = ModeGrid::for_band(1.0, 200.0),
                              .theta_h1 = 1.0,
                              .trials = 100000,
                              .seed = SeedSpec{9},
                              .method = MeasurementMethod::Homodyne};
  const auto r = mc_detection(cfg);
  const double n = static_cast<double>(cfg.trials);
  // Binomial sigma of an equal-prior average over 2n draws, evaluated at each end.
  auto sigma = [n](double p) { return std::sqrt(p * (1.0 - p) / (2.0 * n)); };
  const double lo = r.bounds.lower;
  const double hi = r.bounds.upper;
  const bool ok = cfg.grid.size() == 200 && r.error.value >= lo - 3.0 * sigma(lo) &&
                  r.error.value <= hi + 3.0 * sigma(hi);
  const bool literal = r.error.value >= lo && r.error.value <= hi;
  return {ok, fmt("P_e=%.3g in [%.3g, %.3g] (3 sigma bands; literal %s), xi_disc=%.6f zeta_disc=%.6f",
                  r.error.value, lo, hi, literal ? "inside" : "outside", r.chernoff_exponent,
                  r.quantum_exponent)};
}

// 10. Determinism of every subcommand.
Outcome determinism() {
  std::string detail;
  bool ok = true;
  for (auto cmd : {Subcommand::FisherScan, Subcommand::ChernoffScan, Subcommand::McEstimate,
                   Subcommand::McDetect, Subcommand::SpectraDump}) {
    const Overrides base = {{"grid.T", "200"},      {"scan.start", "0.1"}, {"scan.stop", "3"},
                            {"scan.points", "5"},   {"mc.trials", "2000"}, {"mc.seed", "20240611"},
                            {"mc.method", "homodyne"}, {"dump.points", "257"}};
    auto run_once = [&](unsigned threads) {
      auto overrides = base;
      overrides.emplace_back("mc.threads", std::to_string(threads));
      std::ostringstream out;
      run(default_run_config(cmd, overrides), out);
      return out.str();
    };
    const auto a = run_once(4);
    const auto b = run_once(4);
    const bool same = !a.empty() && a == b;
    ok = ok && same;
    detail += fmt("%s %s ", std::string(to_string(cmd)).c_str(), same ? "identical" : "DIFFERS");
  }
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"flat-band Fisher closed forms", flat_band_fisher},
      {"USPC information equals the quantum bound", [] { return identity(false); }},
      {"USPC exponent equals the quantum exponent", [] { return identity(true); }},
      {"flat-band Chernoff values", flat_band_chernoff},
      {"low-SNR scalings", low_snr},
      {"exact USPC miss probability", uspc_miss},
      {"MLE efficiency against the CRB", crb_efficiency},
      {"convexity bounds", convexity},
      {"homodyne error-probability bracket", homodyne_bracket},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %2zu %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
