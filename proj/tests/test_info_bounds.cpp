#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sdspec/info_bounds.hpp"
#include "test_support.hpp"

using namespace sdspec;
using sdspec::testing::rel_err;
using doctest::Approx;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  }
  return out;
}

}  // namespace

TEST_CASE("flat band worked values") {
  const auto fb = testing::flat();
  CHECK(quantum_fisher_bound(fb.model, fb.profile, 1.0, 1.0).value == Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(fisher_uspc_continuum(fb.model, fb.profile, 1.0, 1.0).value == Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(fisher_uspc_continuum(fb.model, fb.profile, 0.1, 1.0).value == Approx(1.990050).epsilon(1e-6));
  CHECK(fisher_homodyne(fb.model, fb.profile, 1.0, 1.0).value == Approx(1.0).epsilon(1e-12));
  CHECK(fisher_homodyne(fb.model, fb.profile, 0.1, 1.0).value == Approx(0.039212).epsilon(1e-5));

  const auto closed = fisher_flat_closed_form(1.0, 1.0, 1.0);
  CHECK(closed.uspc == Approx(4.0 / 3.0));
  CHECK(closed.homodyne == Approx(1.0));
  const auto zero = fisher_flat_closed_form(0.0, 2.0, 3.0);
  CHECK(zero.uspc == Approx(12.0));
  CHECK(zero.homodyne == 0.0);
  const auto high = fisher_flat_closed_form(10.0, 1.0, 1.0);
  CHECK(high.uspc == Approx(4.0 / 102.0));
  CHECK(high.homodyne == Approx(4.0 / 102.01));
  CHECK_THROWS_AS(fisher_flat_closed_form(-1.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(fisher_flat_closed_form(1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("theta = 0 uses the analytic limit") {
  const auto fb = testing::flat(1.0, 1.0);
  CHECK(fisher_uspc_continuum(fb.model, fb.profile, 0.0, 1.0).value == Approx(2.0).epsilon(1e-12));
  CHECK(quantum_fisher_bound(fb.model, fb.profile, 0.0, 1.0).value == Approx(2.0).epsilon(1e-12));
  CHECK(fisher_homodyne(fb.model, fb.profile, 0.0, 1.0).value == 0.0);
}

TEST_CASE("theta-independent spectrum carries no information") {
  const auto model = NoiseSpectrumModel::general([](double, double) { return 0.3; },
                                                 [](double, double) { return 0.0; },
                                                 Support::symmetric_band(2.0));
  const ProbeProfile profile(1.0);
  CHECK(quantum_fisher_bound(model, profile, 1.0, 5.0).value == 0.0);
  CHECK(fisher_homodyne(model, profile, 1.0, 5.0).value == 0.0);
}

TEST_CASE("closed forms over a log-spaced theta grid") {
  for (double bt : {1.0, 7.5}) {
    const auto fb = testing::flat(1.0, 2.0);
    for (double theta : log_grid(1e-3, 10.0, 13)) {
      const auto want = fisher_flat_closed_form(theta, 1.0, bt);
      CHECK(rel_err(fisher_uspc_continuum(fb.model, fb.profile, theta, bt).value, want.uspc) <= 1e-9);
      CHECK(rel_err(fisher_homodyne(fb.model, fb.profile, theta, bt).value, want.homodyne) <= 1e-9);
      // The (1 + theta^2)^2 form of the homodyne value.
      const double t2 = theta * theta;
      CHECK(rel_err(4.0 * bt * t2 / ((1.0 + t2) * (1.0 + t2)), want.homodyne) <= 1e-12);
    }
  }
}

TEST_CASE("homodyne forms agree") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 30; ++i) {
    const auto cfg = testing::random_config(rng, i);
    for (double theta : {0.05, 1.0, 4.0}) {
      const double a = fisher_homodyne(cfg.model, cfg.profile, theta, 2.0).value;
      const double b = fisher_homodyne_snr_form(cfg.model, cfg.profile, theta, 2.0).value;
      CHECK(rel_err(b, a) <= 1e-8);
    }
  }
}

TEST_CASE("USPC information equals the quantum bound on random configurations") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> theta_u(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const auto cfg = testing::random_config(rng, i);
    const double theta = theta_u(rng);
    const double q = quantum_fisher_bound(cfg.model, cfg.profile, theta, 3.0).value;
    const double u = fisher_uspc_continuum(cfg.model, cfg.profile, theta, 3.0).value;
    CHECK(rel_err(u, q) <= 1e-12);
  }
}

TEST_CASE("ordering and linearity in T") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> theta_u(0.01, 5.0);
  for (int i = 0; i < 30; ++i) {
    const auto cfg = testing::random_config(rng, i);
    const double theta = theta_u(rng);
    const auto hom = fisher_homodyne(cfg.model, cfg.profile, theta, 1.0);
    const auto uspc = fisher_uspc_continuum(cfg.model, cfg.profile, theta, 1.0);
    const auto q = quantum_fisher_bound(cfg.model, cfg.profile, theta, 1.0);
    CHECK(hom.value <= uspc.value * (1.0 + 1e-9));
    CHECK(uspc.value <= q.value * (1.0 + 1e-9));
    CHECK(hom.value >= 0.0);

    CHECK(fisher_homodyne(cfg.model, cfg.profile, theta, 2.0).value == 2.0 * hom.value);
    CHECK(fisher_uspc_continuum(cfg.model, cfg.profile, theta, 2.0).value == 2.0 * uspc.value);
    CHECK(quantum_fisher_bound(cfg.model, cfg.profile, theta, 2.0).value == 2.0 * q.value);
    const auto low1 = fisher_low_snr(cfg.model, cfg.profile, theta, 1.0);
    const auto low2 = fisher_low_snr(cfg.model, cfg.profile, theta, 2.0);
    CHECK(low2.uspc.value == 2.0 * low1.uspc.value);
    CHECK(low2.homodyne.value == 2.0 * low1.homodyne.value);
  }
}

TEST_CASE("report metadata") {
  const auto fb = testing::flat();
  const auto r = fisher_homodyne(fb.model, fb.profile, 1.0, 4.0, QuadratureSpec{1e-8, 12});
  CHECK(r.method == InfoMethod::Homodyne);
  CHECK(r.observation_time == 4.0);
  CHECK(r.quadrature.relative_tolerance == 1e-8);
  CHECK(r.quadrature.estimated_error >= 0.0);
  CHECK(to_string(InfoMethod::UspcDiscrete) == "uspc-discrete");
  CHECK_THROWS_AS(fisher_homodyne(fb.model, fb.profile, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fisher_homodyne(fb.model, fb.profile, -1.0, 1.0), std::domain_error);
}

TEST_CASE("low-SNR forms") {
  const auto fb = testing::flat(1.0, 1.0);
  const auto zero = fisher_low_snr(fb.model, fb.profile, 0.0, 1.0);
  CHECK(zero.uspc.value == Approx(2.0).epsilon(1e-12));
  CHECK(zero.homodyne.value == 0.0);
  const double theta = 0.3;
  const auto low = fisher_low_snr(fb.model, fb.profile, theta, 1.0);
  CHECK(low.homodyne.value == Approx(4.0 * theta * theta).epsilon(1e-12));

  const auto tiny = fisher_low_snr(fb.model, fb.profile, 1e-3, 1.0);
  const auto full = fisher_flat_closed_form(1e-3, 1.0, 1.0);
  CHECK(rel_err(tiny.uspc.value, full.uspc) <= 1e-5);
  CHECK(rel_err(tiny.homodyne.value, full.homodyne) <= 1e-5);
}

TEST_CASE("low-SNR ratio error scales as theta squared") {
  // Tabulated shape so the check is not only about the flat band.
  std::mt19937_64 rng(9);
  const auto table = testing::random_table(rng, 8.0);
  const auto model = NoiseSpectrumModel::magnitude_squared([table](double w) { return table(w); },
                                                           table.support());
  const ProbeProfile profile(1.5);
  for (int which = 0; which < 2; ++which) {
    double c_max = 0.0;
    double c_min = INFINITY;
    for (double theta : log_grid(1e-4, 1e-2, 9)) {
      const auto low = fisher_low_snr(model, profile, theta, 1.0);
      const double full = which == 0 ? fisher_uspc_continuum(model, profile, theta, 1.0).value
                                     : fisher_homodyne(model, profile, theta, 1.0).value;
      const double approx = which == 0 ? low.uspc.value : low.homodyne.value;
      const double c = std::abs(full / approx - 1.0) / (theta * theta);
      c_max = std::max(c_max, c);
      c_min = std::min(c_min, c);
    }
    CHECK(std::isfinite(c_max));
    // A bounded constant: the fitted C barely moves across two decades.
    CHECK(c_max < 1e3);
    CHECK(c_max <= 1.5 * c_min + 1e-3);
  }
}

TEST_CASE("strong probe reaches the noise-limited ceiling") {
  const auto model = testing::box_model(0.5, 3.0);
  const ProbeProfile strong(1e8);
  const double theta = 0.7;
  // (d ln S)^2 / 2 = 2 / theta^2 over a band of total width 6.
  const double ceiling = 1.0 * (6.0 / kTwoPi) * 2.0 / (theta * theta);
  const double q = quantum_fisher_bound(model, strong, theta, 1.0).value;
  CHECK(q <= ceiling);
  CHECK(rel_err(q, ceiling) < 1e-7);
}

TEST_CASE("discrete USPC information") {
  // One mode with N = 2 |alpha|^2 R theta^2 = 2 at theta = 1.
  const auto model = testing::box_model(1.0, 10.0);
  const ProbeProfile profile(1.0);
  const ModeGrid one(1.0, 1);
  CHECK(fisher_uspc_discrete(model, profile, 1.0, one).value == Approx(8.0 / 3.0).epsilon(1e-14));

  // Modes outside the support carry N = 0 and dN = 0.
  const auto narrow = testing::box_model(1.0, 0.1);
  CHECK(fisher_uspc_discrete(narrow, profile, 1.0, ModeGrid(1.0, 5)).value == 0.0);

  const auto fb = testing::flat(1.0, 1.0);
  const auto grid = ModeGrid::for_band(1.0, 1e4);
  REQUIRE(grid.size() == 10000);
  for (double theta : {0.1, 1.0, 3.0}) {
    const double disc = fisher_uspc_discrete(fb.model, fb.profile, theta, grid).value;
    const double cont = fisher_uspc_continuum(fb.model, fb.profile, theta, 1e4).value;
    CHECK(std::abs(disc / cont - 1.0) <= 1e-3);
    const double hdisc = fisher_homodyne_discrete(fb.model, fb.profile, theta, grid).value;
    const double hcont = fisher_homodyne(fb.model, fb.profile, theta, 1e4).value;
    CHECK(std::abs(hdisc / hcont - 1.0) <= 1e-3);
  }
  const auto report = fisher_uspc_discrete(fb.model, fb.profile, 1.0, grid);
  CHECK(report.quadrature.modes == 10000);
  CHECK(report.quadrature.estimated_error == 0.0);
}

TEST_CASE("discrete sums approach the continuum for a smooth general model") {
  // S_X = theta exp(-w^2/2) on the whole line. Leaving out the DC mode costs
  // O(1/T), so the gap must shrink tenfold from T = 400 to T = 4000.
  const auto model = NoiseSpectrumModel::general(
      [](double w, double t) { return t * std::exp(-0.5 * w * w); },
      [](double w, double) { return std::exp(-0.5 * w * w); }, Support::whole_line(), 0.0, 100.0);
  const ProbeProfile profile(2.0);
  auto gaps = [&](double T, double theta) {
    const ModeGrid grid(T, static_cast<std::size_t>(12.0 * T / kTwoPi));
    const double u = fisher_uspc_discrete(model, profile, theta, grid).value /
                     fisher_uspc_continuum(model, profile, theta, T).value;
    const double h = fisher_homodyne_discrete(model, profile, theta, grid).value /
                     fisher_homodyne(model, profile, theta, T).value;
    return std::pair{std::abs(u - 1.0), std::abs(h - 1.0)};
  };
  for (double theta : {0.5, 2.0}) {
    const auto coarse = gaps(400.0, theta);
    const auto fine = gaps(4000.0, theta);
    CHECK(fine.first <= 1e-3);
    CHECK(fine.second <= 1e-3);
    CHECK(fine.first == Approx(coarse.first / 10.0).epsilon(0.05));
    CHECK(fine.second == Approx(coarse.second / 10.0).epsilon(0.05));
  }
}

TEST_CASE("convexity bound for a Gaussian displacement") {
  auto v = [](double t) { return t * t; };
  CHECK(convexity_bound_gaussian(v, 1.0, 1.0) == Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(convexity_bound_gaussian(v, 1.0, 1.0, [](double t) { return 2.0 * t; }) ==
        Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(convexity_bound_gaussian([](double) { return 2.0; }, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(convexity_bound_gaussian([](double) { return 0.0; }, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(convexity_bound_gaussian(v, 0.0, 1.0), std::domain_error);

  // Brute-force minimization of the objective over gamma'.
  for (double theta : {0.3, 1.0, 2.5}) {
    for (double v_k : {0.2, 1.0, 5.0}) {
      const double vx = theta * theta;
      const double dlog = 2.0 / theta;
      double best = INFINITY;
      double g_best = 0.0;
      const int n = 200001;
      for (int i = 0; i < n; ++i) {
        const double g = -dlog + 2.0 * dlog * i / (n - 1);
        const double val = convexity_objective(dlog, v_k, vx, g);
        if (val < best) {
          best = val;
          g_best = g;
        }
      }
      // Parabolic refinement around the grid minimum.
      const double h = 2.0 * dlog / (n - 1);
      const double fm = convexity_objective(dlog, v_k, vx, g_best - h);
      const double f0 = convexity_objective(dlog, v_k, vx, g_best);
      const double fp = convexity_objective(dlog, v_k, vx, g_best + h);
      const double shift = 0.5 * h * (fm - fp) / (fm - 2.0 * f0 + fp);
      best = std::min(best, convexity_objective(dlog, v_k, vx, g_best + shift));
      const double closed = convexity_bound_gaussian(v, v_k, theta, [](double t) { return 2.0 * t; });
      CHECK(rel_err(closed, best) <= 1e-6);
      // Also the K-tilde form (d ln v)^2 / (2 + 1/(v_k v)).
      CHECK(rel_err(closed, dlog * dlog / (2.0 + 1.0 / (v_k * vx))) <= 1e-12);
    }
  }
}

TEST_CASE("convexity bound depends on v_X only through first-order data") {
  // Adding (theta - 1)^3 changes curvature but not v or dv at theta = 1.
  auto base = [](double t) { return t * t; };
  auto bent = [](double t) { return t * t + 0.7 * std::pow(t - 1.0, 3); };
  for (double v_k : {0.5, 1.0, 3.0}) {
    CHECK(convexity_bound_gaussian(bent, v_k, 1.0) ==
          Approx(convexity_bound_gaussian(base, v_k, 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("object-size convexity bound") {
  CHECK(convexity_bound_object_size([](double) { return 1.0; }, -0.5, 0.5, 1.0) ==
        Approx(1.0 / 3.0).epsilon(1e-14));
  auto normal = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(kTwoPi); };
  CHECK(convexity_bound_object_size(normal, -INFINITY, INFINITY, 2.0) == Approx(8.0).epsilon(1e-9));
  CHECK(convexity_bound_object_size(std::vector<double>{0.0}, std::vector<double>{1.0}, 3.0) == 0.0);
  CHECK(convexity_bound_object_size(std::vector<double>{-1.0, 1.0}, std::vector<double>{0.5, 0.5},
                                    1.0) == 4.0);
  CHECK_THROWS_AS(convexity_bound_object_size([](double) { return 2.0; }, -0.5, 0.5, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(convexity_bound_object_size(std::vector<double>{0.0, 1.0},
                                              std::vector<double>{0.5, 0.6}, 1.0),
                  std::invalid_argument);
}
