// Python bindings. Models are wrapped together with their probe so every call
// takes one `Setup` object; heavy loops release the GIL.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sdspec/detection_bounds.hpp"
#include "sdspec/inference.hpp"
#include "sdspec/info_bounds.hpp"
#include "sdspec/runs.hpp"
#include "sdspec/stochastic_sim.hpp"

namespace py = pybind11;
using namespace sdspec;

namespace {

struct Setup {
  NoiseSpectrumModel model;
  ProbeProfile profile;
  double bandwidth;
};

Setup flat_band(double bandwidth, double probe_psd) {
  auto fb = make_flat_band(FlatBandConfig{bandwidth, probe_psd, 1.0});
  return Setup{fb.model, fb.profile, bandwidth};
}

Setup tabulated(std::vector<double> omega, std::vector<double> shape, double probe_psd) {
  TabulatedSpectrum table(std::move(omega), std::move(shape));
  const double bandwidth = table.support().max_abs_frequency() / kTwoPi;
  auto model = NoiseSpectrumModel::magnitude_squared(table, table.support());
  return Setup{model, ProbeProfile(probe_psd), bandwidth};
}

QuadratureSpec quad(double tol) { return QuadratureSpec{tol, 15}; }

ModeGrid grid_for(const Setup& s, double T, std::size_t modes) {
  return modes > 0 ? ModeGrid(T, modes) : ModeGrid::for_band(s.bandwidth, T);
}

py::dict estimation_dict(const McEstimationResult& r) {
  py::dict d;
  d["trials"] = r.trials;
  d["mean_estimate"] = r.mean_estimate;
  d["bias"] = r.bias;
  d["bias_stderr"] = r.bias_stderr;
  d["mse"] = r.mse;
  d["mse_stderr"] = r.mse_stderr;
  d["fisher"] = r.fisher;
  d["crb"] = r.crb;
  d["efficiency"] = r.efficiency;
  d["boundary_hits"] = r.boundary_hits;
  return d;
}

py::dict detection_dict(const McDetectionResult& r) {
  py::dict d;
  d["trials"] = r.trials;
  d["p_false_alarm"] = r.false_alarm.value;
  d["p_miss"] = r.miss.value;
  d["p_error"] = r.error.value;
  d["p_error_stderr"] = r.error.standard_error;
  d["chernoff_exponent"] = r.chernoff_exponent;
  d["s_star"] = r.s_star;
  d["quantum_exponent"] = r.quantum_exponent;
  d["fidelity"] = r.fidelity;
  d["lower_bound"] = r.bounds.lower;
  d["upper_bound"] = r.bounds.upper;
  d["exact_miss"] = r.exact_miss;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Information and detection limits for stochastic-displacement spectroscopy";

  py::class_<Setup>(m, "Setup", "A displacement-noise model paired with its probe.")
      .def_readonly("bandwidth", &Setup::bandwidth)
      .def("psd", [](const Setup& s, double w, double theta) { return s.model.psd(w, theta); })
      .def("probe_psd", [](const Setup& s, double w) { return probe_psd(s.profile, w); })
      .def("phase_psd", [](const Setup& s, double w) { return phase_psd(s.profile, w); });

  m.def("flat_band", &flat_band, py::arg("bandwidth") = 1.0, py::arg("probe_psd") = 1.0);
  m.def("tabulated", &tabulated, py::arg("omega"), py::arg("shape"), py::arg("probe_psd") = 1.0,
        "Magnitude-squared model theta^2 R(omega) with R linearly interpolated.");

  m.def("fisher_uspc", [](const Setup& s, double theta, double T, double tol) {
    return fisher_uspc_continuum(s.model, s.profile, theta, T, quad(tol)).value;
  }, py::arg("setup"), py::arg("theta"), py::arg("T"), py::arg("tol") = 1e-9);
  m.def("fisher_homodyne", [](const Setup& s, double theta, double T, double tol) {
    return fisher_homodyne(s.model, s.profile, theta, T, quad(tol)).value;
  }, py::arg("setup"), py::arg("theta"), py::arg("T"), py::arg("tol") = 1e-9);
  m.def("quantum_fisher_bound", [](const Setup& s, double theta, double T, double tol) {
    return quantum_fisher_bound(s.model, s.profile, theta, T, quad(tol)).value;
  }, py::arg("setup"), py::arg("theta"), py::arg("T"), py::arg("tol") = 1e-9);
  m.def("fisher_low_snr", [](const Setup& s, double theta, double T) {
    const auto r = fisher_low_snr(s.model, s.profile, theta, T);
    return py::make_tuple(r.uspc.value, r.homodyne.value);
  }, py::arg("setup"), py::arg("theta"), py::arg("T"));
  m.def("fisher_flat_closed_form", [](double theta, double B, double T) {
    const auto r = fisher_flat_closed_form(theta, B, T);
    return py::make_tuple(r.uspc, r.homodyne);
  }, py::arg("theta"), py::arg("B"), py::arg("T"));

  m.def("quantum_chernoff", [](const Setup& s, double phi, double T) {
    return quantum_chernoff(s.model, phi, s.profile, T).value;
  }, py::arg("setup"), py::arg("phi"), py::arg("T"));
  m.def("chernoff_uspc", [](const Setup& s, double phi, double T) {
    return chernoff_uspc(s.model, phi, s.profile, T).value;
  }, py::arg("setup"), py::arg("phi"), py::arg("T"));
  m.def("chernoff_homodyne", [](const Setup& s, double phi, double T) {
    const auto r = chernoff_homodyne(s.model, phi, s.profile, T);
    return py::make_tuple(r.value, r.s_star.value_or(0.0));
  }, py::arg("setup"), py::arg("phi"), py::arg("T"), "Returns (exponent, s_star).");
  m.def("chernoff_low_snr", [](const Setup& s, double phi, double T) {
    const auto r = chernoff_low_snr(s.model, phi, s.profile, T);
    return py::make_tuple(r.uspc.value, r.homodyne.value);
  }, py::arg("setup"), py::arg("phi"), py::arg("T"));
  m.def("fidelity_uspc", [](const Setup& s, double phi, double T) {
    return fidelity_uspc(s.model, phi, s.profile, T);
  }, py::arg("setup"), py::arg("phi"), py::arg("T"));
  m.def("error_prob_bounds", [](double b, double xi) {
    const auto r = error_prob_bounds(b, xi);
    return py::make_tuple(r.lower, r.upper);
  }, py::arg("bhattacharyya"), py::arg("chernoff_exponent"));

  m.def("convexity_bound_gaussian",
        [](const std::function<double(double)>& variance, double v_k, double theta) {
          return convexity_bound_gaussian(variance, v_k, theta);
        },
        py::arg("variance"), py::arg("v_k"), py::arg("theta"));
  m.def("convexity_bound_object_size",
        py::overload_cast<const std::vector<double>&, const std::vector<double>&, double>(
            &convexity_bound_object_size),
        py::arg("points"), py::arg("weights"), py::arg("v_k"));

  m.def("sample_uspc_counts",
        [](const Setup& s, double theta, double T, std::size_t modes, std::uint64_t seed,
           std::uint64_t trial) {
          const auto rec =
              sample_uspc_counts(s.model, theta, s.profile, grid_for(s, T, modes), SeedSpec{seed}, trial);
          return py::array_t<std::uint64_t>(rec.counts.size(), rec.counts.data());
        },
        py::arg("setup"), py::arg("theta"), py::arg("T"), py::arg("modes") = 0,
        py::arg("seed") = 0, py::arg("trial") = 0);
  m.def("sample_homodyne_periodogram",
        [](const Setup& s, double theta, double T, std::size_t modes, std::uint64_t seed,
           std::uint64_t trial) {
          const auto rec = sample_homodyne_periodogram(s.model, theta, s.profile,
                                                       grid_for(s, T, modes), SeedSpec{seed}, trial);
          return py::array_t<double>(rec.values.size(), rec.values.data());
        },
        py::arg("setup"), py::arg("theta"), py::arg("T"), py::arg("modes") = 0,
        py::arg("seed") = 0, py::arg("trial") = 0);

  m.def("mle_uspc",
        [](const Setup& s, std::vector<std::uint64_t> counts, double T, double lo, double hi) {
          const PhotonCountRecord rec{ModeGrid(T, counts.size()), std::move(counts)};
          return mle_uspc(rec, s.model, s.profile, {lo, hi}).theta_hat;
        },
        py::arg("setup"), py::arg("counts"), py::arg("T"), py::arg("lo") = 0.0, py::arg("hi") = 10.0);
  m.def("mle_homodyne",
        [](const Setup& s, std::vector<double> values, double T, double lo, double hi) {
          const HomodynePeriodogram rec{ModeGrid(T, values.size()), std::move(values)};
          return mle_homodyne(rec, s.model, s.profile, {lo, hi}).theta_hat;
        },
        py::arg("setup"), py::arg("values"), py::arg("T"), py::arg("lo") = 0.0, py::arg("hi") = 10.0);

  m.def("mc_estimation",
        [](const Setup& s, double theta, double T, std::uint64_t trials, std::uint64_t seed,
           const std::string& method, std::size_t modes, unsigned threads) {
          const McEstimationConfig cfg{.model = s.model,
                                       .profile = s.profile,
                                       .grid = grid_for(s, T, modes),
                                       .theta_true = theta,
                                       .trials = trials,
                                       .seed = SeedSpec{seed},
                                       .method = parse_measurement_method(method),
                                       .bracket = std::nullopt,
                                       .optimizer_tolerance = kDefaultOptimizerTolerance,
                                       .threads = threads};
          McEstimationResult r;
          {
            py::gil_scoped_release release;
            r = mc_estimation(cfg);
          }
          return estimation_dict(r);
        },
        py::arg("setup"), py::arg("theta"), py::arg("T"), py::arg("trials"), py::arg("seed") = 0,
        py::arg("method") = "uspc", py::arg("modes") = 0, py::arg("threads") = 0);
  m.def("mc_detection",
        [](const Setup& s, double phi, double T, std::uint64_t trials, std::uint64_t seed,
           const std::string& method, std::size_t modes, unsigned threads) {
          const McDetectionConfig cfg{.model = s.model,
                                      .profile = s.profile,
                                      .grid = grid_for(s, T, modes),
                                      .theta_h1 = phi,
                                      .trials = trials,
                                      .seed = SeedSpec{seed},
                                      .method = parse_measurement_method(method),
                                      .threshold = 0.0,
                                      .optimizer_tolerance = kDefaultOptimizerTolerance,
                                      .threads = threads};
          McDetectionResult r;
          {
            py::gil_scoped_release release;
            r = mc_detection(cfg);
          }
          return detection_dict(r);
        },
        py::arg("setup"), py::arg("phi"), py::arg("T"), py::arg("trials"), py::arg("seed") = 0,
        py::arg("method") = "uspc", py::arg("modes") = 0, py::arg("threads") = 0);

  m.def("run",
        [](const std::string& subcommand, const std::string& config_text,
           const std::map<std::string, std::string>& overrides) {
          Overrides ov(overrides.begin(), overrides.end());
          std::istringstream in(config_text);
          const auto config = parse_run_config(in, parse_subcommand(subcommand), ov);
          std::ostringstream out;
          {
            py::gil_scoped_release release;
            run(config, out);
          }
          return out.str();
        },
        py::arg("subcommand"), py::arg("config") = "", py::arg("overrides") = std::map<std::string, std::string>{},
        "Run a CLI subcommand on INI text and return its CSV output.");
}
