#include "sdspec/runs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sdspec/detection_bounds.hpp"
#include "sdspec/inference.hpp"
#include "sdspec/info_bounds.hpp"

namespace sdspec {

namespace pt = boost::property_tree;

std::string_view to_string(Subcommand command) {
  switch (command) {
    case Subcommand::FisherScan:
      return "fisher-scan";
    case Subcommand::ChernoffScan:
      return "chernoff-scan";
    case Subcommand::McEstimate:
      return "mc-estimate";
    case Subcommand::McDetect:
      return "mc-detect";
    case Subcommand::SpectraDump:
      return "spectra-dump";
  }
  return "unknown";
}

Subcommand parse_subcommand(std::string_view text) {
  for (auto c : {Subcommand::FisherScan, Subcommand::ChernoffScan, Subcommand::McEstimate,
                 Subcommand::McDetect, Subcommand::SpectraDump}) {
    if (to_string(c) == text) {
      return c;
    }
  }
  throw std::invalid_argument("unknown subcommand '" + std::string(text) + "'");
}

std::string format_csv_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void RunConfig::validate() const {
  if (model.kind != "flat" && model.kind != "tabulated") {
    throw std::invalid_argument("model.kind must be 'flat' or 'tabulated'");
  }
  if (model.kind == "flat" && !(model.bandwidth > 0.0)) {
    throw std::invalid_argument("model.bandwidth must be positive");
  }
  if (model.kind == "tabulated" && model.shape_file.empty()) {
    throw std::invalid_argument("model.shape_file is required for tabulated models");
  }
  if (!(model.probe_psd > 0.0)) {
    throw std::invalid_argument("model.probe_psd must be positive");
  }
  if (!(grid.observation_time > 0.0)) {
    throw std::invalid_argument("grid.T must be positive");
  }
  if (scan.values.empty()) {
    if (scan.points < 1) {
      throw std::invalid_argument("scan.points must be at least 1");
    }
    if (scan.spacing != "log" && scan.spacing != "linear") {
      throw std::invalid_argument("scan.spacing must be 'log' or 'linear'");
    }
    if (scan.spacing == "log" && !(scan.start > 0.0 && scan.stop > 0.0)) {
      throw std::invalid_argument("log-spaced scans need positive start and stop");
    }
    if (scan.points > 1 && !(scan.start < scan.stop)) {
      throw std::invalid_argument("scan range is empty: need start < stop");
    }
  }
  for (double v : scan.values) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("scan values must be nonnegative");
    }
  }
  if (scan.values.empty() && !(scan.start >= 0.0)) {
    throw std::invalid_argument("scan.start must be nonnegative");
  }
  if (mc.trials < 1) {
    throw std::invalid_argument("mc.trials must be at least 1");
  }
  parse_measurement_method(mc.method);
  if (!(numerics.tolerance > 0.0) || !(numerics.optimizer_tolerance > 0.0)) {
    throw std::invalid_argument("numerics tolerances must be positive");
  }
  if (numerics.max_levels < 1) {
    throw std::invalid_argument("numerics.max_levels must be at least 1");
  }
  if (dump.points < 2) {
    throw std::invalid_argument("dump.points must be at least 2");
  }
  if (!(dump.theta >= 0.0)) {
    throw std::invalid_argument("dump.theta must be nonnegative");
  }
  if (dump.omega_min != 0.0 || dump.omega_max != 0.0) {
    if (!(dump.omega_min < dump.omega_max)) {
      throw std::invalid_argument("dump range is empty: need omega_min < omega_max");
    }
  }
}

QuadratureSpec RunConfig::quadrature() const {
  return QuadratureSpec{numerics.tolerance, numerics.max_levels};
}

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(", \t"), boost::token_compress_on);
  std::vector<double> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (p.empty()) {
      continue;
    }
    std::size_t used = 0;
    const double v = std::stod(p, &used);
    if (used != p.size()) {
      throw std::invalid_argument("malformed number '" + p + "'");
    }
    out.push_back(v);
  }
  return out;
}

template <typename T>
T get_value(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_optional<std::string>(key);
  if (!node) {
    return fallback;
  }
  std::string text = boost::trim_copy(*node);
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw std::invalid_argument("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

std::string get_string(const pt::ptree& tree, const std::string& key, const std::string& fallback) {
  const auto node = tree.get_optional<std::string>(key);
  return node ? boost::trim_copy(*node) : fallback;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "model.kind",       "model.bandwidth",  "model.probe_psd",     "model.shape_file",
      "model.gain_file",  "grid.T",           "grid.modes",          "scan.start",
      "scan.stop",        "scan.points",      "scan.spacing",        "scan.values",
      "mc.trials",        "mc.seed",          "mc.method",           "mc.threshold",
      "mc.threads",       "numerics.tol",     "numerics.opt_tol",    "numerics.max_levels",
      "dump.theta",       "dump.omega_min",   "dump.omega_max",      "dump.points",
      "output.path"};
  return keys;
}

void check_keys(const pt::ptree& tree) {
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw std::invalid_argument("config: top-level key '" + section +
                                  "' must live in a [section]");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (std::find(keys.begin(), keys.end(), full) == keys.end()) {
        throw std::invalid_argument("config: unknown key '" + full + "'");
      }
    }
  }
}

std::filesystem::path resolve(const std::string& path, const std::filesystem::path& base_dir) {
  if (path.empty()) {
    return {};
  }
  std::filesystem::path p(path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

RunConfig from_tree(const pt::ptree& tree, Subcommand command,
                    const std::filesystem::path& base_dir) {
  check_keys(tree);
  RunConfig c;
  c.command = command;
  c.model.kind = get_string(tree, "model.kind", c.model.kind);
  c.model.bandwidth = get_value(tree, "model.bandwidth", c.model.bandwidth);
  c.model.probe_psd = get_value(tree, "model.probe_psd", c.model.probe_psd);
  c.model.shape_file = resolve(get_string(tree, "model.shape_file", ""), base_dir);
  c.model.gain_file = resolve(get_string(tree, "model.gain_file", ""), base_dir);
  c.grid.observation_time = get_value(tree, "grid.T", c.grid.observation_time);
  c.grid.modes = get_value(tree, "grid.modes", c.grid.modes);
  c.scan.start = get_value(tree, "scan.start", c.scan.start);
  c.scan.stop = get_value(tree, "scan.stop", c.scan.stop);
  c.scan.points = get_value(tree, "scan.points", c.scan.points);
  c.scan.spacing = get_string(tree, "scan.spacing", c.scan.spacing);
  if (const auto values = tree.get_optional<std::string>("scan.values")) {
    c.scan.values = parse_list(*values);
  }
  c.mc.trials = get_value(tree, "mc.trials", c.mc.trials);
  c.mc.seed = get_value(tree, "mc.seed", c.mc.seed);
  c.mc.method = get_string(tree, "mc.method", c.mc.method);
  c.mc.threshold = get_value(tree, "mc.threshold", c.mc.threshold);
  c.mc.threads = get_value(tree, "mc.threads", c.mc.threads);
  c.numerics.tolerance = get_value(tree, "numerics.tol", c.numerics.tolerance);
  c.numerics.optimizer_tolerance =
      get_value(tree, "numerics.opt_tol", c.numerics.optimizer_tolerance);
  c.numerics.max_levels = get_value(tree, "numerics.max_levels", c.numerics.max_levels);
  c.dump.theta = get_value(tree, "dump.theta", c.dump.theta);
  c.dump.omega_min = get_value(tree, "dump.omega_min", c.dump.omega_min);
  c.dump.omega_max = get_value(tree, "dump.omega_max", c.dump.omega_max);
  c.dump.points = get_value(tree, "dump.points", c.dump.points);
  c.output = get_string(tree, "output.path", "");
  c.validate();
  return c;
}

void apply_overrides(pt::ptree& tree, const Overrides& overrides) {
  for (const auto& [key, value] : overrides) {
    if (std::count(key.begin(), key.end(), '.') != 1) {
      throw std::invalid_argument("override key '" + key + "' must look like section.key");
    }
    tree.put(key, value);
  }
}

}  // namespace

RunConfig parse_run_config(std::istream& in, Subcommand command, const Overrides& overrides,
                           const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  apply_overrides(tree, overrides);
  return from_tree(tree, command, base_dir);
}

RunConfig load_run_config(const std::filesystem::path& path, Subcommand command,
                          const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + path.string());
  }
  return parse_run_config(in, command, overrides, path.parent_path());
}

RunConfig default_run_config(Subcommand command, const Overrides& overrides) {
  pt::ptree tree;
  apply_overrides(tree, overrides);
  return from_tree(tree, command, {});
}

BuiltModel build_model(const ModelSpec& spec) {
  if (spec.kind == "flat") {
    auto flat = make_flat_band(FlatBandConfig{spec.bandwidth, spec.probe_psd, 1.0});
    return BuiltModel{std::move(flat.model), std::move(flat.profile), spec.bandwidth};
  }
  if (spec.kind != "tabulated") {
    throw std::invalid_argument("unknown model kind '" + spec.kind + "'");
  }
  auto shape = load_tabulated_spectrum(spec.shape_file);
  auto support = shape.support();
  const double bandwidth = support.max_abs_frequency() / kTwoPi;
  auto model = NoiseSpectrumModel::magnitude_squared(shape, std::move(support));
  if (spec.gain_file.empty()) {
    return BuiltModel{std::move(model), ProbeProfile(spec.probe_psd), bandwidth};
  }
  auto gain = load_tabulated_spectrum(spec.gain_file);
  // Beyond the tabulated range the gain is held at its edge value.
  auto gain_fn = [gain](double w) {
    const double lo = gain.omega().front();
    const double hi = gain.omega().back();
    return gain(std::clamp(w, lo, hi));
  };
  return BuiltModel{std::move(model), ProbeProfile(spec.probe_psd, gain_fn), bandwidth};
}

ModeGrid build_grid(const GridSpec& spec, double bandwidth) {
  if (spec.modes > 0) {
    return ModeGrid(spec.observation_time, spec.modes);
  }
  return ModeGrid::for_band(bandwidth, spec.observation_time);
}

std::vector<double> scan_points(const ScanSpec& spec) {
  if (!spec.values.empty()) {
    return spec.values;
  }
  std::vector<double> out(spec.points);
  if (spec.points == 1) {
    out[0] = spec.start;
    return out;
  }
  const double n = static_cast<double>(spec.points - 1);
  for (std::size_t i = 0; i < spec.points; ++i) {
    const double t = static_cast<double>(i) / n;
    if (spec.spacing == "log") {
      out[i] = std::exp(std::log(spec.start) + t * (std::log(spec.stop) - std::log(spec.start)));
    } else {
      out[i] = spec.start + t * (spec.stop - spec.start);
    }
  }
  out.front() = spec.start;
  out.back() = spec.stop;
  return out;
}

const std::vector<std::string>& csv_columns(Subcommand command) {
  static const std::vector<std::string> fisher = {
      "theta", "J_uspc_per_BT", "J_hom_per_BT", "K_tilde_per_BT", "J_uspc_lowsnr_per_BT",
      "J_hom_lowsnr_per_BT"};
  static const std::vector<std::string> chernoff = {
      "phi",     "xi_uspc_per_BT",        "xi_hom_per_BT",         "s_star",
      "zeta_per_BT", "xi_uspc_lowsnr_per_BT", "xi_hom_lowsnr_per_BT"};
  static const std::vector<std::string> estimate = {
      "theta", "method",   "modes",      "trials", "mean_estimate", "bias",
      "bias_stderr", "mse", "mse_stderr", "fisher_discrete", "crb", "efficiency",
      "boundary_hits"};
  static const std::vector<std::string> detect = {
      "phi",          "method",           "modes",        "trials",
      "p_false_alarm", "p_false_alarm_stderr", "p_miss",   "p_miss_stderr",
      "p_error",      "p_error_stderr",   "xi_discrete",  "s_star",
      "zeta_discrete", "fidelity",        "lower_bound",  "upper_bound",
      "exact_miss"};
  static const std::vector<std::string> dump = {
      "omega", "S_X", "S_k", "S_eta", "integrand_quantum", "integrand_uspc",
      "integrand_homodyne"};
  switch (command) {
    case Subcommand::FisherScan:
      return fisher;
    case Subcommand::ChernoffScan:
      return chernoff;
    case Subcommand::McEstimate:
      return estimate;
    case Subcommand::McDetect:
      return detect;
    case Subcommand::SpectraDump:
      return dump;
  }
  throw std::logic_error("unhandled subcommand");
}

namespace {

class CsvRow {
 public:
  CsvRow& num(double v) { return field(format_csv_number(v)); }
  CsvRow& num(std::optional<double> v) { return field(v ? format_csv_number(*v) : ""); }
  CsvRow& count(std::uint64_t v) { return field(std::to_string(v)); }
  CsvRow& text(std::string_view v) { return field(std::string(v)); }

  void write(std::ostream& out, std::size_t expected_columns) const {
    if (fields_.size() != expected_columns) {
      throw std::logic_error("CSV row has the wrong number of columns");
    }
    for (std::size_t i = 0; i < fields_.size(); ++i) {
      out << (i ? "," : "") << fields_[i];
    }
    out << '\n';
  }

 private:
  CsvRow& field(std::string s) {
    fields_.push_back(std::move(s));
    return *this;
  }
  std::vector<std::string> fields_;
};

void write_header(std::ostream& out, Subcommand command) {
  const auto& cols = csv_columns(command);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << (i ? "," : "") << cols[i];
  }
  out << '\n';
}

// Each scan point gets its own master seed so rows are reproducible in
// isolation.
SeedSpec point_seed(std::uint64_t master, std::size_t index) {
  return SeedSpec{master + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index)};
}

}  // namespace

void run_fisher_scan(const RunConfig& config, std::ostream& out) {
  const auto built = build_model(config.model);
  const auto quad = config.quadrature();
  const double t = config.grid.observation_time;
  const double bt = built.bandwidth * t;
  const auto ncols = csv_columns(Subcommand::FisherScan).size();
  write_header(out, Subcommand::FisherScan);
  for (double theta : scan_points(config.scan)) {
    const auto uspc = fisher_uspc_continuum(built.model, built.profile, theta, t, quad);
    const auto hom = fisher_homodyne(built.model, built.profile, theta, t, quad);
    const auto bound = quantum_fisher_bound(built.model, built.profile, theta, t, quad);
    const auto low = fisher_low_snr(built.model, built.profile, theta, t, quad);
    CsvRow()
        .num(theta)
        .num(uspc.value / bt)
        .num(hom.value / bt)
        .num(bound.value / bt)
        .num(low.uspc.value / bt)
        .num(low.homodyne.value / bt)
        .write(out, ncols);
  }
}

void run_chernoff_scan(const RunConfig& config, std::ostream& out) {
  const auto built = build_model(config.model);
  const auto quad = config.quadrature();
  const double t = config.grid.observation_time;
  const double bt = built.bandwidth * t;
  const auto ncols = csv_columns(Subcommand::ChernoffScan).size();
  write_header(out, Subcommand::ChernoffScan);
  for (double phi : scan_points(config.scan)) {
    const auto uspc = chernoff_uspc(built.model, phi, built.profile, t, quad);
    const auto hom = chernoff_homodyne(built.model, phi, built.profile, t, quad,
                                       config.numerics.optimizer_tolerance);
    const auto zeta = quantum_chernoff(built.model, phi, built.profile, t, quad);
    const auto low = chernoff_low_snr(built.model, phi, built.profile, t, quad);
    CsvRow()
        .num(phi)
        .num(uspc.value / bt)
        .num(hom.value / bt)
        .num(hom.s_star)
        .num(zeta.value / bt)
        .num(low.uspc.value / bt)
        .num(low.homodyne.value / bt)
        .write(out, ncols);
  }
}

void run_mc_estimate(const RunConfig& config, std::ostream& out) {
  const auto built = build_model(config.model);
  const auto grid = build_grid(config.grid, built.bandwidth);
  const auto method = parse_measurement_method(config.mc.method);
  const auto ncols = csv_columns(Subcommand::McEstimate).size();
  write_header(out, Subcommand::McEstimate);
  const auto points = scan_points(config.scan);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const McEstimationConfig mc{.model = built.model,
                                .profile = built.profile,
                                .grid = grid,
                                .theta_true = points[i],
                                .trials = config.mc.trials,
                                .seed = point_seed(config.mc.seed, i),
                                .method = method,
                                .bracket = std::nullopt,
                                .optimizer_tolerance = config.numerics.optimizer_tolerance,
                                .threads = config.mc.threads};
    const auto r = mc_estimation(mc);
    CsvRow()
        .num(points[i])
        .text(to_string(method))
        .count(grid.size())
        .count(r.trials)
        .num(r.mean_estimate)
        .num(r.bias)
        .num(r.bias_stderr)
        .num(r.mse)
        .num(r.mse_stderr)
        .num(r.fisher)
        .num(r.crb)
        .num(r.efficiency)
        .count(r.boundary_hits)
        .write(out, ncols);
  }
}

void run_mc_detect(const RunConfig& config, std::ostream& out) {
  const auto built = build_model(config.model);
  const auto grid = build_grid(config.grid, built.bandwidth);
  const auto method = parse_measurement_method(config.mc.method);
  const auto ncols = csv_columns(Subcommand::McDetect).size();
  write_header(out, Subcommand::McDetect);
  const auto points = scan_points(config.scan);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const McDetectionConfig mc{.model = built.model,
                               .profile = built.profile,
                               .grid = grid,
                               .theta_h1 = points[i],
                               .trials = config.mc.trials,
                               .seed = point_seed(config.mc.seed, i),
                               .method = method,
                               .threshold = config.mc.threshold,
                               .optimizer_tolerance = config.numerics.optimizer_tolerance,
                               .threads = config.mc.threads};
    const auto r = mc_detection(mc);
    CsvRow()
        .num(points[i])
        .text(to_string(method))
        .count(grid.size())
        .count(r.trials)
        .num(r.false_alarm.value)
        .num(r.false_alarm.standard_error)
        .num(r.miss.value)
        .num(r.miss.standard_error)
        .num(r.error.value)
        .num(r.error.standard_error)
        .num(r.chernoff_exponent)
        .num(r.s_star)
        .num(r.quantum_exponent)
        .num(r.fidelity)
        .num(r.bounds.lower)
        .num(r.bounds.upper)
        .num(r.exact_miss)
        .write(out, ncols);
  }
}

void run_spectra_dump(const RunConfig& config, std::ostream& out) {
  const auto built = build_model(config.model);
  const auto& model = built.model;
  const auto& profile = built.profile;
  const double theta = config.dump.theta;
  model.check_theta(theta);
  double lo = config.dump.omega_min;
  double hi = config.dump.omega_max;
  if (lo == 0.0 && hi == 0.0) {
    hi = 1.25 * model.support().max_abs_frequency();
    lo = -hi;
  }
  const auto ncols = csv_columns(Subcommand::SpectraDump).size();
  write_header(out, Subcommand::SpectraDump);
  const std::size_t n = config.dump.points;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = i + 1 == n ? hi
                                : lo + (hi - lo) * static_cast<double>(i) /
                                           static_cast<double>(n - 1);
    const double sx = model.psd(w, theta);
    const double sk = probe_psd(profile, w);
    const double seta = phase_psd(profile, w);
    const double score = model.score_density(w, theta);
    const double intensity = profile.mean_flux() * profile.antisqueezing_gain(w);
    const double ds = model.psd_dtheta(w, theta);
    CsvRow()
        .num(w)
        .num(sx)
        .num(sk)
        .num(seta)
        .num(score * sk / (2.0 * sk * sx + 1.0))
        .num(score * intensity / (2.0 * intensity * sx + 1.0))
        .num(ds * ds / (2.0 * (sx + seta) * (sx + seta)))
        .write(out, ncols);
  }
}

void run(const RunConfig& config, std::ostream& out) {
  switch (config.command) {
    case Subcommand::FisherScan:
      return run_fisher_scan(config, out);
    case Subcommand::ChernoffScan:
      return run_chernoff_scan(config, out);
    case Subcommand::McEstimate:
      return run_mc_estimate(config, out);
    case Subcommand::McDetect:
      return run_mc_detect(config, out);
    case Subcommand::SpectraDump:
      return run_spectra_dump(config, out);
  }
}

}  // namespace sdspec
