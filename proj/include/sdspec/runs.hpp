#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdspec/mode_grid.hpp"
#include "sdspec/numerics.hpp"
#include "sdspec/spectral_models.hpp"

namespace sdspec {

enum class Subcommand { FisherScan, ChernoffScan, McEstimate, McDetect, SpectraDump };

std::string_view to_string(Subcommand command);
Subcommand parse_subcommand(std::string_view text);

struct ModelSpec {
  std::string kind = "flat";  // flat | tabulated
  double bandwidth = 1.0;     // flat: B in Hz
  double probe_psd = 1.0;     // S_k(0) for flat; |alpha|^2 for tabulated
  std::filesystem::path shape_file;  // tabulated R(omega)
  std::filesystem::path gain_file;   // optional tabulated |g(omega)|^2
};

struct GridSpec {
  double observation_time = 1.0;
  std::size_t modes = 0;  // 0: floor(B T)
};

struct ScanSpec {
  double start = 1.0;
  double stop = 1.0;
  std::size_t points = 1;
  std::string spacing = "log";  // log | linear
  std::vector<double> values;   // explicit list, overrides start/stop/points
};

struct McSpec {
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  std::string method = "uspc";
  double threshold = 0.0;
  unsigned threads = 0;
};

struct NumericsSpec {
  double tolerance = 1e-9;
  double optimizer_tolerance = kDefaultOptimizerTolerance;
  std::size_t max_levels = 15;
};

struct DumpSpec {
  double theta = 1.0;
  // Defaults (both zero) span 1.25x the model support.
  double omega_min = 0.0;
  double omega_max = 0.0;
  std::size_t points = 201;
};

/// Everything a subcommand needs. Built from an INI-style file with
/// [model], [grid], [scan], [mc], [numerics], [dump] and [output] sections.
struct RunConfig {
  Subcommand command = Subcommand::FisherScan;
  ModelSpec model;
  GridSpec grid;
  ScanSpec scan;
  McSpec mc;
  NumericsSpec numerics;
  DumpSpec dump;
  std::filesystem::path output;

  void validate() const;
  QuadratureSpec quadrature() const;
};

/// "section.key" = "value" pairs applied on top of the file; later wins.
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Relative file paths inside the config resolve against `base_dir`.
RunConfig parse_run_config(std::istream& in, Subcommand command, const Overrides& overrides = {},
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path, Subcommand command,
                          const Overrides& overrides = {});
/// Defaults plus overrides, no file.
RunConfig default_run_config(Subcommand command, const Overrides& overrides = {});

struct BuiltModel {
  NoiseSpectrumModel model;
  ProbeProfile profile;
  /// B used for the per-BT normalization; for tabulated shapes, the largest
  /// tabulated frequency divided by 2 pi.
  double bandwidth;
};

BuiltModel build_model(const ModelSpec& spec);
ModeGrid build_grid(const GridSpec& spec, double bandwidth);
std::vector<double> scan_points(const ScanSpec& spec);

void run_fisher_scan(const RunConfig& config, std::ostream& out);
void run_chernoff_scan(const RunConfig& config, std::ostream& out);
void run_mc_estimate(const RunConfig& config, std::ostream& out);
void run_mc_detect(const RunConfig& config, std::ostream& out);
void run_spectra_dump(const RunConfig& config, std::ostream& out);

/// Dispatches on config.command.
void run(const RunConfig& config, std::ostream& out);

/// CSV header of each subcommand; fixed regardless of data.
const std::vector<std::string>& csv_columns(Subcommand command);

/// Shortest-free fixed format used in all CSV output: 17 significant digits.
std::string format_csv_number(double value);

}  // namespace sdspec
