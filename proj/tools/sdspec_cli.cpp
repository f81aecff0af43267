// sdspec: batch scans and Monte Carlo campaigns for stochastic-displacement
// spectroscopy and detection limits. Data goes to the CSV output; all
// diagnostics go to stderr.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdspec/runs.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::vector<std::string> set;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("-c,--config", opts.config, "INI config file")->check(CLI::ExistingFile);
  sub->add_option("-o,--out", opts.out, "CSV output path ('-' for stdout)");
  sub->add_option("--seed", opts.seed, "master seed (overrides mc.seed)");
  sub->add_option("--tol", opts.tol, "relative quadrature tolerance (overrides numerics.tol)");
  sub->add_option("--set", opts.set, "override any config key, e.g. --set scan.points=50")
      ->type_name("SECTION.KEY=VALUE");
}

sdspec::Overrides collect_overrides(const CommonOptions& opts) {
  sdspec::Overrides out;
  for (const auto& item : opts.set) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("--set expects SECTION.KEY=VALUE, got '" + item + "'");
    }
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  // Dedicated flags are applied last so they win over --set.
  if (opts.seed) {
    out.emplace_back("mc.seed", std::to_string(*opts.seed));
  }
  if (opts.tol) {
    std::ostringstream s;
    s.precision(17);
    s << *opts.tol;
    out.emplace_back("numerics.tol", s.str());
  }
  if (!opts.out.empty()) {
    out.emplace_back("output.path", opts.out);
  }
  return out;
}

int execute(sdspec::Subcommand command, const CommonOptions& opts) {
  const auto overrides = collect_overrides(opts);
  const auto config = opts.config.empty()
                          ? sdspec::default_run_config(command, overrides)
                          : sdspec::load_run_config(opts.config, command, overrides);

  if (config.output.empty() || config.output == "-") {
    sdspec::run(config, std::cout);
    std::cout.flush();
    return std::cout ? 0 : 1;
  }
  // Render fully before touching the output file so a failed run leaves no
  // partial CSV behind.
  std::ostringstream buffer;
  sdspec::run(config, buffer);
  std::ofstream file(config.output, std::ios::binary | std::ios::trunc);
  if (!file) {
    std::cerr << "sdspec: cannot open output file " << config.output << '\n';
    return 1;
  }
  file << buffer.str();
  file.close();
  if (!file) {
    std::cerr << "sdspec: failed writing " << config.output << '\n';
    return 1;
  }
  std::cerr << "sdspec: wrote " << config.output << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum and classical limits to stochastic-displacement spectroscopy"};
  app.require_subcommand(1);

  struct Entry {
    sdspec::Subcommand command;
    const char* help;
    CommonOptions opts;
    CLI::App* sub = nullptr;
  };
  std::vector<Entry> entries = {
      {sdspec::Subcommand::FisherScan, "Fisher informations per BT over a theta scan", {}},
      {sdspec::Subcommand::ChernoffScan, "Chernoff exponents per BT over a phi scan", {}},
      {sdspec::Subcommand::McEstimate, "Monte Carlo MLE efficiency against the CRB", {}},
      {sdspec::Subcommand::McDetect, "Monte Carlo detection errors against the bounds", {}},
      {sdspec::Subcommand::SpectraDump, "Tabulate spectra and information integrands", {}},
  };
  for (auto& e : entries) {
    e.sub = app.add_subcommand(std::string(sdspec::to_string(e.command)), e.help);
    add_common(e.sub, e.opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (auto& e : entries) {
      if (e.sub->parsed()) {
        return execute(e.command, e.opts);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "sdspec: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
