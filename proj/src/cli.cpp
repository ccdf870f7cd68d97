#include "qdent/cli.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdent/config.hpp"
#include "qdent/csv.hpp"
#include "qdent/emission.hpp"
#include "qdent/fitting.hpp"

namespace qdent::cli {

namespace {

struct Options {
  std::string config = std::string(kReferenceProfileName);
  std::string out_path;
  bool no_nuclear = false;
  bool no_jitter = false;
  std::uint64_t seed = 1;
  double exposure = 1e4;
  std::string free = "k,sigma,gamma_s";
  std::string sr_over_sigma = "0,1,2,3,4,5,6";
  std::string data_path;
  int max_evals = 4000;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const Options& opt, const std::string& text, std::ostream& out) {
  if (opt.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opt.out_path);
  if (!file) throw OutputError("cannot write '" + opt.out_path + "'");
  file << text;
}

std::vector<double> parse_list(const std::string& list) {
  std::vector<double> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("empty list");
  return values;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const Config cfg = load_config(opt.config);
  const CorrelationSet set =
      simulate(cfg.emission_params(), cfg.tau_grid(), {opt.no_nuclear, opt.no_jitter});
  emit(opt, write_correlations_csv(set), out);
  return kSuccess;
}

int cmd_fidelity(const Options& opt, std::ostream& out, std::ostream& err) {
  const Config cfg = load_config(opt.config);
  const FidelityTrace f = fidelity_trace(
      simulate(cfg.emission_params(), cfg.tau_grid(), {opt.no_nuclear, opt.no_jitter}));
  emit(opt, write_fidelity_csv(f), out);
  char line[160];
  std::snprintf(line, sizeof line, "peak_fidelity=%.6f peak_tau_ns=%.4g duration_above_half_ns=%.4f\n",
                f.peak_fidelity, f.peak_tau, f.duration_above_half);
  err << line;
  return kSuccess;
}

int cmd_distribution(const Options& opt, std::ostream& out) {
  std::vector<double> values;
  try {
    values = parse_list(opt.sr_over_sigma);
  } catch (const std::exception& e) {
    throw ConfigError(0, "sr-over-sigma", std::string("--sr-over-sigma: ") + e.what());
  }
  emit(opt, write_distribution_csv(values), out);
  return kSuccess;
}

int cmd_synth(const Options& opt, std::ostream& out) {
  const Config cfg = load_config(opt.config);
  if (!(opt.exposure > 0.0)) throw ConfigError(0, "exposure", "--exposure must be positive");
  const CorrelationSet set = synth_histogram(cfg.emission_params(), cfg.tau_grid(), opt.exposure, opt.seed);
  emit(opt, write_histogram_csv(set), out);
  return kSuccess;
}

int cmd_fit(const Options& opt, std::ostream& out) {
  const Config cfg = load_config(opt.config);
  FitSpec spec;
  try {
    spec.free = parse_free_list(opt.free);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, "free", std::string("--free: ") + e.what());
  }
  spec.baseline = cfg.emission_params();
  spec.max_evals = opt.max_evals;
  const CorrelationSet data = load_csv(read_file(opt.data_path));
  FitResult result;
  try {
    result = fit(data, spec);
  } catch (const std::invalid_argument& e) {
    // Grid problems in the data surface here (e.g. non-uniform delays).
    throw DataError(e.what());
  }
  emit(opt, fit_report(result), out);
  return result.converged ? kSuccess : kFitNotConverged;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Entangled photon-pair emission from a quantum dot in a fluctuating nuclear field"};
  app.require_subcommand(1);

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Profile name or config file path")
        ->capture_default_str();
    sub->add_option("--out", opt.out_path, "Output file (default: standard output)");
  };
  auto add_flags = [&](CLI::App* sub) {
    sub->add_flag("--no-nuclear", opt.no_nuclear, "Remove the fluctuating nuclear field");
    sub->add_flag("--no-jitter", opt.no_jitter, "Skip the detector response convolution");
  };

  auto* simulate_cmd = app.add_subcommand("simulate", "Write the six g2 traces as CSV");
  add_config(simulate_cmd);
  add_flags(simulate_cmd);

  auto* fidelity_cmd = app.add_subcommand("fidelity", "Write the Bell-state fidelity trace as CSV");
  add_config(fidelity_cmd);
  add_flags(fidelity_cmd);

  auto* distribution_cmd =
      app.add_subcommand("distribution", "Write the splitting-magnitude distribution as CSV");
  distribution_cmd->add_option("--sr-over-sigma", opt.sr_over_sigma, "Comma-separated s_r/sigma values")
      ->capture_default_str();
  distribution_cmd->add_option("--out", opt.out_path, "Output file (default: standard output)");

  auto* fit_cmd = app.add_subcommand("fit", "Fit model parameters to a coincidence CSV");
  add_config(fit_cmd);
  fit_cmd->add_option("data", opt.data_path, "Histogram or correlation CSV")->required();
  fit_cmd->add_option("--free", opt.free, "Comma-separated free parameters")->capture_default_str();
  fit_cmd->add_option("--max-evals", opt.max_evals, "Objective evaluation budget")
      ->capture_default_str();

  auto* synth_cmd = app.add_subcommand("synth", "Write a Poisson coincidence histogram as CSV");
  add_config(synth_cmd);
  synth_cmd->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--exposure", opt.exposure, "Counts per bin at g2 = 1")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (simulate_cmd->parsed()) return cmd_simulate(opt, out);
    if (fidelity_cmd->parsed()) return cmd_fidelity(opt, out, err);
    if (distribution_cmd->parsed()) return cmd_distribution(opt, out);
    if (synth_cmd->parsed()) return cmd_synth(opt, out);
    if (fit_cmd->parsed()) return cmd_fit(opt, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const OutputError& e) {
    err << "output error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace qdent::cli
