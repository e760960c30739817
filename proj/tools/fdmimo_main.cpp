// Command-line front end: one experiment per invocation, every model knob
// settable as --section.key=value, and a manifest written next to the
// artifacts that reproduces the run byte for byte.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fdmimo/csvio.hpp"
#include "fdmimo/experiment.hpp"

namespace {

std::string joined_names() {
  std::string s;
  for (const auto& n : fdmimo::experiment_names()) {
    if (!s.empty()) s += ", ";
    s += n;
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Link-level analysis of full-duplex cellular networks with "
      "low-resolution converters"};
  app.allow_extras();

  std::string experiment;
  std::string out_dir;
  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("experiment", experiment,
                 "Experiment to run: " + joined_names());
  app.add_option("--out", out_dir, "Output directory for artifacts")
      ->required();
  auto* seed_opt =
      app.add_option("--seed", seed, "Master seed (default from config)");
  app.add_option("--config", config_path,
                 "key=value file applied before command-line overrides "
                 "(a manifest.txt from a previous run reproduces it)");
  app.add_option("--threads", threads,
                 "Worker threads for Monte Carlo runs, 0 = hardware");

  CLI11_PARSE(app, argc, argv);

  try {
    fdmimo::KeyValueMap overrides;
    if (!config_path.empty()) overrides = fdmimo::parse_kv_file(config_path);
    if (!experiment.empty()) overrides["experiment"] = experiment;
    if (seed_opt->count() > 0) overrides["seed"] = std::to_string(seed);

    // Remaining arguments must be --key=value model overrides.
    for (const auto& extra : app.remaining()) {
      if (extra.rfind("--", 0) != 0)
        throw std::invalid_argument("unexpected argument '" + extra + "'");
      const std::string kv = extra.substr(2);
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("override '" + extra +
                                    "' is not --key=value");
      overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
    }

    fdmimo::ExperimentRequest request;
    request.config = std::move(overrides);
    request.out_dir = out_dir;
    request.n_threads = threads;
    fdmimo::run_experiment(request);
    std::cout << "wrote artifacts to " << out_dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "fdmimo: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
