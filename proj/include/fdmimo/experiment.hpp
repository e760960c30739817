#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdmimo/csvio.hpp"

namespace fdmimo {

// Experiment names accepted by run_experiment.
std::vector<std::string> experiment_names();

// Full key set with defaults, with overrides applied on top. Throws
// std::invalid_argument naming the key for unknown keys or unparseable
// values. The result is the run manifest: feeding it back reproduces the
// run exactly.
KeyValueMap resolve_config(const KeyValueMap& overrides);

struct ExperimentRequest {
  KeyValueMap config;   // must contain "experiment"; other keys optional
  std::string out_dir;  // created if absent
  int n_threads = 0;    // <= 0 selects hardware concurrency; not a manifest
                        // key because results do not depend on it
};

// Runs one experiment: writes its CSV artifacts plus manifest.txt into
// out_dir. Deterministic given the resolved config. Throws on invalid
// config or I/O failure.
void run_experiment(const ExperimentRequest& request);

}  // namespace fdmimo
