#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fdmimo/channel.hpp"
#include "fdmimo/linkperf.hpp"
#include "fdmimo/params.hpp"

namespace fdmimo {

// One Monte Carlo draw of the full quantized signal chain, measured for a
// single user: per-term instantaneous powers under the same names as the
// closed-form breakdown, so the two decompositions compare term by term.
struct TrialResult {
  int user = 0;
  double desired = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  double sqinr = 0.0;  // desired over summed terms for this one draw
  std::uint64_t trial_index = 0;
};

struct TermStats {
  double mean = 0.0;
  double std_error = 0.0;
};

// Aggregate over trials for one user: sample means and standard errors per
// term, and the SQINR formed from the mean powers.
struct TrialAggregate {
  int user = 0;
  std::int64_t n_trials = 0;
  TermStats desired;
  std::vector<std::pair<std::string, TermStats>> terms;
  double sqinr = 0.0;
  double se_bits_hz = 0.0;
};

struct CdfEstimate {
  std::vector<double> sorted_values;
  std::vector<double> probabilities;  // i/n at the i-th sorted value
  std::int64_t n_samples = 0;

  // Linear-interpolated quantile, p in [0, 1].
  double quantile(double p) const;
};

struct MomentReport {
  TermStats norm2;       // E[||w||^2], target n_antennas
  TermStats norm4;       // E[||w||^4], target n_antennas^2 + n_antennas
  TermStats cross;       // E[|w* h'|^2] for independent h', target n_antennas
  std::int64_t n_draws = 0;
};

// Synthesizes one uplink receive chain at BS 0 (all user signals, loopback
// SI, DAC and ADC noise drawn from their tracked covariances, AWGN), applies
// the matched filter of the measured user, and returns the instantaneous
// power of each labeled component. The measured user must be an uplink user
// of cell 0. Deterministic given (scenario, params, master_seed, trial).
TrialResult simulate_uplink_trial(const LargeScaleScenario& scenario,
                                  const SystemParams& params, int user,
                                  std::uint64_t master_seed,
                                  std::uint64_t trial);

// Downlink counterpart at a cell-0 downlink user: precoded streams from all
// BSs, per-BS DAC noise, uplink-user interference scalars, AWGN.
TrialResult simulate_downlink_trial(const LargeScaleScenario& scenario,
                                    const SystemParams& params, int user,
                                    std::uint64_t master_seed,
                                    std::uint64_t trial);

// Mean term powers over n_trials, computed in fixed-size chunks combined in
// chunk order so the result is bit-identical for any thread count.
// n_threads <= 0 selects the hardware concurrency.
TrialAggregate run_uplink_trials(const LargeScaleScenario& scenario,
                                 const SystemParams& params, int user,
                                 std::int64_t n_trials,
                                 std::uint64_t master_seed, int n_threads = 0);
TrialAggregate run_downlink_trials(const LargeScaleScenario& scenario,
                                   const SystemParams& params, int user,
                                   std::int64_t n_trials,
                                   std::uint64_t master_seed,
                                   int n_threads = 0);

// Empirical CDF of the samples (any unit). Throws on empty input.
CdfEstimate estimate_cdf(std::vector<double> samples);

// CSV export: "sample_db,prob".
void write_cdf_csv(std::ostream& out, const CdfEstimate& cdf);

// Monte Carlo check of the matched-filter moment identities.
MomentReport verify_corollary1(int n_antennas, std::int64_t n_draws,
                               std::uint64_t seed);

}  // namespace fdmimo
