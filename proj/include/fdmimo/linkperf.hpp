#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fdmimo/channel.hpp"
#include "fdmimo/params.hpp"
#include "fdmimo/types.hpp"

namespace fdmimo {

// Canonical denominator term names, shared with the Monte Carlo term
// measurements so breakdowns compare one-to-one.
namespace term {
inline constexpr const char* est_error = "est_error";
inline constexpr const char* intra_cell = "intra_cell";
inline constexpr const char* inter_cell = "inter_cell";
inline constexpr const char* noise = "noise";
inline constexpr const char* fd_self_interference = "fd_self_interference";
inline constexpr const char* si_times_dac_noise = "si_times_dac_noise";
inline constexpr const char* adc_noise = "adc_noise";
inline constexpr const char* iui_same_cell = "iui_same_cell";
inline constexpr const char* iui_other_cells = "iui_other_cells";
inline constexpr const char* aqnm = "aqnm";
}  // namespace term

// Per-term power decomposition of one user's SQINR.
struct SqinrBreakdown {
  double numerator_w = 0.0;
  std::vector<std::pair<std::string, double>> terms;  // named powers, W
  double sqinr = 0.0;
  double se_bits_hz = 0.0;  // log2(1 + sqinr)

  double denominator_w() const;
  // Value of a named term; throws if the name is absent.
  double term(std::string_view name) const;
};

// Matched filter: the combiner is the channel estimate itself and the
// precoder is the estimate normalized to mean square norm n_antennas. Both
// throw on an empty or all-zero estimate.
CVector mf_combiner(const CVector& h_hat);
CVector mf_precoder(const CVector& h_hat);

// Closed-form hardening SQINR of an uplink user served by BS 0, decomposed
// into {est_error, intra_cell, inter_cell, noise, fd_self_interference,
// si_times_dac_noise, adc_noise}. user indexes scenario.users.uplink_users
// and must be served by BS 0.
SqinrBreakdown uplink_sqinr(const LargeScaleScenario& scenario,
                            const SystemParams& params, int user);

// Closed-form hardening SQINR of a downlink user served by BS 0, decomposed
// into {est_error, intra_cell, inter_cell, iui_same_cell, iui_other_cells,
// aqnm, noise}.
SqinrBreakdown downlink_sqinr(const LargeScaleScenario& scenario,
                              const SystemParams& params, int user);

// Perfect-CSI variants: numerator gains the extra self-power moment
// (n^2 + n uplink, n + 1 downlink) and the estimation-error term vanishes.
SqinrBreakdown perfect_csi_uplink_sqinr(const LargeScaleScenario& scenario,
                                        const SystemParams& params, int user);
SqinrBreakdown perfect_csi_downlink_sqinr(const LargeScaleScenario& scenario,
                                          const SystemParams& params,
                                          int user);

// Full-resolution SE ceilings (quantization removed, hardening kept).
double lemma1_uplink(const LargeScaleScenario& scenario,
                     const SystemParams& params, int user);
double lemma1_downlink(const LargeScaleScenario& scenario,
                       const SystemParams& params, int user);
// As printed in the source analysis, without the array gain on the
// numerator; kept as a diagnostic because it does not match the b -> inf
// limit of the hardening SQINR.
double lemma1_downlink_verbatim(const LargeScaleScenario& scenario,
                                const SystemParams& params, int user);

// Infinite-transmit-power SE ceilings (all transmit powers driven up
// together at fixed resolution).
double lemma2_uplink(const LargeScaleScenario& scenario,
                     const SystemParams& params, int user);
double lemma2_downlink(const LargeScaleScenario& scenario,
                       const SystemParams& params, int user);

// Power-scaling limits: transmit powers shrink as E / n_antennas while the
// array grows without bound. Interference vanishes; only SI (uplink) and
// noise survive. Energies in joule-scaled W units consistent with sigma2.
double lemma3_uplink(double g_k, double e_k, double e_si, int k_d,
                     const SystemParams& params);
double lemma3_downlink(double g_k, double e_k, const SystemParams& params);

// CSV export: "user,link,term,value_W,sqinr,se_bps_hz" with one row per term
// plus a "numerator" row. link is "ul" or "dl".
void write_breakdown_csv(std::ostream& out, const SqinrBreakdown& breakdown,
                         int user, std::string_view link);

}  // namespace fdmimo
