#pragma once

#include <cstdint>
#include <vector>

#include "fdmimo/netgeom.hpp"
#include "fdmimo/params.hpp"
#include "fdmimo/rng.hpp"
#include "fdmimo/types.hpp"

namespace fdmimo {

// One conditioned network draw: geometry, shadowing, large-scale gains, user
// association, and transmit powers. Small-scale fading is NOT part of the
// scenario; it is redrawn per trial.
struct LargeScaleScenario {
  NetworkLayout layout;
  UserDrop users;

  // BS-to-user gains, n_bs x n_users (linear): gain_ul for uplink users,
  // gain_dl for downlink users. gain_iui is uplink-user x downlink-user.
  RMatrix gain_ul;
  RMatrix gain_dl;
  RMatrix gain_iui;

  // Shadowing draws behind the gains, same shapes (linear).
  RMatrix chi_ul;
  RMatrix chi_dl;
  RMatrix chi_iui;

  // Serving BS per user; equals the gain argmax by construction.
  std::vector<int> serving_ul;
  std::vector<int> serving_dl;
  // User indices grouped by serving cell.
  std::vector<std::vector<int>> cell_ul;
  std::vector<std::vector<int>> cell_dl;

  // Transmit powers (W): per uplink user, and per downlink user after the
  // uniform per-cell split (summing to the cell budget).
  RVector p_ul;
  RVector p_dl;

  int n_bs() const { return layout.n_bs(); }
  // Total downlink power of cell l.
  double p_dl_cell(int l) const;
};

// Eq-of-record pathloss-shadowing gain l_ref * chi / r^eta. Throws for r <= 0.
double large_scale_gain(double r_m, double chi, const SystemParams& params);

// Lognormal shadowing: chi = 10^(X/10), X ~ N(0, sigma_sh_db^2).
double sample_shadowing(double sigma_sh_db, RngStream& rng);

// IID CN(0,1) fading vector of length n_antennas.
CVector sample_small_scale(int n_antennas, RngStream& rng);

// IID CN(0, mu_si2) loopback matrix, n_antennas x n_antennas.
CMatrix sample_si_channel(int n_antennas, double mu_si2, RngStream& rng);

// CN(0, sigma_iui2) user-to-user scalar.
Complex sample_iui_channel(double sigma_iui2, RngStream& rng);

// Builds a full conditioned scenario: drops users per cell with the exact
// per-cell counts, draws shadowing, and retries each user slot until the
// highest-gain BS under shadowing is its nominal cell, so the association
// rule and the per-cell quotas hold simultaneously. Deterministic given
// (layout, params, seed). Throws after a bounded number of retries per slot.
LargeScaleScenario make_scenario(const NetworkLayout& layout,
                                 const SystemParams& params,
                                 std::uint64_t seed);

}  // namespace fdmimo
