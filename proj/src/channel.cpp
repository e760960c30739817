#include "fdmimo/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "fdmimo/aqnm.hpp"

namespace fdmimo {

namespace {

constexpr std::uint64_t kStreamScenario = 0x5ce0'a210ull;
constexpr int kMaxSlotRetries = 100000;

}  // namespace

double SystemParams::alpha_u() const {
  return alpha_u_override ? *alpha_u_override : 1.0 - rho_from_bits(b_u);
}

double SystemParams::alpha_d() const {
  return alpha_d_override ? *alpha_d_override : 1.0 - rho_from_bits(b_d);
}

double SystemParams::sigma2() const {
  if (sigma2_override_w) return *sigma2_override_w;
  return dbm_to_watts(noise_density_dbm_hz) * bandwidth_hz;
}

void SystemParams::validate() const {
  if (!(eta > 2.0))
    throw std::invalid_argument("SystemParams: eta must be > 2");
  if (!(l_ref > 0.0))
    throw std::invalid_argument("SystemParams: l_ref must be positive");
  if (sigma_sh_db < 0.0)
    throw std::invalid_argument("SystemParams: sigma_sh_db must be >= 0");
  if (n_antennas < 1)
    throw std::invalid_argument("SystemParams: n_antennas must be >= 1");
  if (!(bandwidth_hz > 0.0))
    throw std::invalid_argument("SystemParams: bandwidth must be positive");
  if (p_uplink_w < 0.0 || p_downlink_w < 0.0 || p_si_w < 0.0)
    throw std::invalid_argument("SystemParams: powers must be >= 0");
  if (mu_si2 < 0.0)
    throw std::invalid_argument("SystemParams: mu_si2 must be >= 0");
  if (sigma_iui2 < 0.0)
    throw std::invalid_argument("SystemParams: sigma_iui2 must be >= 0");
  if (b_u < 1 || b_d < 1)
    throw std::invalid_argument("SystemParams: resolutions must be >= 1 bit");
  if (k_u < 0 || k_d < 0)
    throw std::invalid_argument("SystemParams: user counts must be >= 0");
  if (!(d_min_m > 0.0))
    throw std::invalid_argument("SystemParams: d_min must be positive");
  for (const auto& a : {alpha_u_override, alpha_d_override})
    if (a && !(*a > 0.0 && *a <= 1.0))
      throw std::invalid_argument(
          "SystemParams: alpha override must be in (0, 1]");
  if (sigma2_override_w && !(*sigma2_override_w > 0.0))
    throw std::invalid_argument("SystemParams: sigma2 must be positive");
}

double LargeScaleScenario::p_dl_cell(int l) const {
  double total = 0.0;
  for (int j : cell_dl.at(l)) total += p_dl(j);
  return total;
}

double large_scale_gain(double r_m, double chi, const SystemParams& params) {
  if (!(r_m > 0.0))
    throw std::invalid_argument("large_scale_gain: distance must be positive");
  if (!(chi > 0.0))
    throw std::invalid_argument("large_scale_gain: chi must be positive");
  return params.l_ref * chi / std::pow(r_m, params.eta);
}

double sample_shadowing(double sigma_sh_db, RngStream& rng) {
  if (sigma_sh_db < 0.0)
    throw std::invalid_argument("sample_shadowing: negative sigma");
  return db_to_linear(sigma_sh_db * rng.normal());
}

CVector sample_small_scale(int n_antennas, RngStream& rng) {
  CVector h(n_antennas);
  for (int i = 0; i < n_antennas; ++i) h(i) = rng.cnormal(1.0);
  return h;
}

CMatrix sample_si_channel(int n_antennas, double mu_si2, RngStream& rng) {
  CMatrix h(n_antennas, n_antennas);
  for (int j = 0; j < n_antennas; ++j)
    for (int i = 0; i < n_antennas; ++i) h(i, j) = rng.cnormal(mu_si2);
  return h;
}

Complex sample_iui_channel(double sigma_iui2, RngStream& rng) {
  return rng.cnormal(sigma_iui2);
}

LargeScaleScenario make_scenario(const NetworkLayout& layout,
                                 const SystemParams& params,
                                 std::uint64_t seed) {
  params.validate();
  const int n_bs = layout.n_bs();
  if (n_bs == 0) throw std::invalid_argument("make_scenario: empty layout");

  RngStream rng(seed, kStreamScenario);

  LargeScaleScenario s;
  s.layout = layout;

  // Draw one user slot for a given cell: position plus a shadowing column,
  // retried jointly until (a) the nearest BS is at least d_min away, which
  // bounds every BS distance, and (b) the highest shadowed gain points at
  // the slot's own cell, so quotas and the association rule hold together.
  RVector chi_col(n_bs), gain_col(n_bs);
  auto place_slot = [&](int cell, Point2* pos, RVector* chi, RVector* gain) {
    for (int attempt = 0; attempt < kMaxSlotRetries; ++attempt) {
      const Point2 p = layout.region.sample(rng);
      for (int l = 0; l < n_bs; ++l)
        chi_col(l) = sample_shadowing(params.sigma_sh_db, rng);
      const int nearest = nearest_bs(layout, p);
      const double r_near = (p - layout.bs_positions[nearest]).norm();
      if (r_near < params.d_min_m) continue;
      int best = 0;
      for (int l = 0; l < n_bs; ++l) {
        const double r = (p - layout.bs_positions[l]).norm();
        gain_col(l) = large_scale_gain(r, chi_col(l), params);
        if (gain_col(l) > gain_col(best)) best = l;
      }
      if (best != cell) continue;
      *pos = p;
      *chi = chi_col;
      *gain = gain_col;
      return;
    }
    throw std::runtime_error(
        "make_scenario: could not draw a user whose strongest shadowed gain "
        "is its own cell; region too small or d_min too large");
  };

  const int n_ul = n_bs * params.k_u;
  const int n_dl = n_bs * params.k_d;
  s.gain_ul.resize(n_bs, n_ul);
  s.gain_dl.resize(n_bs, n_dl);
  s.chi_ul.resize(n_bs, n_ul);
  s.chi_dl.resize(n_bs, n_dl);
  s.cell_ul.resize(n_bs);
  s.cell_dl.resize(n_bs);
  s.users.k_u_per_cell.assign(n_bs, params.k_u);
  s.users.k_d_per_cell.assign(n_bs, params.k_d);

  Point2 pos;
  RVector chi(n_bs), gain(n_bs);
  for (int c = 0; c < n_bs; ++c) {
    for (int i = 0; i < params.k_u; ++i) {
      place_slot(c, &pos, &chi, &gain);
      const int u = int(s.users.uplink_users.size());
      s.users.uplink_users.push_back(pos);
      s.users.cell_of_uplink.push_back(c);
      s.chi_ul.col(u) = chi;
      s.gain_ul.col(u) = gain;
      s.serving_ul.push_back(c);
      s.cell_ul[c].push_back(u);
    }
  }
  for (int c = 0; c < n_bs; ++c) {
    for (int i = 0; i < params.k_d; ++i) {
      place_slot(c, &pos, &chi, &gain);
      const int j = int(s.users.downlink_users.size());
      s.users.downlink_users.push_back(pos);
      s.users.cell_of_downlink.push_back(c);
      s.chi_dl.col(j) = chi;
      s.gain_dl.col(j) = gain;
      s.serving_dl.push_back(c);
      s.cell_dl[c].push_back(j);
    }
  }

  // User-to-user gains under the same pathloss and shadowing law. The
  // distance is clamped below at d_min: user positions are unconstrained
  // relative to each other and the pathloss law diverges at zero range.
  s.gain_iui.resize(n_ul, n_dl);
  s.chi_iui.resize(n_ul, n_dl);
  for (int u = 0; u < n_ul; ++u) {
    for (int j = 0; j < n_dl; ++j) {
      const double r = std::max(
          (s.users.uplink_users[u] - s.users.downlink_users[j]).norm(),
          params.d_min_m);
      s.chi_iui(u, j) = sample_shadowing(params.sigma_sh_db, rng);
      s.gain_iui(u, j) = large_scale_gain(r, s.chi_iui(u, j), params);
    }
  }

  s.p_ul = RVector::Constant(n_ul, params.p_uplink_w);
  s.p_dl.resize(n_dl);
  for (int c = 0; c < n_bs; ++c) {
    // Uniform split of the per-cell budget across that cell's users.
    for (int j : s.cell_dl[c])
      s.p_dl(j) = params.p_downlink_w / double(s.cell_dl[c].size());
  }
  return s;
}

}  // namespace fdmimo
