#include "fdmimo/linkperf.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "fdmimo/csvio.hpp"

namespace fdmimo {

namespace {

// log2(1 + x) without the precision cliff at tiny x, where 1.0 + x would
// round away most of the significand.
double se_from_sqinr(double sqinr) {
  return std::log1p(sqinr) / std::numbers::ln2;
}

void require_served_by_bs0(const std::vector<int>& serving, int user,
                           const char* who) {
  if (user < 0 || user >= int(serving.size()))
    throw std::invalid_argument(std::string(who) + ": user index out of range");
  if (serving[user] != 0)
    throw std::invalid_argument(std::string(who) +
                                ": user is not served by the cell of interest");
}

// Sums of received uplink power at BS 0, split by origin cell of the users.
struct UplinkPowerSums {
  double own = 0.0;    // the served user itself
  double intra = 0.0;  // other users of cell 0
  double inter = 0.0;  // users of all other cells
};

UplinkPowerSums uplink_power_sums(const LargeScaleScenario& s, int user) {
  UplinkPowerSums sums;
  sums.own = s.gain_ul(0, user) * s.p_ul(user);
  for (int c = 0; c < s.n_bs(); ++c) {
    for (int u : s.cell_ul[c]) {
      if (u == user) continue;
      const double gp = s.gain_ul(0, u) * s.p_ul(u);
      (c == 0 ? sums.intra : sums.inter) += gp;
    }
  }
  return sums;
}

// Inter-user interference power at downlink user j, split by the uplink
// users' serving cell. Uplink and downlink populations are disjoint, so the
// serving cell's sum runs over all of its uplink users.
struct IuiSums {
  double same = 0.0;
  double other = 0.0;
};

IuiSums iui_sums(const LargeScaleScenario& s, const SystemParams& p, int j) {
  IuiSums sums;
  for (int c = 0; c < s.n_bs(); ++c) {
    for (int u : s.cell_ul[c]) {
      const double tp = s.gain_iui(u, j) * s.p_ul(u) * p.sigma_iui2;
      (c == 0 ? sums.same : sums.other) += tp;
    }
  }
  return sums;
}

void finalize(SqinrBreakdown* b) {
  b->sqinr = b->numerator_w / b->denominator_w();
  b->se_bits_hz = se_from_sqinr(b->sqinr);
}

}  // namespace

double SqinrBreakdown::denominator_w() const {
  double total = 0.0;
  for (const auto& [name, value] : terms) total += value;
  return total;
}

double SqinrBreakdown::term(std::string_view name) const {
  for (const auto& [n, value] : terms)
    if (n == name) return value;
  throw std::invalid_argument("SqinrBreakdown: unknown term " +
                              std::string(name));
}

CVector mf_combiner(const CVector& h_hat) {
  if (h_hat.size() == 0 || h_hat.norm() == 0.0)
    throw std::invalid_argument("mf_combiner: zero channel estimate");
  return h_hat;
}

CVector mf_precoder(const CVector& h_hat) {
  if (h_hat.size() == 0 || h_hat.norm() == 0.0)
    throw std::invalid_argument("mf_precoder: zero channel estimate");
  // sqrt(n) / sqrt(E ||h_hat||^2) = 1 for unit-variance estimate entries,
  // so the matched precoder coincides with the combiner.
  return h_hat;
}

SqinrBreakdown uplink_sqinr(const LargeScaleScenario& s,
                            const SystemParams& p, int user) {
  require_served_by_bs0(s.serving_ul, user, "uplink_sqinr");
  const double au = p.alpha_u();
  const double ad = p.alpha_d();
  const double na = double(p.n_antennas);
  const double s2 = p.sigma2();
  const auto sums = uplink_power_sums(s, user);
  const int k0d = int(s.cell_dl[0].size());
  // No downlink streams means no loopback at all; otherwise the DAC-related
  // terms follow the single-stream accounting of the closed forms (the
  // stream count enters only the precoded-signal leakage).
  const double si = k0d > 0 ? p.p_si_w * p.mu_si2 : 0.0;

  SqinrBreakdown b;
  b.numerator_w = au * au * sums.own * na * na;
  b.terms = {
      {term::est_error, au * au * sums.own * na},
      {term::intra_cell, au * au * sums.intra * na},
      {term::inter_cell, au * au * sums.inter * na},
      {term::noise, au * au * s2 * na},
      {term::fd_self_interference, au * au * ad * ad * si * double(k0d) * na * na},
      {term::si_times_dac_noise, au * au * ad * (1.0 - ad) * si * na * na},
      {term::adc_noise,
       na * au * (1.0 - au) *
           (2.0 * sums.own + sums.intra + sums.inter + ad * si * na + s2)},
  };
  finalize(&b);
  return b;
}

SqinrBreakdown downlink_sqinr(const LargeScaleScenario& s,
                              const SystemParams& p, int user) {
  require_served_by_bs0(s.serving_dl, user, "downlink_sqinr");
  const double ad = p.alpha_d();
  const double na = double(p.n_antennas);
  const double s2 = p.sigma2();

  const double own = s.gain_dl(0, user) * s.p_dl(user);
  double intra = 0.0;
  for (int j : s.cell_dl[0])
    if (j != user) intra += s.gain_dl(0, user) * s.p_dl(j);
  double inter = 0.0, dac_other = 0.0;
  for (int c = 1; c < s.n_bs(); ++c) {
    const double gp = s.gain_dl(c, user) * s.p_dl_cell(c);
    inter += gp;
    dac_other += gp;
  }
  const auto iui = iui_sums(s, p, user);

  // DAC noise from the serving BS rides the user's own precoder among the
  // others, so the served stream counts twice; interfering BSs contribute
  // their total radiated power.
  const double dac_own = s.gain_dl(0, user) * (s.p_dl(user) + s.p_dl_cell(0));

  SqinrBreakdown b;
  b.numerator_w = ad * ad * own * na;
  b.terms = {
      {term::est_error, ad * ad * own},
      {term::intra_cell, ad * ad * intra},
      {term::inter_cell, ad * ad * inter},
      {term::iui_same_cell, iui.same},
      {term::iui_other_cells, iui.other},
      {term::aqnm, ad * (1.0 - ad) * (dac_own + dac_other)},
      {term::noise, s2},
  };
  finalize(&b);
  return b;
}

SqinrBreakdown perfect_csi_uplink_sqinr(const LargeScaleScenario& s,
                                        const SystemParams& p, int user) {
  SqinrBreakdown b = uplink_sqinr(s, p, user);
  const double na = double(p.n_antennas);
  b.numerator_w *= (na * na + na) / (na * na);
  b.terms[0].second = 0.0;  // est_error
  finalize(&b);
  return b;
}

SqinrBreakdown perfect_csi_downlink_sqinr(const LargeScaleScenario& s,
                                          const SystemParams& p, int user) {
  SqinrBreakdown b = downlink_sqinr(s, p, user);
  const double na = double(p.n_antennas);
  b.numerator_w *= (na + 1.0) / na;
  b.terms[0].second = 0.0;  // est_error
  finalize(&b);
  return b;
}

double lemma1_uplink(const LargeScaleScenario& s, const SystemParams& p,
                     int user) {
  require_served_by_bs0(s.serving_ul, user, "lemma1_uplink");
  const auto sums = uplink_power_sums(s, user);
  const int k0d = int(s.cell_dl[0].size());
  const double si = k0d > 0 ? p.p_si_w * p.mu_si2 : 0.0;
  const double na = double(p.n_antennas);
  const double den = sums.own + sums.intra + sums.inter +
                     si * double(k0d) * na + p.sigma2();
  return se_from_sqinr(sums.own * na / den);
}

namespace {

double lemma1_downlink_den(const LargeScaleScenario& s, const SystemParams& p,
                           int user) {
  double gp_all = 0.0;
  for (int c = 0; c < s.n_bs(); ++c)
    gp_all += s.gain_dl(c, user) * s.p_dl_cell(c);
  const auto iui = iui_sums(s, p, user);
  return gp_all + iui.same + iui.other + p.sigma2();
}

}  // namespace

double lemma1_downlink(const LargeScaleScenario& s, const SystemParams& p,
                       int user) {
  require_served_by_bs0(s.serving_dl, user, "lemma1_downlink");
  const double num =
      s.gain_dl(0, user) * s.p_dl(user) * double(p.n_antennas);
  return se_from_sqinr(num / lemma1_downlink_den(s, p, user));
}

double lemma1_downlink_verbatim(const LargeScaleScenario& s,
                                const SystemParams& p, int user) {
  require_served_by_bs0(s.serving_dl, user, "lemma1_downlink_verbatim");
  const double num = s.gain_dl(0, user) * s.p_dl(user);
  return se_from_sqinr(num / lemma1_downlink_den(s, p, user));
}

double lemma2_uplink(const LargeScaleScenario& s, const SystemParams& p,
                     int user) {
  require_served_by_bs0(s.serving_ul, user, "lemma2_uplink");
  // Same convention as lemma2_downlink: one common budget P for uplink
  // users, downlink cells, and the loopback transmitter, P unbounded, so
  // the power weights drop out of every surviving term.
  const double au = p.alpha_u();
  const double ad = p.alpha_d();
  const double na = double(p.n_antennas);
  const double g_k = s.gain_ul(0, user);
  double g_all = 0.0;
  for (int c = 0; c < s.n_bs(); ++c)
    for (int u : s.cell_ul[c]) g_all += s.gain_ul(0, u);
  const int k0d = int(s.cell_dl[0].size());
  const double si_gain =
      k0d > 0
          ? ad * na * p.mu_si2 * (1.0 + au * ad * (double(k0d) - 1.0))
          : 0.0;
  const double den = g_all + (1.0 - au) * g_k + si_gain;
  return se_from_sqinr(au * g_k * na / den);
}

double lemma2_downlink(const LargeScaleScenario& s, const SystemParams& p,
                       int user) {
  require_served_by_bs0(s.serving_dl, user, "lemma2_downlink");
  // Limit of the hardening SQINR as one common budget P, assigned to the
  // uplink users, the downlink cells, and the loopback transmitter alike,
  // grows without bound. Uniform allocation splits a cell budget over its
  // users, so the served cell's numerator and DAC terms carry 1/K factors
  // while the per-user uplink weights cancel outright.
  const double ad = p.alpha_d();
  const double na = double(p.n_antennas);
  const double g_k = s.gain_dl(0, user);
  const double k0 = double(s.cell_dl[0].size());
  double g_tx = 0.0, g_other = 0.0;
  for (int c = 0; c < s.n_bs(); ++c) {
    if (s.cell_dl[c].empty()) continue;  // silent cell, no radiated power
    g_tx += s.gain_dl(c, user);
    if (c != 0) g_other += s.gain_dl(c, user);
  }
  double t_all = 0.0;
  for (int c = 0; c < s.n_bs(); ++c)
    for (int u : s.cell_ul[c]) t_all += s.gain_iui(u, user) * p.sigma_iui2;
  const double den = ad * ad * g_tx + t_all +
                     ad * (1.0 - ad) * (g_k * (k0 + 1.0) / k0 + g_other);
  return se_from_sqinr(ad * ad * g_k * na / k0 / den);
}

double lemma3_uplink(double g_k, double e_k, double e_si, int k_d,
                     const SystemParams& p) {
  if (k_d < 0) throw std::invalid_argument("lemma3_uplink: negative k_d");
  const double au = p.alpha_u();
  const double ad = p.alpha_d();
  const double si =
      k_d > 0 ? ad * p.mu_si2 * e_si * (1.0 + au * ad * (double(k_d) - 1.0))
              : 0.0;
  return se_from_sqinr(au * g_k * e_k / (si + p.sigma2()));
}

double lemma3_downlink(double g_k, double e_k, const SystemParams& p) {
  const double ad = p.alpha_d();
  return se_from_sqinr(ad * ad * g_k * e_k / p.sigma2());
}

void write_breakdown_csv(std::ostream& out, const SqinrBreakdown& b, int user,
                         std::string_view link) {
  const std::string u = std::to_string(user);
  const std::string l(link);
  const std::string sqinr = format_double(b.sqinr);
  const std::string se = format_double(b.se_bits_hz);
  write_csv_row(out, {u, l, "numerator", format_double(b.numerator_w), sqinr,
                      se});
  for (const auto& [name, value] : b.terms)
    write_csv_row(out, {u, l, name, format_double(value), sqinr, se});
}

}  // namespace fdmimo
