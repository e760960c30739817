#include "fdmimo/simkernel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "fdmimo/aqnm.hpp"
#include "fdmimo/csvio.hpp"
#include "fdmimo/linkperf.hpp"

namespace fdmimo {

namespace {

constexpr std::uint64_t kStreamUplinkTrials = 0x7a1a'11f7ull;
constexpr std::uint64_t kStreamDownlinkTrials = 0x7a1a'22d8ull;
constexpr std::uint64_t kStreamMoments = 0x7a1a'33c9ull;

// Trials per reduction chunk. Chunks are combined in index order, so sums
// are bit-identical for any worker count.
constexpr std::int64_t kChunkTrials = 1024;

int local_index(const std::vector<int>& cell0, int user, const char* who) {
  auto it = std::find(cell0.begin(), cell0.end(), user);
  if (it == cell0.end())
    throw std::invalid_argument(std::string(who) +
                                ": user is not served by the cell of interest");
  return int(it - cell0.begin());
}

double p2(const Complex& z) { return std::norm(z); }

}  // namespace

TrialResult simulate_uplink_trial(const LargeScaleScenario& s,
                                  const SystemParams& p, int user,
                                  std::uint64_t master_seed,
                                  std::uint64_t trial) {
  local_index(s.cell_ul[0], user, "simulate_uplink_trial");
  const int na = p.n_antennas;
  const int n_ul = s.users.n_uplink();
  const int k0d = int(s.cell_dl[0].size());
  const double au = p.alpha_u();
  const double ad = p.alpha_d();
  const double s2 = p.sigma2();
  const bool si_active = p.p_si_w > 0.0 && p.mu_si2 > 0.0 && k0d > 0;

  // One sequential stream per trial; the draw order below is part of the
  // reproducibility contract.
  RngStream rng = RngStream(master_seed, kStreamUplinkTrials).split(trial);

  // 1. Uplink fading to BS 0, one column per user, and the received powers.
  CMatrix h(na, n_ul);
  for (int u = 0; u < n_ul; ++u) h.col(u) = sample_small_scale(na, rng);
  RVector p_rx(n_ul);
  for (int u = 0; u < n_ul; ++u) p_rx(u) = s.gain_ul(0, u) * s.p_ul(u);

  // 2. BS 0's own precoders (its downlink users' serving-channel estimates).
  CMatrix f(na, k0d);
  for (int k = 0; k < k0d; ++k) f.col(k) = sample_small_scale(na, rng);

  // 3. Loopback channel, downlink symbols, DAC noise.
  CMatrix h_si;
  CVector s_dl, q_d;
  if (si_active) {
    h_si = sample_si_channel(na, p.mu_si2, rng);
    s_dl.resize(k0d);
    for (int k = 0; k < k0d; ++k) s_dl(k) = rng.cnormal(1.0);
    const RVector r_qd = downlink_noise_cov(f, ad);
    q_d.resize(na);
    for (int m = 0; m < na; ++m) q_d(m) = rng.cnormal(r_qd(m));
  }

  // 4. Uplink symbols, AWGN, ADC noise from the tracked covariance.
  CVector s_ul(n_ul);
  for (int u = 0; u < n_ul; ++u) s_ul(u) = rng.cnormal(1.0);
  CVector v(na);
  for (int m = 0; m < na; ++m) v(m) = rng.cnormal(s2);
  const RVector r_qu =
      uplink_noise_cov(h, p_rx, h_si, si_active ? f : CMatrix(na, 0),
                       si_active ? p.p_si_w : 0.0, s2, au, ad);
  CVector q_u(na);
  for (int m = 0; m < na; ++m) q_u(m) = rng.cnormal(r_qu(m));

  // Matched filter of the measured user, applied to each labeled component.
  const CVector w = h.col(user);
  const Eigen::RowVectorXcd wh = w.adjoint() * h;
  const double sqrt_gp = std::sqrt(p_rx(user));

  Complex intra = 0.0, inter = 0.0;
  for (int c = 0; c < s.n_bs(); ++c) {
    for (int u : s.cell_ul[c]) {
      if (u == user) continue;
      const Complex a = std::sqrt(p_rx(u)) * wh(u) * s_ul(u);
      (c == 0 ? intra : inter) += a;
    }
  }

  Complex fd_si = 0.0, si_dac = 0.0;
  if (si_active) {
    const Eigen::RowVectorXcd w_hsi = w.adjoint() * h_si;
    const double sp = std::sqrt(p.p_si_w);
    for (int k = 0; k < k0d; ++k)
      fd_si += (w_hsi * f.col(k))(0) * s_dl(k);
    fd_si *= au * ad * sp;
    si_dac = au * sp * (w_hsi * q_d)(0);
  }

  TrialResult r;
  r.user = user;
  r.trial_index = trial;
  r.desired = p2(au * sqrt_gp * double(na) * s_ul(user));
  r.terms = {
      {term::est_error,
       p2(au * sqrt_gp * (wh(user) - double(na)) * s_ul(user))},
      {term::intra_cell, p2(au * intra)},
      {term::inter_cell, p2(au * inter)},
      {term::noise, p2(au * (w.adjoint() * v)(0))},
      {term::fd_self_interference, p2(fd_si)},
      {term::si_times_dac_noise, p2(si_dac)},
      {term::adc_noise, p2((w.adjoint() * q_u)(0))},
  };
  double den = 0.0;
  for (const auto& [name, value] : r.terms) den += value;
  r.sqinr = r.desired / den;
  return r;
}

TrialResult simulate_downlink_trial(const LargeScaleScenario& s,
                                    const SystemParams& p, int user,
                                    std::uint64_t master_seed,
                                    std::uint64_t trial) {
  const int j_local = local_index(s.cell_dl[0], user, "simulate_downlink_trial");
  const int na = p.n_antennas;
  const int n_bs = s.n_bs();
  const double ad = p.alpha_d();
  const double s2 = p.sigma2();

  RngStream rng = RngStream(master_seed, kStreamDownlinkTrials).split(trial);

  // Per BS: precoders for its own users (power-scaled columns) and the
  // measured user's channel to that BS. At the serving BS the measured
  // user's channel IS its precoder column; that correlation drives the
  // hardening and DAC-noise statistics.
  Complex desired = 0.0, est = 0.0, intra = 0.0, inter = 0.0, aqnm_amp = 0.0;
  for (int c = 0; c < n_bs; ++c) {
    const auto& users_c = s.cell_dl[c];
    const int kc = int(users_c.size());
    if (kc == 0) continue;
    CMatrix f(na, kc);
    for (int k = 0; k < kc; ++k) f.col(k) = sample_small_scale(na, rng);

    CVector h_user;
    if (c == 0) {
      h_user = f.col(j_local);
    } else {
      h_user = sample_small_scale(na, rng);
    }

    CVector s_c(kc);
    for (int k = 0; k < kc; ++k) s_c(k) = rng.cnormal(1.0);

    // Power-scaled precoding matrix: column k carries sqrt(P_k / n_a).
    CMatrix f_scaled = f;
    for (int k = 0; k < kc; ++k)
      f_scaled.col(k) *= std::sqrt(s.p_dl(users_c[k]) / double(na));

    const RVector r_qd = downlink_noise_cov(f_scaled, ad);
    CVector q_d(na);
    for (int m = 0; m < na; ++m) q_d(m) = rng.cnormal(r_qd(m));

    const double sqrt_g = std::sqrt(s.gain_dl(c, user));
    const Eigen::RowVectorXcd hf = h_user.adjoint() * f_scaled;
    for (int k = 0; k < kc; ++k) {
      const Complex a = ad * sqrt_g * hf(k) * s_c(k);
      if (c == 0 && k == j_local) {
        const double mean_amp =
            std::sqrt(s.gain_dl(0, user) * s.p_dl(user) / double(na)) *
            double(na);
        desired = ad * mean_amp * s_c(k);
        est = a - desired;
      } else if (c == 0) {
        intra += a;
      } else {
        inter += a;
      }
    }
    aqnm_amp += sqrt_g * (h_user.adjoint() * q_d)(0);
  }

  // Uplink-user interference scalars and thermal noise at the user.
  Complex iui_same = 0.0, iui_other = 0.0;
  for (int c = 0; c < n_bs; ++c) {
    for (int u : s.cell_ul[c]) {
      const Complex g = sample_iui_channel(p.sigma_iui2, rng);
      const Complex a =
          std::sqrt(s.gain_iui(u, user) * s.p_ul(u)) * g * rng.cnormal(1.0);
      (c == 0 ? iui_same : iui_other) += a;
    }
  }
  const Complex v = rng.cnormal(s2);

  TrialResult r;
  r.user = user;
  r.trial_index = trial;
  r.desired = p2(desired);
  r.terms = {
      {term::est_error, p2(est)},
      {term::intra_cell, p2(intra)},
      {term::inter_cell, p2(inter)},
      {term::iui_same_cell, p2(iui_same)},
      {term::iui_other_cells, p2(iui_other)},
      {term::aqnm, p2(aqnm_amp)},
      {term::noise, p2(v)},
  };
  double den = 0.0;
  for (const auto& [name, value] : r.terms) den += value;
  r.sqinr = r.desired / den;
  return r;
}

namespace {

using TrialFn = TrialResult (*)(const LargeScaleScenario&, const SystemParams&,
                                int, std::uint64_t, std::uint64_t);

TrialAggregate run_trials(const LargeScaleScenario& s, const SystemParams& p,
                          int user, std::int64_t n_trials,
                          std::uint64_t master_seed, int n_threads,
                          TrialFn trial_fn) {
  if (n_trials < 1)
    throw std::invalid_argument("run_trials: need at least one trial");
  // Term names and count are fixed per link; probe once.
  const TrialResult probe = trial_fn(s, p, user, master_seed, 0);
  const int n_terms = int(probe.terms.size());

  struct Partial {
    double desired_sum = 0.0, desired_sq = 0.0;
    std::vector<double> term_sum, term_sq;
  };
  const std::int64_t n_chunks = (n_trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<Partial> partials(n_chunks);

  std::atomic<std::int64_t> next_chunk{0};
  auto worker = [&]() {
    for (;;) {
      const std::int64_t c = next_chunk.fetch_add(1);
      if (c >= n_chunks) return;
      Partial acc;
      acc.term_sum.assign(n_terms, 0.0);
      acc.term_sq.assign(n_terms, 0.0);
      const std::int64_t begin = c * kChunkTrials;
      const std::int64_t end = std::min(begin + kChunkTrials, n_trials);
      for (std::int64_t t = begin; t < end; ++t) {
        const TrialResult r = trial_fn(s, p, user, master_seed, t);
        acc.desired_sum += r.desired;
        acc.desired_sq += r.desired * r.desired;
        for (int i = 0; i < n_terms; ++i) {
          acc.term_sum[i] += r.terms[i].second;
          acc.term_sq[i] += r.terms[i].second * r.terms[i].second;
        }
      }
      partials[c] = std::move(acc);
    }
  };

  int hw = n_threads > 0 ? n_threads
                         : int(std::thread::hardware_concurrency());
  hw = std::max(1, std::min<int>(hw, int(n_chunks)));
  std::vector<std::thread> pool;
  for (int i = 0; i < hw; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  // In-order combine keeps the floating-point result independent of how
  // chunks were scheduled across workers.
  Partial total;
  total.term_sum.assign(n_terms, 0.0);
  total.term_sq.assign(n_terms, 0.0);
  for (const auto& part : partials) {
    total.desired_sum += part.desired_sum;
    total.desired_sq += part.desired_sq;
    for (int i = 0; i < n_terms; ++i) {
      total.term_sum[i] += part.term_sum[i];
      total.term_sq[i] += part.term_sq[i];
    }
  }

  const double n = double(n_trials);
  auto stats = [&](double sum, double sq) {
    TermStats st;
    st.mean = sum / n;
    const double var =
        n > 1 ? std::max(0.0, (sq - n * st.mean * st.mean) / (n - 1.0)) : 0.0;
    st.std_error = std::sqrt(var / n);
    return st;
  };

  TrialAggregate agg;
  agg.user = user;
  agg.n_trials = n_trials;
  agg.desired = stats(total.desired_sum, total.desired_sq);
  double den = 0.0;
  for (int i = 0; i < n_terms; ++i) {
    agg.terms.emplace_back(probe.terms[i].first,
                           stats(total.term_sum[i], total.term_sq[i]));
    den += agg.terms.back().second.mean;
  }
  agg.sqinr = agg.desired.mean / den;
  agg.se_bits_hz = std::log2(1.0 + agg.sqinr);
  return agg;
}

}  // namespace

TrialAggregate run_uplink_trials(const LargeScaleScenario& s,
                                 const SystemParams& p, int user,
                                 std::int64_t n_trials,
                                 std::uint64_t master_seed, int n_threads) {
  return run_trials(s, p, user, n_trials, master_seed, n_threads,
                    &simulate_uplink_trial);
}

TrialAggregate run_downlink_trials(const LargeScaleScenario& s,
                                   const SystemParams& p, int user,
                                   std::int64_t n_trials,
                                   std::uint64_t master_seed, int n_threads) {
  return run_trials(s, p, user, n_trials, master_seed, n_threads,
                    &simulate_downlink_trial);
}

CdfEstimate estimate_cdf(std::vector<double> samples) {
  if (samples.empty())
    throw std::invalid_argument("estimate_cdf: no samples");
  std::sort(samples.begin(), samples.end());
  CdfEstimate cdf;
  cdf.n_samples = std::int64_t(samples.size());
  cdf.probabilities.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    cdf.probabilities[i] = double(i + 1) / double(samples.size());
  cdf.sorted_values = std::move(samples);
  return cdf;
}

double CdfEstimate::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("CdfEstimate::quantile: p outside [0, 1]");
  if (sorted_values.empty())
    throw std::invalid_argument("CdfEstimate::quantile: empty estimate");
  const double pos = p * double(sorted_values.size() - 1);
  const std::size_t lo = std::size_t(pos);
  if (lo + 1 >= sorted_values.size()) return sorted_values.back();
  const double frac = pos - double(lo);
  return sorted_values[lo] * (1.0 - frac) + sorted_values[lo + 1] * frac;
}

void write_cdf_csv(std::ostream& out, const CdfEstimate& cdf) {
  write_csv_row(out, {"sample_db", "prob"});
  for (std::size_t i = 0; i < cdf.sorted_values.size(); ++i)
    write_csv_row(out, {format_double(cdf.sorted_values[i]),
                        format_double(cdf.probabilities[i])});
}

MomentReport verify_corollary1(int n_antennas, std::int64_t n_draws,
                               std::uint64_t seed) {
  if (n_antennas < 1 || n_draws < 1)
    throw std::invalid_argument("verify_corollary1: bad sizes");
  RngStream rng(seed, kStreamMoments);
  double s2 = 0.0, q2 = 0.0, s4 = 0.0, q4 = 0.0, sx = 0.0, qx = 0.0;
  for (std::int64_t t = 0; t < n_draws; ++t) {
    const CVector h = sample_small_scale(n_antennas, rng);
    const CVector hp = sample_small_scale(n_antennas, rng);
    const CVector w = mf_combiner(h);
    const double n2 = w.squaredNorm();
    const double n4 = n2 * n2;
    const double cross = std::norm((w.adjoint() * hp)(0));
    s2 += n2;
    q2 += n2 * n2;
    s4 += n4;
    q4 += n4 * n4;
    sx += cross;
    qx += cross * cross;
  }
  const double n = double(n_draws);
  auto stats = [&](double sum, double sq) {
    TermStats st;
    st.mean = sum / n;
    const double var =
        n > 1 ? std::max(0.0, (sq - n * st.mean * st.mean) / (n - 1.0)) : 0.0;
    st.std_error = std::sqrt(var / n);
    return st;
  };
  MomentReport rep;
  rep.n_draws = n_draws;
  rep.norm2 = stats(s2, q2);
  rep.norm4 = stats(s4, q4);
  rep.cross = stats(sx, qx);
  return rep;
}

}  // namespace fdmimo
