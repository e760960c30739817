#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fdmimo/netgeom.hpp"
#include "fdmimo/simkernel.hpp"

using namespace fdmimo;

namespace {

// Two-cell scenario small enough for fast trial loops.
LargeScaleScenario small_scenario(SystemParams* params) {
  params->n_antennas = 8;
  params->k_u = 2;
  params->k_d = 1;
  params->sigma2_override_w = 1e-9;
  const NetworkLayout layout =
      make_custom_layout({Point2(0.0, 0.0), Point2(800.0, 0.0)},
                         Region::disc(Point2(400.0, 0.0), 900.0));
  return make_scenario(layout, *params, 61);
}

}  // namespace

TEST_CASE("trials are deterministic and index-sensitive") {
  SystemParams p;
  const LargeScaleScenario s = small_scenario(&p);
  const int u = s.cell_ul[0][0];
  const TrialResult a = simulate_uplink_trial(s, p, u, 99, 5);
  const TrialResult b = simulate_uplink_trial(s, p, u, 99, 5);
  CHECK(a.desired == b.desired);
  REQUIRE(a.terms.size() == b.terms.size());
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    CHECK(a.terms[i].first == b.terms[i].first);
    CHECK(a.terms[i].second == b.terms[i].second);
  }
  const TrialResult c = simulate_uplink_trial(s, p, u, 99, 6);
  CHECK(a.desired != c.desired);
  const TrialResult d = simulate_uplink_trial(s, p, u, 100, 5);
  CHECK(a.desired != d.desired);

  const int j = s.cell_dl[0][0];
  const TrialResult e = simulate_downlink_trial(s, p, j, 99, 5);
  const TrialResult f = simulate_downlink_trial(s, p, j, 99, 5);
  CHECK(e.desired == f.desired);
  CHECK(e.sqinr == f.sqinr);
  CHECK_THROWS_AS(simulate_uplink_trial(s, p, s.cell_ul[1][0], 99, 0),
                  std::invalid_argument);
}

TEST_CASE("structural zeros in a quiet uplink") {
  // Single cell, one user, no downlink streams, perfect converters: only
  // estimation error and thermal noise can fluctuate.
  SystemParams p;
  p.n_antennas = 8;
  p.k_u = 1;
  p.k_d = 0;
  p.alpha_u_override = 1.0;
  p.alpha_d_override = 1.0;
  const NetworkLayout layout = make_custom_layout(
      {Point2(0.0, 0.0)}, Region::disc(Point2(0.0, 0.0), 500.0));
  const LargeScaleScenario s = make_scenario(layout, p, 7);
  for (std::uint64_t t = 0; t < 50; ++t) {
    const TrialResult r = simulate_uplink_trial(s, p, 0, 3, t);
    CHECK(r.desired > 0.0);
    CHECK(r.terms[1].second == 0.0);  // intra_cell
    CHECK(r.terms[2].second == 0.0);  // inter_cell
    CHECK(r.terms[4].second == 0.0);  // fd_self_interference
    CHECK(r.terms[5].second == 0.0);  // si_times_dac_noise
    CHECK(r.terms[6].second == 0.0);  // adc_noise
    CHECK(r.terms[3].second > 0.0);   // noise
  }
}

TEST_CASE("aggregates are bit-identical across thread counts") {
  SystemParams p;
  const LargeScaleScenario s = small_scenario(&p);
  const int u = s.cell_ul[0][0];
  const TrialAggregate one = run_uplink_trials(s, p, u, 3000, 17, 1);
  const TrialAggregate four = run_uplink_trials(s, p, u, 3000, 17, 4);
  CHECK(one.desired.mean == four.desired.mean);
  CHECK(one.desired.std_error == four.desired.std_error);
  REQUIRE(one.terms.size() == four.terms.size());
  for (std::size_t i = 0; i < one.terms.size(); ++i) {
    CHECK(one.terms[i].second.mean == four.terms[i].second.mean);
    CHECK(one.terms[i].second.std_error == four.terms[i].second.std_error);
  }
  CHECK(one.sqinr == four.sqinr);

  const int j = s.cell_dl[0][0];
  const TrialAggregate da = run_downlink_trials(s, p, j, 2500, 17, 1);
  const TrialAggregate db = run_downlink_trials(s, p, j, 2500, 17, 3);
  CHECK(da.sqinr == db.sqinr);
  CHECK(da.desired.std_error == db.desired.std_error);
}

TEST_CASE("oracle means track the closed forms") {
  SystemParams p;
  const LargeScaleScenario s = small_scenario(&p);
  const int u = s.cell_ul[0][0];
  const int j = s.cell_dl[0][0];
  const std::int64_t trials = 20000;

  const SqinrBreakdown cf_ul = uplink_sqinr(s, p, u);
  const TrialAggregate mc_ul = run_uplink_trials(s, p, u, trials, 23, 0);
  CHECK(std::abs(mc_ul.desired.mean - cf_ul.numerator_w) <
        5.0 * mc_ul.desired.std_error);
  for (const auto& [name, st] : mc_ul.terms)
    CHECK(std::abs(st.mean - cf_ul.term(name)) <=
          5.0 * st.std_error + 1e-30);
  CHECK(mc_ul.sqinr == doctest::Approx(cf_ul.sqinr).epsilon(0.05));

  const SqinrBreakdown cf_dl = downlink_sqinr(s, p, j);
  const TrialAggregate mc_dl = run_downlink_trials(s, p, j, trials, 29, 0);
  CHECK(std::abs(mc_dl.desired.mean - cf_dl.numerator_w) <
        5.0 * mc_dl.desired.std_error);
  for (const auto& [name, st] : mc_dl.terms)
    CHECK(std::abs(st.mean - cf_dl.term(name)) <=
          5.0 * st.std_error + 1e-30);
  CHECK(mc_dl.sqinr == doctest::Approx(cf_dl.sqinr).epsilon(0.05));
}

TEST_CASE("empirical cdf and quantiles") {
  CHECK_THROWS_AS(estimate_cdf({}), std::invalid_argument);
  const CdfEstimate cdf = estimate_cdf({3.0, 1.0, 2.0});
  REQUIRE(cdf.n_samples == 3);
  CHECK(cdf.sorted_values[0] == 1.0);
  CHECK(cdf.sorted_values[2] == 3.0);
  CHECK(cdf.probabilities[0] == doctest::Approx(1.0 / 3.0));
  CHECK(cdf.probabilities[2] == doctest::Approx(1.0));
  CHECK(cdf.quantile(0.0) == 1.0);
  CHECK(cdf.quantile(1.0) == 3.0);
  CHECK(cdf.quantile(0.5) == doctest::Approx(2.0));
  CHECK(cdf.quantile(0.25) == doctest::Approx(1.5));
  CHECK_THROWS_AS(cdf.quantile(1.5), std::invalid_argument);

  // Uniform samples: quantiles track the level.
  RngStream rng(31, 11);
  std::vector<double> u(20000);
  for (auto& v : u) v = rng.uniform();
  const CdfEstimate ucdf = estimate_cdf(std::move(u));
  for (double level : {0.1, 0.5, 0.9})
    CHECK(ucdf.quantile(level) == doctest::Approx(level).epsilon(0.05));

  std::ostringstream out;
  write_cdf_csv(out, cdf);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "sample_db,prob");
  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("1,", 0) == 0);
}

TEST_CASE("matched-filter moment identities") {
  const MomentReport rep = verify_corollary1(16, 20000, 37);
  CHECK(std::abs(rep.norm2.mean - 16.0) < 5.0 * rep.norm2.std_error);
  CHECK(std::abs(rep.norm4.mean - (16.0 * 16.0 + 16.0)) <
        5.0 * rep.norm4.std_error);
  CHECK(std::abs(rep.cross.mean - 16.0) < 5.0 * rep.cross.std_error);
  CHECK_THROWS_AS(verify_corollary1(0, 10, 1), std::invalid_argument);
}
