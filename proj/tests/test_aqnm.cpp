#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fdmimo/aqnm.hpp"
#include "fdmimo/channel.hpp"

using namespace fdmimo;

TEST_CASE("distortion table and extension") {
  CHECK(rho_from_bits(1) == 0.3634);
  CHECK(rho_from_bits(2) == 0.1175);
  CHECK(rho_from_bits(3) == 0.03454);
  CHECK(rho_from_bits(4) == 0.009497);
  CHECK(rho_from_bits(5) == 0.002499);
  // Uniform-quantizer asymptote past the table.
  CHECK(rho_from_bits(6) ==
        doctest::Approx(M_PI * std::sqrt(3.0) / 2.0 / 4096.0).epsilon(1e-12));
  CHECK_THROWS_AS(rho_from_bits(0), std::invalid_argument);
  for (int b = 1; b < 14; ++b)
    CHECK(rho_from_bits(b + 1) < rho_from_bits(b));

  const QuantizerModel q = quantizer_from_bits(3);
  CHECK(q.bits == 3);
  CHECK(q.rho == 0.03454);
  CHECK(q.alpha == doctest::Approx(1.0 - 0.03454));
}

TEST_CASE("quantize scales the signal and adds the prescribed noise") {
  const int na = 4, n = 100000;
  const double alpha = 0.7;
  RVector r_q(na);
  r_q << 0.5, 1.0, 2.0, 3.0;
  CVector y(na);
  y << Complex(1.0, -2.0), Complex(0.0, 3.0), Complex(-1.5, 0.5),
      Complex(2.0, 2.0);

  RngStream rng(17, 4);
  CVector err_mean = CVector::Zero(na);
  RVector err_var = RVector::Zero(na);
  for (int i = 0; i < n; ++i) {
    const CVector yq = quantize(y, alpha, r_q, rng);
    const CVector e = yq - alpha * y;
    err_mean += e;
    err_var += e.cwiseAbs2();
  }
  for (int m = 0; m < na; ++m) {
    CHECK(std::abs(err_mean(m)) / n <
          5.0 * std::sqrt(r_q(m) / double(n)));
    CHECK(err_var(m) / n == doctest::Approx(r_q(m)).epsilon(0.02));
  }

  // Same stream state reproduces the draw.
  RngStream a(9, 1), b(9, 1);
  const CVector qa = quantize(y, alpha, r_q, a);
  const CVector qb = quantize(y, alpha, r_q, b);
  CHECK((qa - qb).norm() == 0.0);

  CHECK_THROWS_AS(quantize(y, 0.0, r_q, a), std::invalid_argument);
  RVector bad = r_q;
  bad(2) = -1.0;
  CHECK_THROWS_AS(quantize(y, alpha, bad, a), std::invalid_argument);
}

TEST_CASE("downlink converter noise covariance") {
  RngStream rng(23, 6);
  const int na = 4, k = 3;
  CMatrix f(na, k);
  for (int j = 0; j < k; ++j) f.col(j) = sample_small_scale(na, rng);
  const double ad = 0.9;

  const RVector got = downlink_noise_cov(f, ad);
  for (int m = 0; m < na; ++m) {
    double diag = 0.0;
    for (int j = 0; j < k; ++j) diag += std::norm(f(m, j));
    CHECK(got(m) == doctest::Approx(ad * (1.0 - ad) * diag).epsilon(1e-12));
  }
  CHECK(downlink_noise_cov(f, 1.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("uplink converter noise covariance") {
  RngStream rng(29, 7);
  const int na = 4, n_users = 3, k_d = 2;
  CMatrix h(na, n_users);
  for (int u = 0; u < n_users; ++u) h.col(u) = sample_small_scale(na, rng);
  RVector p_rx(n_users);
  p_rx << 2.0, 0.5, 1.25;
  CMatrix h_si = sample_si_channel(na, 10.0, rng);
  CMatrix f(na, k_d);
  for (int j = 0; j < k_d; ++j) f.col(j) = sample_small_scale(na, rng);
  const double p_si = 40.0, sigma2 = 0.3, au = 0.8, ad = 0.9;

  const RVector got = uplink_noise_cov(h, p_rx, h_si, f, p_si, sigma2, au, ad);
  const RVector r_qd = downlink_noise_cov(f, ad);
  for (int m = 0; m < na; ++m) {
    double diag = sigma2;
    for (int u = 0; u < n_users; ++u) diag += p_rx(u) * std::norm(h(m, u));
    // Loopback covariance: precoded streams through the DAC gain plus the
    // DAC noise, both filtered by row m of the SI channel.
    for (int j = 0; j < k_d; ++j) {
      Complex row_f = 0.0;
      for (int t = 0; t < na; ++t) row_f += h_si(m, t) * f(t, j);
      diag += p_si * ad * ad * std::norm(row_f);
    }
    for (int t = 0; t < na; ++t)
      diag += p_si * std::norm(h_si(m, t)) * r_qd(t);
    CHECK(got(m) ==
          doctest::Approx(au * (1.0 - au) * diag).epsilon(1e-12));
  }

  // Perfect resolution leaves nothing.
  CHECK(uplink_noise_cov(h, p_rx, h_si, f, p_si, sigma2, 1.0, ad)
            .cwiseAbs()
            .maxCoeff() == 0.0);
  // No loopback contribution without downlink streams.
  const RVector quiet = uplink_noise_cov(h, p_rx, CMatrix(na, 0),
                                         CMatrix(na, 0), 0.0, sigma2, au, ad);
  for (int m = 0; m < na; ++m) {
    double diag = sigma2;
    for (int u = 0; u < n_users; ++u) diag += p_rx(u) * std::norm(h(m, u));
    CHECK(quiet(m) == doctest::Approx(au * (1.0 - au) * diag).epsilon(1e-12));
  }
}
