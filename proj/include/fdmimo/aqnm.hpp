#pragma once

#include "fdmimo/rng.hpp"
#include "fdmimo/types.hpp"

namespace fdmimo {

// Additive quantization noise model: a quantizer of resolution b acts as
// y_q = alpha * y + q with alpha = 1 - rho(b) and q zero-mean Gaussian noise
// whose covariance tracks the input power (uplink_noise_cov /
// downlink_noise_cov below).
struct QuantizerModel {
  int bits = 0;
  double rho = 0.0;
  double alpha = 0.0;
};

// Distortion factor of a b-bit quantizer. Exact Lloyd-Max values for
// b = 1..5; the 2^(-2b) asymptote beyond. The asymptotic formula is a poor
// fit at small b (0.680 vs the exact 0.3634 at b = 1), which is why the
// table takes precedence. Throws std::invalid_argument for b < 1.
double rho_from_bits(int b);

QuantizerModel quantizer_from_bits(int b);

// alpha * y + q with q ~ CN(0, R_q) drawn from rng, for diagonal R_q given
// by its diagonal. Throws if any variance is negative or sizes mismatch.
CVector quantize(const CVector& y, double alpha, const RVector& r_q_diag,
                 RngStream& rng);

// ADC noise covariance diagonal at a full-duplex BS:
//   diag(sum_k p_k h_k h_k* + p_si H_si (a_d^2 F F* + R_qd) H_si* + s2 I)
// scaled by a_u (1 - a_u). Columns of h carry unit-variance fading; p_rx
// holds the per-user received powers G*P. F holds the unit-normalized
// precoders whose DAC noise R_qd = downlink_noise_cov(F, a_d) is formed
// internally.
RVector uplink_noise_cov(const CMatrix& h, const RVector& p_rx,
                         const CMatrix& h_si, const CMatrix& f, double p_si,
                         double sigma2, double alpha_u, double alpha_d);

// DAC noise covariance diagonal: a_d (1 - a_d) diag(F F*).
RVector downlink_noise_cov(const CMatrix& f, double alpha_d);

}  // namespace fdmimo
