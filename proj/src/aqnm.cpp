#include "fdmimo/aqnm.hpp"

#include <cmath>
#include <stdexcept>

namespace fdmimo {

double rho_from_bits(int b) {
  if (b < 1) throw std::invalid_argument("rho_from_bits: need b >= 1");
  // Exact minimum mean-square distortion of a unit-variance Gaussian
  // quantizer for b = 1..5; beyond that the asymptote is accurate.
  static constexpr double kTable[5] = {0.3634, 0.1175, 0.03454, 0.009497,
                                       0.002499};
  if (b <= 5) return kTable[b - 1];
  return (M_PI * std::sqrt(3.0) / 2.0) * std::exp2(-2 * b);
}

QuantizerModel quantizer_from_bits(int b) {
  const double rho = rho_from_bits(b);
  return {b, rho, 1.0 - rho};
}

CVector quantize(const CVector& y, double alpha, const RVector& r_q_diag,
                 RngStream& rng) {
  if (y.size() != r_q_diag.size())
    throw std::invalid_argument("quantize: covariance size mismatch");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("quantize: alpha must be in (0, 1]");
  CVector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (r_q_diag(i) < 0.0)
      throw std::invalid_argument("quantize: negative noise variance");
    out(i) = alpha * y(i) + rng.cnormal(r_q_diag(i));
  }
  return out;
}

RVector downlink_noise_cov(const CMatrix& f, double alpha_d) {
  return alpha_d * (1.0 - alpha_d) * f.cwiseAbs2().rowwise().sum();
}

RVector uplink_noise_cov(const CMatrix& h, const RVector& p_rx,
                         const CMatrix& h_si, const CMatrix& f, double p_si,
                         double sigma2, double alpha_u, double alpha_d) {
  const Eigen::Index n = h.rows();
  if (p_rx.size() != h.cols())
    throw std::invalid_argument("uplink_noise_cov: one power per user column");
  if (sigma2 < 0.0 || p_si < 0.0)
    throw std::invalid_argument("uplink_noise_cov: negative power");

  // Received-signal power per antenna: sum_k p_k |h_{m,k}|^2.
  RVector diag = h.cwiseAbs2() * p_rx;

  // Loopback contribution p_si * diag(H_si (a_d^2 F F* + R_qd) H_si*),
  // split so it costs O(n^2 k) instead of O(n^3):
  //   a_d^2 F F* part  -> row norms of H_si F,
  //   diagonal R_qd    -> |H_si|^2 times the R_qd diagonal.
  if (p_si > 0.0 && f.cols() > 0) {
    if (h_si.rows() != n || h_si.cols() != n || f.rows() != n)
      throw std::invalid_argument("uplink_noise_cov: dimension mismatch");
    const RVector r_qd = downlink_noise_cov(f, alpha_d);
    diag += p_si * (alpha_d * alpha_d) *
            (h_si * f).cwiseAbs2().rowwise().sum().eval();
    diag += p_si * (h_si.cwiseAbs2() * r_qd).eval();
  }

  diag.array() += sigma2;
  return alpha_u * (1.0 - alpha_u) * diag;
}

}  // namespace fdmimo
