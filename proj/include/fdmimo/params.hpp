#pragma once

#include <optional>

#include "fdmimo/types.hpp"

namespace fdmimo {

// Scalar physical parameters shared by every module. Defaults follow the
// standard macrocell evaluation setup: 20 MHz bandwidth, pathloss exponent
// 3.5, 5 dB lognormal shadowing, 40 W downlink and SI power, 250 mW uplink
// power, 10 dB per-entry SI channel power, -174 dBm/Hz noise density, and a
// 100-antenna full-duplex BS.
struct SystemParams {
  double eta = 3.5;                      // pathloss exponent, > 2
  double l_ref = 1.0;                    // pathloss intercept at 1 m (linear)
  double sigma_sh_db = 5.0;              // shadowing std (dB)
  int n_antennas = 100;                  // N_a
  double bandwidth_hz = 20e6;            // B
  double noise_density_dbm_hz = -174.0;  // thermal noise PSD
  double p_uplink_w = 0.25;              // per-user uplink power
  double p_downlink_w = 40.0;            // downlink power per cell (split
                                         // uniformly across its users)
  double p_si_w = 40.0;                  // per-stream loopback SI power
  double mu_si2 = 10.0;                  // SI channel per-entry power (linear)
  double sigma_iui2 = 1.0;               // user-to-user small-scale variance
  int b_u = 4;                           // ADC resolution (bits)
  int b_d = 4;                           // DAC resolution (bits)
  int k_u = 4;                           // uplink users per cell
  int k_d = 4;                           // downlink users per cell
  double d_min_m = 10.0;                 // minimum BS-user distance

  // Direct overrides. alpha overrides bypass the resolution table (used for
  // the fractional distortion settings that no integer b produces); the
  // sigma2 override bypasses the noise-density computation.
  std::optional<double> alpha_u_override;
  std::optional<double> alpha_d_override;
  std::optional<double> sigma2_override_w;

  // Quantizer gains 1 - rho(b), or the overrides when set.
  double alpha_u() const;
  double alpha_d() const;

  // Noise power in W: density * bandwidth unless overridden.
  double sigma2() const;

  // Throws std::invalid_argument on any out-of-domain field.
  void validate() const;
};

}  // namespace fdmimo
