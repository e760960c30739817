#pragma once

#include <string>

namespace fdmimo {

// ADC energy-per-step scenarios: 5 / 65 / 494 fJ per conversion step per Hz.
enum class AdcScenario { Lpadc, Ipadc, Hpadc };

const char* to_string(AdcScenario s);
AdcScenario adc_scenario_from_string(const std::string& name);

// Published per-device consumption values (W) plus the ADC energy
// coefficient c (J per step per Hz).
struct DevicePowerTable {
  double rho_lna_w = 39e-3;
  double rho_sp_w = 19.5e-3;     // splitter
  double rho_c_w = 19.5e-3;      // combiner
  double rho_ps_w = 2e-3;        // phase shifter
  double rho_m_w = 16.8e-3;      // mixer
  double rho_lo_w = 5e-3;        // local oscillator
  double rho_lpf_w = 14e-3;      // low-pass filter
  double rho_bbamp_w = 5e-3;     // baseband amplifier
  double c_j_per_step_hz = 494e-15;

  static DevicePowerTable for_scenario(AdcScenario s);
};

// Which devices the per-antenna receive chain multiplies by n_antennas. The
// default is a full-digital I/Q chain: LNA, mixer, LPF, baseband amplifier,
// and two ADCs per antenna, with one LO and one combiner shared. The tables
// give no composition rule, so the chain is configurable; the splitter and
// phase shifter sit outside the default receive path.
struct RxChainConfig {
  bool include_lna = true;
  bool include_mixer = true;
  bool include_lpf = true;
  bool include_bbamp = true;
  bool include_splitter = false;
  bool include_phase_shifter = false;
  int adcs_per_antenna = 2;  // I and Q
  bool include_lo = true;    // shared, counted once
  bool include_combiner = true;
};

// c * B * 2^b. Throws for b < 1 or B <= 0.
double adc_power(double c_j_per_step_hz, double bandwidth_hz, int b);

// Total receive power of an n_antennas chain under the given composition.
double rx_power(int n_antennas, int b, const DevicePowerTable& table,
                double bandwidth_hz, const RxChainConfig& chain = {});

// bits per joule. Throws for power <= 0.
double energy_efficiency(double sum_rate_bps, double total_power_w);

}  // namespace fdmimo
