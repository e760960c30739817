#include "fdmimo/powermodel.hpp"

#include <cmath>
#include <stdexcept>

namespace fdmimo {

const char* to_string(AdcScenario s) {
  switch (s) {
    case AdcScenario::Lpadc: return "LPADC";
    case AdcScenario::Ipadc: return "IPADC";
    case AdcScenario::Hpadc: return "HPADC";
  }
  throw std::invalid_argument("to_string: unknown ADC scenario");
}

AdcScenario adc_scenario_from_string(const std::string& name) {
  if (name == "LPADC") return AdcScenario::Lpadc;
  if (name == "IPADC") return AdcScenario::Ipadc;
  if (name == "HPADC") return AdcScenario::Hpadc;
  throw std::invalid_argument("adc_scenario_from_string: unknown scenario '" +
                              name + "' (expected LPADC, IPADC, or HPADC)");
}

DevicePowerTable DevicePowerTable::for_scenario(AdcScenario s) {
  DevicePowerTable t;
  switch (s) {
    case AdcScenario::Lpadc: t.c_j_per_step_hz = 5e-15; break;
    case AdcScenario::Ipadc: t.c_j_per_step_hz = 65e-15; break;
    case AdcScenario::Hpadc: t.c_j_per_step_hz = 494e-15; break;
  }
  return t;
}

double adc_power(double c_j_per_step_hz, double bandwidth_hz, int b) {
  if (b < 1) throw std::invalid_argument("adc_power: b must be >= 1");
  if (!(c_j_per_step_hz > 0.0) || !(bandwidth_hz > 0.0))
    throw std::invalid_argument("adc_power: c and bandwidth must be positive");
  return c_j_per_step_hz * bandwidth_hz * std::ldexp(1.0, b);
}

double rx_power(int n_antennas, int b, const DevicePowerTable& table,
                double bandwidth_hz, const RxChainConfig& chain) {
  if (n_antennas < 1)
    throw std::invalid_argument("rx_power: need at least one antenna");
  if (chain.adcs_per_antenna < 0)
    throw std::invalid_argument("rx_power: negative ADC count");
  double per_antenna = 0.0;
  if (chain.include_lna) per_antenna += table.rho_lna_w;
  if (chain.include_mixer) per_antenna += table.rho_m_w;
  if (chain.include_lpf) per_antenna += table.rho_lpf_w;
  if (chain.include_bbamp) per_antenna += table.rho_bbamp_w;
  if (chain.include_splitter) per_antenna += table.rho_sp_w;
  if (chain.include_phase_shifter) per_antenna += table.rho_ps_w;
  if (chain.adcs_per_antenna > 0)
    per_antenna += double(chain.adcs_per_antenna) *
                   adc_power(table.c_j_per_step_hz, bandwidth_hz, b);
  double shared = 0.0;
  if (chain.include_lo) shared += table.rho_lo_w;
  if (chain.include_combiner) shared += table.rho_c_w;
  return double(n_antennas) * per_antenna + shared;
}

double energy_efficiency(double sum_rate_bps, double total_power_w) {
  if (!(total_power_w > 0.0))
    throw std::invalid_argument("energy_efficiency: power must be positive");
  if (sum_rate_bps < 0.0)
    throw std::invalid_argument("energy_efficiency: negative rate");
  return sum_rate_bps / total_power_w;
}

}  // namespace fdmimo
