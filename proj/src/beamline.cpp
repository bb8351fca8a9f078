#include "evortex/beamline.hpp"

#include "evortex/constants.hpp"
#include "evortex/errors.hpp"

#include <cmath>
#include <cstdlib>

namespace evortex::beamline {

namespace {
constexpr double kE0 = constants::electron_rest_energy_ev;

void require_positive_voltage(double voltage_v) {
  if (!(voltage_v > 0.0))
    throw validation_error("accelerating voltage must be > 0 V");
}
} // namespace

double electron_wavelength_pm(double voltage_v) {
  require_positive_voltage(voltage_v);
  const double e_ev = voltage_v; // kinetic energy in eV
  const double lambda_nm = constants::hc_ev_nm / std::sqrt(e_ev * (e_ev + 2.0 * kE0));
  return lambda_nm * 1e3;
}

double electron_velocity_m_per_s(double voltage_v) {
  require_positive_voltage(voltage_v);
  const double gamma = 1.0 + voltage_v / kE0;
  const double beta = std::sqrt(1.0 - 1.0 / (gamma * gamma));
  return constants::speed_of_light_m_per_s * beta;
}

double interaction_constant_rad_per_v_nm(double voltage_v) {
  require_positive_voltage(voltage_v);
  const double lambda_nm = electron_wavelength_pm(voltage_v) * 1e-3;
  return 2.0 * constants::pi / (lambda_nm * voltage_v) *
         (kE0 + voltage_v) / (2.0 * kE0 + voltage_v);
}

double larmor_frequency_rad_per_s(double b_tesla) {
  return constants::elementary_charge_c * b_tesla / (2.0 * constants::electron_mass_kg);
}

double landau_energy_ev(int p, int ell, double b_tesla) {
  if (p < 0) throw validation_error("landau radial index p must be >= 0");
  const double omega = larmor_frequency_rad_per_s(b_tesla);
  const double joule = constants::hbar_j_s * omega * (2.0 * p + ell + std::abs(ell) + 1.0);
  return joule / constants::elementary_charge_c;
}

double wavefront_step_length_nm(int ell, double wavelength_pm) {
  if (ell == 0) throw validation_error("wavefront step length undefined for ell = 0");
  return std::abs(ell) * wavelength_pm * 1e-3;
}

BeamParams BeamParams::from_voltage(double voltage_v) {
  BeamParams b;
  b.accelerating_voltage_v = voltage_v;
  b.wavelength_pm = electron_wavelength_pm(voltage_v);
  b.velocity_m_per_s = electron_velocity_m_per_s(voltage_v);
  b.interaction_constant_rad_per_v_nm = beamline::interaction_constant_rad_per_v_nm(voltage_v);
  return b;
}

} // namespace evortex::beamline
