// beamline.hpp - relativistic beam constants and closed-form beam quantities
#ifndef EVORTEX_BEAMLINE_HPP
#define EVORTEX_BEAMLINE_HPP

namespace evortex::beamline {

/// Relativistic electron beam parameters, all derived from the accelerating
/// voltage. Pure value type; recomputing from the voltage reproduces every
/// field to the digit.
struct BeamParams {
  double accelerating_voltage_v = 0.0;
  double wavelength_pm = 0.0;
  double velocity_m_per_s = 0.0;
  double interaction_constant_rad_per_v_nm = 0.0;

  static BeamParams from_voltage(double voltage_v);
};

/// Axial magnetic lens field. The sign encodes the field direction along the
/// optic axis.
struct LensField {
  double b_tesla = 0.0;
};

/// de Broglie wavelength in pm for an electron accelerated through voltage_v.
double electron_wavelength_pm(double voltage_v);

/// Electron speed in m/s for an electron accelerated through voltage_v.
double electron_velocity_m_per_s(double voltage_v);

/// Thickness-to-phase interaction constant C_E in rad/(V nm):
/// phase = C_E * V_mip * t.
double interaction_constant_rad_per_v_nm(double voltage_v);

/// Larmor frequency eB/2m in rad/s, signed with B.
double larmor_frequency_rad_per_s(double b_tesla);

/// Transverse energy (eV) of the Landau state with radial index p and
/// topological charge ell in a uniform field B.
double landau_energy_ev(int p, int ell, double b_tesla);

/// Axial distance (nm) between successive arrivals of one helical wavefront
/// sheet at the same azimuth: |ell| * wavelength.
double wavefront_step_length_nm(int ell, double wavelength_pm);

} // namespace evortex::beamline

#endif
