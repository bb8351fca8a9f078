// waveopt.hpp - scalar electron wave optics: modes, propagation, apertures
#ifndef EVORTEX_WAVEOPT_HPP
#define EVORTEX_WAVEOPT_HPP

#include "evortex/field.hpp"

#include <string>

namespace evortex::waveopt {

enum class PropagationMethod { angular_spectrum, fresnel_transfer };

std::string to_string(PropagationMethod m);

/// Validated free-space propagation step. Construction fails with a
/// sampling_error when the transfer-function phase would advance by more
/// than pi per Fourier sample (dz > n * pitch^2 / lambda); the message
/// reports the maximum safe dz.
class PropagationPlan {
public:
  PropagationPlan(const ComplexField& ref, double dz_nm,
                  PropagationMethod method = PropagationMethod::angular_spectrum,
                  double output_rescale = 1.0);

  double dz_nm() const { return dz_nm_; }
  PropagationMethod method() const { return method_; }
  double output_rescale() const { return rescale_; }

  static double max_safe_dz_nm(const ComplexField& ref);

private:
  friend ComplexField fresnel_propagate(const ComplexField&, const PropagationPlan&);
  int n_;
  double pitch_nm_, wavelength_pm_, dz_nm_, rescale_;
  PropagationMethod method_;
};

/// Laguerre-Gauss mode LG_{p,ell} at its waist plane, unit total power.
ComplexField lg_mode(int ell, int p, double waist_nm, int grid_n, double pitch_nm,
                     double wavelength_pm);

/// Centered far-field transform. Output pitch is
/// lambda * camera_length / (n * pitch); total power is preserved.
ComplexField fraunhofer(const ComplexField& f, double camera_length_nm = 1e9);

/// Free-space propagation by plan.dz_nm. Phase carrier exp(ikz) is removed,
/// so the returned samples are the slowly varying envelope. Total power is
/// preserved to machine precision.
ComplexField fresnel_propagate(const ComplexField& f, const PropagationPlan& plan);

/// Zeroes the half plane on one side of the line through the grid center at
/// angle edge_azimuth (the blocked side is the one the azimuths
/// edge_azimuth .. edge_azimuth+pi sweep through, counterclockwise).
/// Samples exactly on the edge keep half their amplitude.
ComplexField apply_half_plane_block(const ComplexField& f, double edge_azimuth_rad);

/// Zeroes amplitude outside the disk of the given radius (grid-center default).
ComplexField apply_circular_aperture(const ComplexField& f, double radius_nm);
ComplexField apply_circular_aperture(const ComplexField& f, double radius_nm,
                                     double center_x_nm, double center_y_nm);

/// Rigid image rotation about the grid center by angle_rad (counterclockwise
/// positive), bilinear resampling.
ComplexField rotate_field(const ComplexField& f, double angle_rad);

/// Larmor image rotation by Omega * dz / v for an axial field B.
ComplexField apply_larmor_rotation(const ComplexField& f, double b_tesla, double dz_nm,
                                   double velocity_m_per_s);

/// The Larmor rotation angle Omega * dz / v in rad, signed with B.
double larmor_rotation_angle_rad(double b_tesla, double dz_nm, double velocity_m_per_s);

} // namespace evortex::waveopt

#endif
