// oam.hpp - OAM diagnostics and the knife-edge Gouy-rotation pipeline
#ifndef EVORTEX_OAM_HPP
#define EVORTEX_OAM_HPP

#include "evortex/beamline.hpp"
#include "evortex/field.hpp"
#include "evortex/hologram.hpp"

#include <optional>
#include <string>
#include <vector>

namespace evortex::oam {

/// Normalized power distribution over integer OAM quantum numbers.
struct OAMSpectrum {
  int ell_min = 0;
  int ell_max = 0;
  std::vector<double> power; // index ell - ell_min; sums to 1 (or all zero)
  bool range_warning = false; // requested range covers < 99% of the power

  double at(int ell) const {
    if (ell < ell_min || ell > ell_max) return 0.0;
    return power[static_cast<std::size_t>(ell - ell_min)];
  }
};

struct SpectrumOptions {
  int n_theta = 1024;       // azimuthal samples per ring
  int r_min_px = 2;         // innermost ring
  // explicit decomposition center in pixel coordinates; defaults to the
  // grid center after a centroid check
  std::optional<std::pair<double, double>> center_px;
};

/// Azimuthal Fourier decomposition on pixel-spaced rings.
OAMSpectrum oam_spectrum(const waveopt::ComplexField& f, int ell_min, int ell_max,
                         const SpectrumOptions& opts = {});

/// <L> = sum ell * P_ell in units of hbar.
double mean_oam(const OAMSpectrum& s);

/// Radius of maximal azimuthally averaged intensity, with parabolic sub-pixel
/// refinement. Throws validation_error for center-peaked (non-ring) fields.
double rim_radius_nm(const waveopt::ComplexField& f, int n_theta = 1024);

/// Operational Rayleigh range z_R = pi * r_rim^2 / (lambda * ell_ref).
double rayleigh_range_nm(double r_rim_nm, double wavelength_pm, int ell_ref = 1000);

struct SemiclassicalRotation {
  double larmor_rad = 0.0;
  double gouy_rad = 0.0;
  double total_rad = 0.0;
};

/// Rotation angle (eB/2m +- L*hbar/(m r^2)) * dz / v with both terms exposed.
/// sign couples vortex handedness to the lens-field direction; +1 means a
/// positive L adds to a positive-B Larmor rotation.
SemiclassicalRotation semiclassical_rotation(double l_hbar, double r_nm, double b_tesla,
                                             double dz_nm, double velocity_m_per_s,
                                             int sign = +1);

struct Annulus {
  double r_inner_nm = 0.0;
  double r_outer_nm = 0.0;
};

struct AnnulusRotation {
  Annulus annulus;
  double delta_theta_rad = 0.0;
  double power_fraction = 0.0; // of the 'before' field's total power
  bool excluded = false;       // below the power threshold
};

struct RotationMeasurement {
  std::vector<AnnulusRotation> annuli;
  double z_over_zr = 0.0;
  double larmor_component_rad = 0.0; // outermost annulus
  double gouy_component_rad = 0.0;   // inner mean minus larmor
  bool larmor_reference_excluded = false;
};

struct MeasureOptions {
  int n_theta = 1024;
  double power_exclude_fraction = 0.01;
};

/// Cross-correlates azimuthal intensity profiles of the two fields on each
/// annulus. delta_theta > 0 means 'after' is rotated counterclockwise with
/// respect to 'before'. The outermost annulus provides the Larmor estimate.
RotationMeasurement measure_rotation(const waveopt::ComplexField& before,
                                     const waveopt::ComplexField& after,
                                     const std::vector<Annulus>& annuli,
                                     double z_over_zr = 0.0,
                                     const MeasureOptions& opts = {});

/// Annuli used by the rotation pipeline: three rings straddling the rim plus
/// the far-field Larmor reference at r > 0.8 * half-extent.
std::vector<Annulus> default_annuli(double rim_nm, const waveopt::ComplexField& f);

/// Geometry of the knife-edge measurement, in units of the Eq.-style
/// operational z_R computed from each beam's rim radius.
struct GouyGeometry {
  double aperture_z_over_zr = 0.5;
  double analysis_z_over_zr = 2.0;
  beamline::BeamParams beam;
  int grid_n = 2048;
  double pitch_nm = 0.0;
  double waist_nm = 0.0;          // LG beam model
  double edge_azimuth_rad = 0.0;
  double lens_field_tesla = 0.0;  // Larmor rotation when nonzero
  int ell_ref = 1000;
  // realistic beam model: first diffraction order of this hologram
  std::optional<hologram::HologramSpec> hologram_spec;
  double v_mip_volt = 10.0;       // used only with hologram_spec
};

struct CurveEntry {
  int ell = 0;
  double rotation_rad = 0.0;
  double z_over_zr = 0.0;
  std::string method; // "lg" or "hologram"
  bool ok = true;
  std::string error;
};

struct GouyRun {
  waveopt::ComplexField before; // aperture plane, right after the knife edge
  waveopt::ComplexField after;  // analysis plane
  RotationMeasurement measurement;
  double rim_nm = 0.0;
  double z_r_nm = 0.0;
  double dz_nm = 0.0; // aperture plane to analysis plane
};

/// Runs the full knife-edge pipeline for one ell and returns the fields and
/// the measurement. Throws sampling_error on propagation-plan failure.
GouyRun run_gouy_pipeline(int ell, const GouyGeometry& geom);

/// Rotation (gouy component) as a function of ell; entries with failed
/// propagation plans are marked not-ok instead of aborting the table.
std::vector<CurveEntry> rotation_curve(const std::vector<int>& ells, const GouyGeometry& geom);

struct FitOptions {
  double sigma_theta_rad = 3.14159265358979323846 / 1024.0; // half an azimuthal bin
};

struct FitResult {
  double l_hat = 0.0;
  double sigma = 0.0;
  double residual_rad = 0.0;
};

/// Monotone (PCHIP) interpolation of the inverse rotation curve. Throws
/// fit_domain_error when the measurement lies outside the curve's hull.
FitResult fit_mean_oam(double measured_rotation_rad, const std::vector<CurveEntry>& curve,
                       const FitOptions& opts = {});

struct OrderEfficiency {
  int order = 0;
  double power_fraction = 0.0; // of total transmitted power
};

struct OrderBoxOptions {
  int max_order = 5;
  double box_height_factor = 4.0; // box height = factor * separation / 2
};

/// Integrates far-field intensity in disjoint boxes centered on the
/// diffraction orders m * k_carrier along the carrier direction. The field
/// must come from fraunhofer() (its z tag is the camera length).
std::vector<OrderEfficiency> diffraction_order_efficiencies(
    const waveopt::ComplexField& farfield, double carrier_direction_rad,
    double k_carrier_rad_per_nm, const OrderBoxOptions& opts = {});

} // namespace evortex::oam

#endif
