// hologram.hpp - pitchfork hologram synthesis and analysis
#ifndef EVORTEX_HOLOGRAM_HPP
#define EVORTEX_HOLOGRAM_HPP

#include "evortex/beamline.hpp"
#include "evortex/field.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace evortex::hologram {

enum class GrooveProfile { rectangular, sinusoidal, blazed };
enum class ExclusionMode { open, blocked };

std::string to_string(GrooveProfile p);
GrooveProfile groove_profile_from_string(const std::string& s);
std::string to_string(ExclusionMode m);
ExclusionMode exclusion_mode_from_string(const std::string& s);

/// Complete geometric/physical description of an off-axis pitchfork hologram.
/// The carrier runs along +x; theta is measured from the carrier direction.
struct HologramSpec {
  int ell = 0;                        // topological charge, may be negative
  double carrier_period_nm = 0.0;     // d_c = 2*pi / k_carrier
  double pattern_radius_um = 0.0;     // outer radius of the patterned disk
  double exclusion_radius_um = 0.0;   // central unpatterned hole
  double duty = 0.5;                  // thick-level fraction of one period
  GrooveProfile profile = GrooveProfile::rectangular;
  double phase_depth_rad = 3.14159265358979323846;
  double pixel_pitch_nm = 0.0;
  ExclusionMode exclusion_mode = ExclusionMode::open;

  double carrier_k_rad_per_nm() const;
  double pattern_radius_nm() const { return pattern_radius_um * 1e3; }
  double exclusion_radius_nm() const { return exclusion_radius_um * 1e3; }
  int levels() const { return profile == GrooveProfile::rectangular ? 2 : 256; }

  /// Throws validation_error naming the violated field.
  void validate() const;

  /// Key/value serialization for sidecar metadata and config echoes.
  std::vector<std::pair<std::string, std::string>> to_kv() const;
};

/// Grating phase f(rho,theta) = ell*theta + rho*k_carrier*cos(theta).
double grating_phase(double rho_nm, double theta_rad, const HologramSpec& spec);

/// Thickness as a fraction of t0 in [0,1] for the spec's groove profile.
/// Rectangular thresholds sin(f) against cos(pi*duty), which reduces to the
/// sign function at duty 0.5.
double thickness_profile(double rho_nm, double theta_rad, const HologramSpec& spec);

/// Local separation between hologram lines, d = pi/|grad f|, in nm.
/// Returns +infinity at the stationary point of f.
double local_line_spacing_nm(double rho_nm, double theta_rad, const HologramSpec& spec);

enum class StationaryClass { saddle, minimum, maximum, degenerate };

struct StationaryPoint {
  double rho_nm = 0.0;
  double theta_rad = 0.0;
  StationaryClass classification = StationaryClass::degenerate;
};

/// Locates the stationary point of f analytically at (|ell|/k, sign(ell)*pi/2),
/// confirms it with a Newton root-find on grad f, and classifies it from the
/// Cartesian Hessian.
StationaryPoint find_stationary_point(const HologramSpec& spec);

/// Rasterized thickness-level pattern. Pixel (ix,iy) is centered at
/// x = (ix - (width-1)/2) * pitch, y = ((height-1)/2 - iy) * pitch,
/// so row 0 is the +y edge.
struct PatternBitmap {
  int width = 0;
  int height = 0;
  double pixel_pitch_nm = 0.0;
  int levels = 2;
  std::vector<std::uint8_t> data; // row-major level indices

  std::uint8_t at(int ix, int iy) const {
    return data[static_cast<std::size_t>(iy) * width + ix];
  }
  double origin_x_px() const { return (width - 1) / 2.0; }
  double origin_y_px() const { return (height - 1) / 2.0; }
};

struct RasterOptions {
  int tile_size_px = 4096; // tiles are tile_size x tile_size pixels
  int threads = 0;         // 0 = thread_count()
};

/// Pattern side length in pixels: ceil(2R / pixel_pitch).
int raster_side_px(const HologramSpec& spec);

/// Rasterizes the full pattern into memory. Deterministic: identical specs
/// yield byte-identical bitmaps regardless of tile size or thread count.
PatternBitmap rasterize(const HologramSpec& spec, const RasterOptions& opts = {});

/// Streaming rasterization: rows are produced top to bottom in bands whose
/// memory stays within one tile budget; emit(y, row) is called once per row.
void rasterize_stream(const HologramSpec& spec, const RasterOptions& opts,
                      const std::function<void(int, const std::uint8_t*)>& emit);

struct SpacingSample {
  double rho_nm = 0.0;
  double theta_rad = 0.0;
  double spacing_nm = 0.0;
  double line_width_nm = 0.0;
};

struct FabricabilityOptions {
  int n_rho = 96;
  int n_theta = 256;
  double hist_bin_nm = 5.0;
  double hist_max_nm = 500.0;
};

/// Line-spacing statistics over the patterned annulus. Line width is
/// duty * spacing. Fractions are area-weighted.
struct FabricabilityReport {
  double min_local_spacing_nm = 0.0;
  double min_line_width_nm = 0.0;
  double violating_area_fraction = 0.0;
  double hist_bin_nm = 5.0;
  std::vector<double> spacing_hist;      // area fraction per bin
  double spacing_hist_overflow = 0.0;    // area fraction beyond hist_max
  std::vector<SpacingSample> samples;
};

FabricabilityReport fabricability_report(const HologramSpec& spec, double min_feature_nm,
                                         const FabricabilityOptions& opts = {});

/// Thickness t0 that yields the requested peak-to-trough phase depth.
double t0_for_phase_depth_nm(double phase_depth_rad, const beamline::BeamParams& beam,
                             double v_mip_volt);

/// Exit wave of a plane wave through the hologram: amplitude 1 on the
/// patterned annulus (and in the exclusion hole when it is open), 0 outside;
/// phase C_E * V_mip * t0 * thickness_profile.
waveopt::ComplexField transmission_function(const HologramSpec& spec,
                                            const beamline::BeamParams& beam,
                                            double v_mip_volt, double t0_nm,
                                            int grid_n, double field_pitch_nm);

} // namespace evortex::hologram

#endif
