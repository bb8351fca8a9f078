#include "evortex/hologram.hpp"

#include "evortex/constants.hpp"
#include "evortex/errors.hpp"
#include "evortex/io.hpp"
#include "evortex/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evortex::hologram {

using constants::pi;

std::string to_string(GrooveProfile p) {
  switch (p) {
    case GrooveProfile::rectangular: return "rectangular";
    case GrooveProfile::sinusoidal: return "sinusoidal";
    case GrooveProfile::blazed: return "blazed";
  }
  return "rectangular";
}

GrooveProfile groove_profile_from_string(const std::string& s) {
  if (s == "rectangular") return GrooveProfile::rectangular;
  if (s == "sinusoidal") return GrooveProfile::sinusoidal;
  if (s == "blazed") return GrooveProfile::blazed;
  throw validation_error("unknown groove profile '" + s + "'");
}

std::string to_string(ExclusionMode m) {
  return m == ExclusionMode::open ? "open" : "blocked";
}

ExclusionMode exclusion_mode_from_string(const std::string& s) {
  if (s == "open") return ExclusionMode::open;
  if (s == "blocked") return ExclusionMode::blocked;
  throw validation_error("unknown exclusion mode '" + s + "'");
}

double HologramSpec::carrier_k_rad_per_nm() const { return 2.0 * pi / carrier_period_nm; }

void HologramSpec::validate() const {
  if (!(carrier_period_nm > 0.0)) throw validation_error("carrier_period must be > 0");
  if (!(pattern_radius_um > 0.0)) throw validation_error("pattern_radius must be > 0");
  if (exclusion_radius_um < 0.0) throw validation_error("exclusion_radius must be >= 0");
  if (!(exclusion_radius_um < pattern_radius_um))
    throw validation_error("exclusion_radius must be smaller than pattern_radius");
  if (!(pixel_pitch_nm > 0.0)) throw validation_error("pixel_pitch must be > 0");
  if (!(pixel_pitch_nm < carrier_period_nm / 4.0))
    throw validation_error("pixel_pitch must be < carrier_period/4 (Nyquist margin)");
  if (!(duty > 0.0 && duty < 1.0)) throw validation_error("duty must lie in (0,1)");
  if (!(phase_depth_rad > 0.0 && phase_depth_rad <= 2.0 * pi))
    throw validation_error("phase_depth must lie in (0, 2*pi]");
}

std::vector<std::pair<std::string, std::string>> HologramSpec::to_kv() const {
  return {
      {"ell", std::to_string(ell)},
      {"carrier_period_nm", io::fmt_g9(carrier_period_nm)},
      {"pattern_radius_um", io::fmt_g9(pattern_radius_um)},
      {"exclusion_radius_um", io::fmt_g9(exclusion_radius_um)},
      {"duty", io::fmt_g9(duty)},
      {"profile", to_string(profile)},
      {"phase_depth_rad", io::fmt_g9(phase_depth_rad)},
      {"pixel_pitch_nm", io::fmt_g9(pixel_pitch_nm)},
      {"exclusion_mode", to_string(exclusion_mode)},
  };
}

double grating_phase(double rho_nm, double theta_rad, const HologramSpec& spec) {
  return spec.ell * theta_rad + rho_nm * spec.carrier_k_rad_per_nm() * std::cos(theta_rad);
}

namespace {

// profile value from the already-evaluated grating phase
double profile_value(double f, const HologramSpec& spec) {
  switch (spec.profile) {
    case GrooveProfile::rectangular: {
      const double threshold = std::cos(pi * spec.duty);
      const double s = std::sin(f);
      if (s > threshold) return 1.0;
      if (s < threshold) return 0.0;
      return 0.5;
    }
    case GrooveProfile::sinusoidal:
      return 0.5 * (1.0 + std::sin(f));
    case GrooveProfile::blazed: {
      double frac = std::fmod(f, 2.0 * pi);
      if (frac < 0.0) frac += 2.0 * pi;
      return frac / (2.0 * pi);
    }
  }
  return 0.0;
}

} // namespace

double thickness_profile(double rho_nm, double theta_rad, const HologramSpec& spec) {
  return profile_value(grating_phase(rho_nm, theta_rad, spec), spec);
}

double local_line_spacing_nm(double rho_nm, double theta_rad, const HologramSpec& spec) {
  if (!(rho_nm > 0.0))
    throw validation_error("local_line_spacing undefined at rho = 0 (azimuthal gradient singular)");
  const double k = spec.carrier_k_rad_per_nm();
  const double dr = k * std::cos(theta_rad);
  const double dt = (spec.ell - rho_nm * k * std::sin(theta_rad)) / rho_nm;
  const double grad = std::sqrt(dr * dr + dt * dt);
  // a gradient this far below the carrier frequency is float noise at the
  // stationary point; report the spacing there as infinite
  if (grad < 1e-12 * k) return std::numeric_limits<double>::infinity();
  return pi / grad;
}

StationaryPoint find_stationary_point(const HologramSpec& spec) {
  spec.validate();
  if (spec.ell == 0) throw validation_error("no stationary point exists for ell = 0");
  const double k = spec.carrier_k_rad_per_nm();
  const double rho_star = std::abs(spec.ell) / k;
  const double theta_star = spec.ell > 0 ? pi / 2.0 : -pi / 2.0;

  // Newton root-find on grad f in Cartesian coordinates from the analytic seed.
  const double ell = spec.ell;
  double x = rho_star * std::cos(theta_star);
  double y = rho_star * std::sin(theta_star);
  for (int it = 0; it < 32; ++it) {
    const double r2 = x * x + y * y;
    const double gx = k - ell * y / r2;
    const double gy = ell * x / r2;
    const double r4 = r2 * r2;
    const double hxx = 2.0 * ell * x * y / r4;
    const double hxy = ell * (y * y - x * x) / r4;
    const double hyy = -2.0 * ell * x * y / r4;
    const double det = hxx * hyy - hxy * hxy;
    if (det == 0.0) break;
    const double dx = -(hyy * gx - hxy * gy) / det;
    const double dy = -(-hxy * gx + hxx * gy) / det;
    x += dx;
    y += dy;
    if (std::abs(dx) + std::abs(dy) < 1e-12 * rho_star) break;
  }
  const double xs = rho_star * std::cos(theta_star);
  const double ys = rho_star * std::sin(theta_star);
  if (std::hypot(x - xs, y - ys) > spec.pixel_pitch_nm)
    throw sampling_error("stationary-point verification drifted beyond one pixel pitch");

  const double r2 = x * x + y * y;
  const double r4 = r2 * r2;
  const double hxx = 2.0 * ell * x * y / r4;
  const double hxy = ell * (y * y - x * x) / r4;
  const double hyy = -2.0 * ell * x * y / r4;
  const double det = hxx * hyy - hxy * hxy;
  StationaryPoint p;
  p.rho_nm = rho_star;
  p.theta_rad = theta_star;
  if (det < 0.0)
    p.classification = StationaryClass::saddle;
  else if (det > 0.0)
    p.classification = hxx + hyy > 0.0 ? StationaryClass::minimum : StationaryClass::maximum;
  else
    p.classification = StationaryClass::degenerate;
  return p;
}

int raster_side_px(const HologramSpec& spec) {
  return static_cast<int>(std::ceil(2.0 * spec.pattern_radius_nm() / spec.pixel_pitch_nm));
}

namespace {

// one raster row: pixel centers at x = (ix - (w-1)/2) * pitch, y fixed
void raster_row(const HologramSpec& spec, int width, double y_nm, std::uint8_t* row) {
  const double pitch = spec.pixel_pitch_nm;
  const double cx = (width - 1) / 2.0;
  const double r_out2 = spec.pattern_radius_nm() * spec.pattern_radius_nm();
  const double r_in2 = spec.exclusion_radius_nm() * spec.exclusion_radius_nm();
  const double k = spec.carrier_k_rad_per_nm();
  const double y2 = y_nm * y_nm;
  const int max_level = spec.levels() - 1;
  const bool rect = spec.profile == GrooveProfile::rectangular;
  const double threshold = std::cos(pi * spec.duty);
  const double ell = spec.ell;
  for (int ix = 0; ix < width; ++ix) {
    const double x = (ix - cx) * pitch;
    const double r2 = x * x + y2;
    if (r2 > r_out2 || r2 < r_in2) {
      row[ix] = 0;
      continue;
    }
    const double f = ell * std::atan2(y_nm, x) + k * x;
    if (rect) {
      const double s = std::sin(f);
      row[ix] = s > threshold ? 1 : (s < threshold ? 0 : 1); // ties round up
    } else {
      row[ix] = static_cast<std::uint8_t>(std::lround(profile_value(f, spec) * max_level));
    }
  }
}

int band_rows_for(const RasterOptions& opts, int width, int height) {
  if (opts.tile_size_px < 1) throw validation_error("tile size must be >= 1");
  const std::int64_t budget =
      static_cast<std::int64_t>(opts.tile_size_px) * opts.tile_size_px;
  if (budget < width)
    throw validation_error("tile budget smaller than one pattern row");
  return static_cast<int>(std::min<std::int64_t>(height, budget / width));
}

} // namespace

void rasterize_stream(const HologramSpec& spec, const RasterOptions& opts,
                      const std::function<void(int, const std::uint8_t*)>& emit) {
  spec.validate();
  const int side = raster_side_px(spec);
  const int band_rows = band_rows_for(opts, side, side);
  const double cy = (side - 1) / 2.0;
  std::vector<std::uint8_t> band(static_cast<std::size_t>(band_rows) * side);
  for (int y0 = 0; y0 < side; y0 += band_rows) {
    const int y1 = std::min(side, y0 + band_rows);
    parallel_for(
        y0, y1,
        [&](std::int64_t lo, std::int64_t hi) {
          for (std::int64_t iy = lo; iy < hi; ++iy) {
            const double y_nm = (cy - static_cast<double>(iy)) * spec.pixel_pitch_nm;
            raster_row(spec, side, y_nm, band.data() + (iy - y0) * side);
          }
        },
        opts.threads);
    for (int iy = y0; iy < y1; ++iy)
      emit(iy, band.data() + static_cast<std::size_t>(iy - y0) * side);
  }
}

PatternBitmap rasterize(const HologramSpec& spec, const RasterOptions& opts) {
  spec.validate();
  const int side = raster_side_px(spec);
  PatternBitmap bm;
  bm.width = bm.height = side;
  bm.pixel_pitch_nm = spec.pixel_pitch_nm;
  bm.levels = spec.levels();
  bm.data.resize(static_cast<std::size_t>(side) * side);
  rasterize_stream(spec, opts, [&](int iy, const std::uint8_t* row) {
    std::copy(row, row + side, bm.data.begin() + static_cast<std::size_t>(iy) * side);
  });
  return bm;
}

FabricabilityReport fabricability_report(const HologramSpec& spec, double min_feature_nm,
                                         const FabricabilityOptions& opts) {
  spec.validate();
  if (min_feature_nm < 0.0) throw validation_error("min_feature must be >= 0");
  FabricabilityReport rep;
  rep.hist_bin_nm = opts.hist_bin_nm;
  const int nbins = static_cast<int>(std::ceil(opts.hist_max_nm / opts.hist_bin_nm));
  rep.spacing_hist.assign(nbins, 0.0);
  rep.min_local_spacing_nm = std::numeric_limits<double>::infinity();

  const double r0 = spec.exclusion_radius_nm();
  const double r1 = spec.pattern_radius_nm();
  const double drho = (r1 - r0) / opts.n_rho;
  const double dtheta = 2.0 * pi / opts.n_theta;
  double total_weight = 0.0;
  double violating_weight = 0.0;
  rep.samples.reserve(static_cast<std::size_t>(opts.n_rho) * opts.n_theta);
  for (int i = 0; i < opts.n_rho; ++i) {
    const double rho = r0 + (i + 0.5) * drho;
    for (int j = 0; j < opts.n_theta; ++j) {
      const double theta = (j + 0.5) * dtheta;
      const double d = local_line_spacing_nm(rho, theta, spec);
      const double lw = spec.duty * d;
      rep.samples.push_back({rho, theta, d, lw});
      const double wgt = rho; // polar area element
      total_weight += wgt;
      if (lw < min_feature_nm) violating_weight += wgt;
      if (d < rep.min_local_spacing_nm) rep.min_local_spacing_nm = d;
      const int bin = std::isfinite(d) ? static_cast<int>(d / opts.hist_bin_nm) : nbins;
      if (bin < nbins)
        rep.spacing_hist[bin] += wgt;
      else
        rep.spacing_hist_overflow += wgt;
    }
  }
  rep.min_line_width_nm = spec.duty * rep.min_local_spacing_nm;
  if (total_weight > 0.0) {
    rep.violating_area_fraction = violating_weight / total_weight;
    for (auto& b : rep.spacing_hist) b /= total_weight;
    rep.spacing_hist_overflow /= total_weight;
  }
  return rep;
}

double t0_for_phase_depth_nm(double phase_depth_rad, const beamline::BeamParams& beam,
                             double v_mip_volt) {
  if (!(v_mip_volt > 0.0)) throw validation_error("V_mip must be > 0");
  return phase_depth_rad / (beam.interaction_constant_rad_per_v_nm * v_mip_volt);
}

waveopt::ComplexField transmission_function(const HologramSpec& spec,
                                            const beamline::BeamParams& beam,
                                            double v_mip_volt, double t0_nm,
                                            int grid_n, double field_pitch_nm) {
  spec.validate();
  waveopt::validate_grid(grid_n, field_pitch_nm);
  if (grid_n * field_pitch_nm < 2.0 * spec.pattern_radius_nm())
    throw validation_error("grid too small to contain pattern");
  if (t0_nm < 0.0) throw validation_error("t0 must be >= 0");

  const double phase_scale = beam.interaction_constant_rad_per_v_nm * v_mip_volt * t0_nm;
  const double r_out2 = spec.pattern_radius_nm() * spec.pattern_radius_nm();
  const double r_in2 = spec.exclusion_radius_nm() * spec.exclusion_radius_nm();
  const bool hole_open = spec.exclusion_mode == ExclusionMode::open;
  const double k = spec.carrier_k_rad_per_nm();

  waveopt::ComplexField f(grid_n, field_pitch_nm, beam.wavelength_pm, 0.0);
  parallel_for(0, grid_n, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t iy = lo; iy < hi; ++iy) {
      const double y = f.y_nm(static_cast<int>(iy));
      for (int ix = 0; ix < grid_n; ++ix) {
        const double x = f.x_nm(ix);
        const double r2 = x * x + y * y;
        if (r2 > r_out2) continue;
        if (r2 < r_in2) {
          if (hole_open) f.at(ix, static_cast<int>(iy)) = 1.0;
          continue;
        }
        const double ph = phase_scale * profile_value(spec.ell * std::atan2(y, x) + k * x, spec);
        f.at(ix, static_cast<int>(iy)) = std::polar(1.0, ph);
      }
    }
  });
  return f;
}

} // namespace evortex::hologram
