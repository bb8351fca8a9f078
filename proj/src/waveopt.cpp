#include "evortex/waveopt.hpp"

#include "evortex/beamline.hpp"
#include "evortex/constants.hpp"
#include "evortex/errors.hpp"
#include "evortex/fft.hpp"
#include "evortex/io.hpp"

#include <cmath>

namespace evortex::waveopt {

using constants::pi;

std::string to_string(PropagationMethod m) {
  return m == PropagationMethod::angular_spectrum ? "angular_spectrum" : "fresnel_transfer";
}

double PropagationPlan::max_safe_dz_nm(const ComplexField& ref) {
  return ref.n * ref.pitch_nm * ref.pitch_nm / ref.wavelength_nm();
}

PropagationPlan::PropagationPlan(const ComplexField& ref, double dz_nm,
                                 PropagationMethod method, double output_rescale)
    : n_(ref.n), pitch_nm_(ref.pitch_nm), wavelength_pm_(ref.wavelength_pm), dz_nm_(dz_nm),
      rescale_(output_rescale), method_(method) {
  validate_grid(ref.n, ref.pitch_nm);
  if (!(ref.wavelength_pm > 0.0)) throw validation_error("field wavelength must be > 0");
  if (!(rescale_ > 0.0)) throw validation_error("output rescale must be > 0");
  if (rescale_ != 1.0 && method_ != PropagationMethod::fresnel_transfer)
    throw validation_error("output rescale requires the fresnel_transfer method");

  const double max_dz = max_safe_dz_nm(ref);
  const double effective_dz = std::abs(dz_nm_) / rescale_;
  if (effective_dz > max_dz)
    throw sampling_error("propagation step aliases the transfer function; maximum safe dz = " +
                         io::fmt_g9(max_dz * rescale_) + " nm for this grid");
  if (rescale_ != 1.0) {
    if (dz_nm_ == 0.0) throw validation_error("output rescale requires dz != 0");
    // chirp sampling: |1-M| * n * pitch^2 / (lambda * dz) <= 1
    const double chirp = std::abs(1.0 - rescale_) * ref.n * ref.pitch_nm * ref.pitch_nm /
                         (ref.wavelength_nm() * std::abs(dz_nm_));
    if (chirp > 1.0)
      throw sampling_error("rescale chirp aliases; minimum |dz| = " +
                           io::fmt_g9(std::abs(1.0 - rescale_) * max_dz) + " nm at this rescale");
  }
}

namespace {

double lgamma_int(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

// generalized Laguerre polynomial L_p^alpha(x) by upward recurrence
double laguerre(int p, int alpha, double x) {
  if (p == 0) return 1.0;
  double lm1 = 1.0;
  double l = 1.0 + alpha - x;
  for (int k = 1; k < p; ++k) {
    double lp1 = ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * lm1) / (k + 1.0);
    lm1 = l;
    l = lp1;
  }
  return l;
}

} // namespace

ComplexField lg_mode(int ell, int p, double waist_nm, int grid_n, double pitch_nm,
                     double wavelength_pm) {
  validate_grid(grid_n, pitch_nm);
  if (p < 0) throw validation_error("radial index p must be >= 0");
  if (!(waist_nm >= 4.0 * pitch_nm))
    throw validation_error("waist unresolvable: need waist >= 4 * pitch");
  const int a = std::abs(ell);
  const double rim_nm = waist_nm * std::sqrt(a / 2.0);
  const double half = grid_n / 2 * pitch_nm;
  if (rim_nm + (4.0 + 2.0 * p) * waist_nm > half)
    throw validation_error("waist unresolvable: mode ring exceeds the grid");

  ComplexField f(grid_n, pitch_nm, wavelength_pm, 0.0);
  // log of the radial normalization, evaluated with lgamma to survive large ell
  const double log_norm = 0.5 * (std::log(2.0) + lgamma_int(p) - std::log(pi) - lgamma_int(p + a)) -
                          std::log(waist_nm);
  const double w2 = waist_nm * waist_nm;
  for (int iy = 0; iy < grid_n; ++iy) {
    const double y = f.y_nm(iy);
    for (int ix = 0; ix < grid_n; ++ix) {
      const double x = f.x_nm(ix);
      const double r2 = x * x + y * y;
      if (r2 == 0.0 && a > 0) continue;
      const double u = 2.0 * r2 / w2;
      double log_amp = log_norm - r2 / w2;
      if (a > 0) log_amp += 0.5 * a * std::log(u);
      const double amp = std::exp(log_amp) * laguerre(p, a, u);
      const double phase = ell == 0 ? 0.0 : ell * std::atan2(y, x);
      f.at(ix, iy) = std::polar(amp, phase);
    }
  }
  f.normalize_power();
  return f;
}

ComplexField fraunhofer(const ComplexField& f, double camera_length_nm) {
  validate_grid(f.n, f.pitch_nm);
  if (!(f.wavelength_pm > 0.0)) throw validation_error("field wavelength must be > 0");
  if (!(camera_length_nm > 0.0)) throw validation_error("camera length must be > 0");
  const double pitch_out = f.wavelength_nm() * camera_length_nm / (f.n * f.pitch_nm);
  ComplexField out(f.n, pitch_out, f.wavelength_pm, camera_length_nm);
  out.samples = f.samples;
  detail::fftshift_inplace(out.samples.data(), f.n);
  detail::fft2_inplace(out.samples.data(), f.n, true);
  detail::fftshift_inplace(out.samples.data(), f.n);
  const double scale = f.pitch_nm / (f.n * pitch_out);
  for (auto& u : out.samples) u *= scale;
  return out;
}

ComplexField fresnel_propagate(const ComplexField& f, const PropagationPlan& plan) {
  if (plan.n_ != f.n || plan.pitch_nm_ != f.pitch_nm || plan.wavelength_pm_ != f.wavelength_pm)
    throw validation_error("propagation plan was built for a different grid");
  const int n = f.n;
  const double lambda = f.wavelength_nm();
  const double k = 2.0 * pi / lambda;
  const double rescale = plan.output_rescale();
  const double dz = plan.dz_nm();
  const double dz_eff = rescale == 1.0 ? dz : dz / rescale;

  ComplexField out(n, f.pitch_nm * rescale, f.wavelength_pm, f.z_nm + dz);
  out.samples = f.samples;

  if (rescale != 1.0) {
    // Fresnel scaling: chirp, propagate dz/M on the input grid, chirp again.
    const double c_in = pi * (1.0 - rescale) / (lambda * dz);
    for (int iy = 0; iy < n; ++iy) {
      const double y = f.y_nm(iy);
      for (int ix = 0; ix < n; ++ix) {
        const double x = f.x_nm(ix);
        out.at(ix, iy) *= std::polar(1.0, c_in * (x * x + y * y));
      }
    }
  }

  detail::fftshift_inplace(out.samples.data(), n);
  detail::fft2_inplace(out.samples.data(), n, true);

  const double dnu = 1.0 / (n * f.pitch_nm); // cycles/nm per Fourier sample
  const bool paraxial = plan.method() == PropagationMethod::fresnel_transfer;
  for (int iy = 0; iy < n; ++iy) {
    const int jy = iy < n / 2 ? iy : iy - n;
    const double ky = 2.0 * pi * jy * dnu;
    for (int ix = 0; ix < n; ++ix) {
      const int jx = ix < n / 2 ? ix : ix - n;
      const double kx = 2.0 * pi * jx * dnu;
      const double kr2 = kx * kx + ky * ky;
      std::complex<double> h;
      if (paraxial) {
        h = std::polar(1.0, -0.5 * kr2 / k * dz_eff);
      } else if (kr2 >= k * k) {
        h = 0.0; // evanescent
      } else {
        // kz - k computed cancellation-free
        const double kz_minus_k = -kr2 / (k + std::sqrt(k * k - kr2));
        h = std::polar(1.0, kz_minus_k * dz_eff);
      }
      out.samples[static_cast<std::size_t>(iy) * n + ix] *= h;
    }
  }

  detail::fft2_inplace(out.samples.data(), n, false);
  detail::fftshift_inplace(out.samples.data(), n);
  const double inv_n2 = 1.0 / (static_cast<double>(n) * n);
  for (auto& u : out.samples) u *= inv_n2;

  if (rescale != 1.0) {
    const double c_out = pi * rescale * (rescale - 1.0) / (lambda * dz);
    const double inv_m = 1.0 / rescale;
    for (int iy = 0; iy < n; ++iy) {
      const double y = f.y_nm(iy); // pre-magnification coordinate
      for (int ix = 0; ix < n; ++ix) {
        const double x = f.x_nm(ix);
        out.at(ix, iy) *= inv_m * std::polar(1.0, c_out * (x * x + y * y));
      }
    }
  }
  return out;
}

ComplexField apply_half_plane_block(const ComplexField& f, double edge_azimuth_rad) {
  ComplexField out = f;
  const double c = std::cos(edge_azimuth_rad);
  const double s = std::sin(edge_azimuth_rad);
  for (int iy = 0; iy < f.n; ++iy) {
    const double y = f.y_nm(iy);
    for (int ix = 0; ix < f.n; ++ix) {
      const double x = f.x_nm(ix);
      const double side = -x * s + y * c; // >0 on the blocked (CCW) side
      if (side > 0.0)
        out.at(ix, iy) = 0.0;
      else if (side == 0.0)
        out.at(ix, iy) *= 0.5;
    }
  }
  return out;
}

ComplexField apply_circular_aperture(const ComplexField& f, double radius_nm) {
  return apply_circular_aperture(f, radius_nm, 0.0, 0.0);
}

ComplexField apply_circular_aperture(const ComplexField& f, double radius_nm,
                                     double center_x_nm, double center_y_nm) {
  if (!(radius_nm > 0.0)) throw validation_error("aperture radius must be > 0");
  ComplexField out = f;
  const double r2 = radius_nm * radius_nm;
  for (int iy = 0; iy < f.n; ++iy) {
    const double dy = f.y_nm(iy) - center_y_nm;
    for (int ix = 0; ix < f.n; ++ix) {
      const double dx = f.x_nm(ix) - center_x_nm;
      if (dx * dx + dy * dy > r2) out.at(ix, iy) = 0.0;
    }
  }
  return out;
}

namespace {

// Keys cubic convolution kernel, a = -1/2 (Catmull-Rom)
inline double cubic_weight(double t) {
  t = std::abs(t);
  if (t <= 1.0) return ((1.5 * t - 2.5) * t) * t + 1.0;
  if (t < 2.0) return (((-0.5 * t + 2.5) * t) - 4.0) * t + 2.0;
  return 0.0;
}

std::complex<double> sample_bicubic(const ComplexField& f, double ix, double iy) {
  const int x0 = static_cast<int>(std::floor(ix));
  const int y0 = static_cast<int>(std::floor(iy));
  std::complex<double> acc{0.0, 0.0};
  for (int j = -1; j <= 2; ++j) {
    const int y = y0 + j;
    if (y < 0 || y >= f.n) continue;
    const double wy = cubic_weight(iy - y);
    if (wy == 0.0) continue;
    for (int i = -1; i <= 2; ++i) {
      const int x = x0 + i;
      if (x < 0 || x >= f.n) continue;
      const double wx = cubic_weight(ix - x);
      if (wx != 0.0) acc += f.at(x, y) * (wx * wy);
    }
  }
  return acc;
}

} // namespace

ComplexField rotate_field(const ComplexField& f, double angle_rad) {
  if (angle_rad == 0.0) return f;
  ComplexField out(f.n, f.pitch_nm, f.wavelength_pm, f.z_nm);
  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  const double half = f.n / 2;
  for (int iy = 0; iy < f.n; ++iy) {
    const double dy = iy - half;
    for (int ix = 0; ix < f.n; ++ix) {
      const double dx = ix - half;
      // inverse rotation into the source frame
      const double sx = c * dx + s * dy + half;
      const double sy = -s * dx + c * dy + half;
      out.at(ix, iy) = sample_bicubic(f, sx, sy);
    }
  }
  return out;
}

double larmor_rotation_angle_rad(double b_tesla, double dz_nm, double velocity_m_per_s) {
  if (!(velocity_m_per_s > 0.0)) throw validation_error("velocity must be > 0");
  return beamline::larmor_frequency_rad_per_s(b_tesla) * (dz_nm * 1e-9) / velocity_m_per_s;
}

ComplexField apply_larmor_rotation(const ComplexField& f, double b_tesla, double dz_nm,
                                   double velocity_m_per_s) {
  return rotate_field(f, larmor_rotation_angle_rad(b_tesla, dz_nm, velocity_m_per_s));
}

} // namespace evortex::waveopt
