#include "evortex/oam.hpp"

#include "evortex/constants.hpp"
#include "evortex/errors.hpp"
#include "evortex/fft.hpp"
#include "evortex/io.hpp"
#include "evortex/waveopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evortex::oam {

using constants::pi;
using waveopt::ComplexField;

namespace {

std::vector<double> intensity_grid(const ComplexField& f) {
  std::vector<double> out(f.samples.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::norm(f.samples[i]);
  return out;
}

double bilinear_real(const std::vector<double>& grid, int n, double ix, double iy) {
  const int x0 = static_cast<int>(std::floor(ix));
  const int y0 = static_cast<int>(std::floor(iy));
  const double fx = ix - x0;
  const double fy = iy - y0;
  auto val = [&](int x, int y) -> double {
    if (x < 0 || x >= n || y < 0 || y >= n) return 0.0;
    return grid[static_cast<std::size_t>(y) * n + x];
  };
  return val(x0, y0) * ((1 - fx) * (1 - fy)) + val(x0 + 1, y0) * (fx * (1 - fy)) +
         val(x0, y0 + 1) * ((1 - fx) * fy) + val(x0 + 1, y0 + 1) * (fx * fy);
}

// e^{-2*pi*i*m/n} table with exact conjugate symmetry table[n-m] == conj(table[m])
std::vector<std::complex<double>> phasor_table(int n) {
  std::vector<std::complex<double>> t(n);
  for (int m = 0; m <= n / 2; ++m) t[m] = std::polar(1.0, -2.0 * pi * m / n);
  for (int m = n / 2 + 1; m < n; ++m) t[m] = std::conj(t[n - m]);
  return t;
}

void check_centered(const ComplexField& f) {
  double sx = 0.0, sy = 0.0, s = 0.0;
  for (int iy = 0; iy < f.n; ++iy)
    for (int ix = 0; ix < f.n; ++ix) {
      const double w = std::norm(f.at(ix, iy));
      sx += w * ix;
      sy += w * iy;
      s += w;
    }
  if (s <= 0.0) return;
  const double cx = sx / s - f.n / 2;
  const double cy = sy / s - f.n / 2;
  if (std::hypot(cx, cy) > 1.0)
    throw validation_error("field is not centered (intensity centroid off by > 1 pixel); "
                           "supply an explicit center");
}

// azimuthally averaged intensity per pixel-spaced ring about (cx, cy)
std::vector<double> ring_average(const std::vector<double>& intensity, int n, double cx,
                                 double cy, int j_min, int j_max, int n_theta) {
  std::vector<double> avg(static_cast<std::size_t>(j_max + 1), 0.0);
  for (int j = j_min; j <= j_max; ++j) {
    double acc = 0.0;
    for (int t = 0; t < n_theta; ++t) {
      const double th = 2.0 * pi * t / n_theta;
      acc += bilinear_real(intensity, n, cx + j * std::cos(th), cy + j * std::sin(th));
    }
    avg[static_cast<std::size_t>(j)] = acc / n_theta;
  }
  return avg;
}

} // namespace

OAMSpectrum oam_spectrum(const ComplexField& f, int ell_min, int ell_max,
                         const SpectrumOptions& opts) {
  if (ell_min > ell_max) throw validation_error("ell_min must be <= ell_max");
  if (opts.n_theta < 8) throw validation_error("n_theta too small");
  const int half_bins = opts.n_theta / 2;
  if (std::max(std::abs(ell_min), std::abs(ell_max)) >= half_bins)
    throw validation_error("requested ell range exceeds the azimuthal sampling (raise n_theta)");
  double cx = f.n / 2, cy = f.n / 2;
  if (opts.center_px) {
    cx = opts.center_px->first;
    cy = opts.center_px->second;
  } else {
    check_centered(f);
  }

  const int n_theta = opts.n_theta;
  const auto table = phasor_table(n_theta);
  const int j_max = f.n / 2 - 2;
  const int n_ells = ell_max - ell_min + 1;
  std::vector<double> power(static_cast<std::size_t>(n_ells), 0.0);
  double total_all = 0.0;

  std::vector<std::complex<double>> ring(static_cast<std::size_t>(n_theta));
  for (int j = opts.r_min_px; j <= j_max; ++j) {
    double ring_power = 0.0;
    for (int t = 0; t < n_theta; ++t) {
      const double th = 2.0 * pi * t / n_theta;
      ring[t] = f.sample_bilinear(cx + j * std::cos(th), cy + j * std::sin(th));
      ring_power += std::norm(ring[t]);
    }
    const double rho_w = static_cast<double>(j); // rho * drho in pixel units
    total_all += rho_w * ring_power / n_theta;   // Parseval over all harmonics
    for (int e = 0; e < n_ells; ++e) {
      const int ell = ell_min + e;
      std::complex<double> a{0.0, 0.0};
      for (int t = 0; t < n_theta; ++t) {
        const int idx = static_cast<int>((static_cast<long long>(ell) * t % n_theta + n_theta) %
                                         n_theta);
        a += ring[t] * table[idx];
      }
      a /= static_cast<double>(n_theta);
      power[e] += std::norm(a) * rho_w;
    }
  }

  OAMSpectrum s;
  s.ell_min = ell_min;
  s.ell_max = ell_max;
  s.power = std::move(power);
  const double in_range = std::accumulate(s.power.begin(), s.power.end(), 0.0);
  if (in_range > 0.0) {
    for (auto& p : s.power) p /= in_range;
    s.range_warning = total_all > 0.0 && in_range < 0.99 * total_all;
  }
  return s;
}

double mean_oam(const OAMSpectrum& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.power.size(); ++i)
    acc += (s.ell_min + static_cast<double>(i)) * s.power[i];
  return acc;
}

double rim_radius_nm(const ComplexField& f, int n_theta) {
  const auto intensity = intensity_grid(f);
  const double c = f.n / 2;
  const int j_max = f.n / 2 - 2;
  const auto avg = ring_average(intensity, f.n, c, c, 1, j_max, n_theta);
  int best = 1;
  for (int j = 2; j <= j_max; ++j)
    if (avg[j] > avg[best]) best = j;
  const double center_val = bilinear_real(intensity, f.n, c, c);
  if (best <= 1 || avg[best] <= center_val)
    throw validation_error("field is not ring-shaped (intensity maximum at center)");
  double refined = best;
  if (best < j_max) {
    const double den = avg[best - 1] - 2.0 * avg[best] + avg[best + 1];
    if (den < 0.0) refined = best + 0.5 * (avg[best - 1] - avg[best + 1]) / den;
  }
  return refined * f.pitch_nm;
}

double rayleigh_range_nm(double r_rim_nm, double wavelength_pm, int ell_ref) {
  if (!(r_rim_nm > 0.0)) throw validation_error("rim radius must be > 0");
  if (!(wavelength_pm > 0.0)) throw validation_error("wavelength must be > 0");
  if (ell_ref <= 0) throw validation_error("ell_ref must be > 0");
  return pi * r_rim_nm * r_rim_nm / (wavelength_pm * 1e-3 * ell_ref);
}

SemiclassicalRotation semiclassical_rotation(double l_hbar, double r_nm, double b_tesla,
                                             double dz_nm, double velocity_m_per_s, int sign) {
  if (!(r_nm > 0.0)) throw validation_error("semiclassical radius must be > 0");
  if (!(velocity_m_per_s > 0.0)) throw validation_error("velocity must be > 0");
  const double dt = dz_nm * 1e-9 / velocity_m_per_s; // traversal time, s
  SemiclassicalRotation rot;
  rot.larmor_rad = beamline::larmor_frequency_rad_per_s(b_tesla) * dt;
  const double r_m = r_nm * 1e-9;
  rot.gouy_rad = (sign >= 0 ? 1.0 : -1.0) * l_hbar * constants::hbar_j_s /
                 (constants::electron_mass_kg * r_m * r_m) * dt;
  rot.total_rad = rot.larmor_rad + rot.gouy_rad;
  return rot;
}

namespace {

// azimuthal intensity profile summed with rho weights over the annulus rings;
// returns the annulus power estimate alongside
std::pair<std::vector<double>, double> annulus_profile(const std::vector<double>& intensity,
                                                       const ComplexField& f, const Annulus& a,
                                                       int n_theta) {
  const double c = f.n / 2;
  const int j0 = std::max(1, static_cast<int>(std::ceil(a.r_inner_nm / f.pitch_nm)));
  const int j1 = std::min(f.n / 2 - 2, static_cast<int>(std::floor(a.r_outer_nm / f.pitch_nm)));
  std::vector<double> prof(static_cast<std::size_t>(n_theta), 0.0);
  for (int j = j0; j <= j1; ++j) {
    for (int t = 0; t < n_theta; ++t) {
      const double th = 2.0 * pi * t / n_theta;
      prof[t] += j * bilinear_real(intensity, f.n, c + j * std::cos(th), c + j * std::sin(th));
    }
  }
  // power = sum rho |u|^2 drho dtheta with rho and drho in pitch units
  double power = 0.0;
  for (double v : prof) power += v;
  power *= (2.0 * pi / n_theta) * f.pitch_nm * f.pitch_nm;
  return {std::move(prof), power};
}

// circular cross-correlation peak of b against a with band-limited refinement;
// returns the shift in bins such that a(t) ~ b(t - shift)
double correlation_shift_bins(const std::vector<double>& before, const std::vector<double>& after) {
  const int n = static_cast<int>(before.size());
  std::vector<std::complex<double>> bf(before.begin(), before.end());
  std::vector<std::complex<double>> af(after.begin(), after.end());
  detail::fft1_inplace(bf.data(), n, true);
  detail::fft1_inplace(af.data(), n, true);
  std::vector<std::complex<double>> cf(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) cf[k] = std::conj(bf[k]) * af[k];

  // integer-lag correlation via inverse transform
  std::vector<std::complex<double>> c = cf;
  detail::fft1_inplace(c.data(), n, false);
  int s0 = 0;
  double best = c[0].real();
  for (int s = 1; s < n; ++s)
    if (c[s].real() > best) {
      best = c[s].real();
      s0 = s;
    }
  if (s0 >= n / 2) s0 -= n;

  // band-limited evaluation of C at fractional lags
  auto eval = [&](double s) {
    double acc = cf[0].real();
    for (int k = 1; k < n / 2; ++k) {
      const double ang = 2.0 * pi * k * s / n;
      acc += 2.0 * (cf[k].real() * std::cos(ang) - cf[k].imag() * std::sin(ang));
    }
    acc += cf[n / 2].real() * std::cos(pi * s);
    return acc;
  };
  const int steps = 64;
  double s_best = s0;
  double v_best = eval(s0);
  for (int i = -steps; i <= steps; ++i) {
    const double s = s0 + static_cast<double>(i) / steps;
    const double v = eval(s);
    if (v > v_best) {
      v_best = v;
      s_best = s;
    }
  }
  const double h = 1.0 / steps;
  const double vm = eval(s_best - h), vp = eval(s_best + h);
  const double den = vm - 2.0 * v_best + vp;
  if (den < 0.0) s_best += 0.5 * (vm - vp) / den * h;
  return s_best;
}

} // namespace

RotationMeasurement measure_rotation(const ComplexField& before, const ComplexField& after,
                                     const std::vector<Annulus>& annuli, double z_over_zr,
                                     const MeasureOptions& opts) {
  if (before.n != after.n || before.pitch_nm != after.pitch_nm)
    throw validation_error("before/after fields live on different grids");
  if (annuli.empty()) throw validation_error("at least one annulus required");
  for (std::size_t i = 0; i < annuli.size(); ++i) {
    if (!(annuli[i].r_inner_nm >= 0.0 && annuli[i].r_outer_nm > annuli[i].r_inner_nm))
      throw validation_error("annulus radii must satisfy 0 <= r_inner < r_outer");
    if (i > 0 && annuli[i].r_inner_nm < annuli[i - 1].r_outer_nm)
      throw validation_error("annuli must be sorted and non-overlapping");
  }

  const auto ib = intensity_grid(before);
  const auto ia = intensity_grid(after);
  const double total_power = before.total_power();

  RotationMeasurement m;
  m.z_over_zr = z_over_zr;
  const double bin = 2.0 * pi / opts.n_theta;
  for (const auto& a : annuli) {
    auto [pb, power_b] = annulus_profile(ib, before, a, opts.n_theta);
    auto [pa, power_a] = annulus_profile(ia, after, a, opts.n_theta);
    AnnulusRotation ar;
    ar.annulus = a;
    ar.power_fraction = total_power > 0.0 ? power_b / total_power : 0.0;
    ar.excluded = ar.power_fraction < opts.power_exclude_fraction;
    if (!ar.excluded) ar.delta_theta_rad = correlation_shift_bins(pb, pa) * bin;
    m.annuli.push_back(ar);
  }

  const auto& outer = m.annuli.back();
  m.larmor_reference_excluded = outer.excluded;
  m.larmor_component_rad = outer.excluded ? 0.0 : outer.delta_theta_rad;
  double acc = 0.0;
  int cnt = 0;
  for (std::size_t i = 0; i + 1 < m.annuli.size(); ++i) {
    if (m.annuli[i].excluded) continue;
    acc += m.annuli[i].delta_theta_rad - m.larmor_component_rad;
    ++cnt;
  }
  m.gouy_component_rad = cnt > 0 ? acc / cnt : 0.0;
  return m;
}

std::vector<Annulus> default_annuli(double rim_nm, const ComplexField& f) {
  const double half = f.half_extent_nm();
  std::vector<Annulus> out;
  const double outer_start = 0.8 * half;
  double factors[4] = {0.7, 0.9, 1.1, 1.3};
  for (int i = 0; i < 3; ++i) {
    double lo = factors[i] * rim_nm;
    double hi = factors[i + 1] * rim_nm;
    if (hi > outer_start) break;
    out.push_back({lo, hi});
  }
  if (out.empty()) out.push_back({0.7 * rim_nm, std::min(1.3 * rim_nm, 0.99 * outer_start)});
  out.push_back({outer_start, 0.95 * half});
  return out;
}

GouyRun run_gouy_pipeline(int ell, const GouyGeometry& geom) {
  using namespace waveopt;
  const double lambda_pm = geom.beam.wavelength_pm;
  ComplexField beam0;
  if (geom.hologram_spec) {
    hologram::HologramSpec spec = *geom.hologram_spec;
    spec.ell = ell;
    spec.validate();
    const double t0 =
        hologram::t0_for_phase_depth_nm(spec.phase_depth_rad, geom.beam, geom.v_mip_volt);
    ComplexField trans = hologram::transmission_function(spec, geom.beam, geom.v_mip_volt, t0,
                                                         geom.grid_n, geom.pitch_nm);
    ComplexField far = fraunhofer(trans);
    const double sep_px = geom.grid_n * geom.pitch_nm / spec.carrier_period_nm;
    int crop_m = 1;
    while (crop_m < sep_px && crop_m < geom.grid_n) crop_m <<= 1;
    beam0 = crop(far, geom.grid_n / 2 + static_cast<int>(std::lround(sep_px)), geom.grid_n / 2,
                 crop_m);
  } else {
    if (!(geom.waist_nm > 0.0)) throw validation_error("geometry needs a waist or a hologram");
    beam0 = lg_mode(ell, 0, geom.waist_nm, geom.grid_n, geom.pitch_nm, lambda_pm);
  }

  GouyRun run;
  run.rim_nm = rim_radius_nm(beam0);
  run.z_r_nm = rayleigh_range_nm(run.rim_nm, beam0.wavelength_pm, geom.ell_ref);

  const double dz1 = geom.aperture_z_over_zr * run.z_r_nm;
  PropagationPlan plan1(beam0, dz1);
  ComplexField at_aperture = fresnel_propagate(beam0, plan1);
  run.before = apply_half_plane_block(at_aperture, geom.edge_azimuth_rad);

  run.dz_nm = (geom.analysis_z_over_zr - geom.aperture_z_over_zr) * run.z_r_nm;
  PropagationPlan plan2(run.before, run.dz_nm);
  run.after = fresnel_propagate(run.before, plan2);
  if (geom.lens_field_tesla != 0.0)
    run.after = apply_larmor_rotation(run.after, geom.lens_field_tesla, run.dz_nm,
                                      geom.beam.velocity_m_per_s);

  run.measurement = measure_rotation(run.before, run.after, default_annuli(run.rim_nm, run.before),
                                     geom.analysis_z_over_zr);
  return run;
}

std::vector<CurveEntry> rotation_curve(const std::vector<int>& ells, const GouyGeometry& geom) {
  std::vector<CurveEntry> curve;
  curve.reserve(ells.size());
  for (int ell : ells) {
    CurveEntry e;
    e.ell = ell;
    e.z_over_zr = geom.analysis_z_over_zr;
    e.method = geom.hologram_spec ? "hologram" : "lg";
    try {
      GouyRun run = run_gouy_pipeline(ell, geom);
      e.rotation_rad = run.measurement.gouy_component_rad;
    } catch (const std::exception& ex) {
      e.ok = false;
      e.error = ex.what();
    }
    curve.push_back(e);
  }
  return curve;
}

namespace {

// monotone cubic (Fritsch-Carlson) slopes for strictly increasing x
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  return d;
}

double hermite_eval(double x0, double x1, double y0, double y1, double d0, double d1, double x,
                    double* deriv) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  if (deriv) {
    const double dh00 = (6 * t2 - 6 * t) / h, dh10 = (3 * t2 - 4 * t + 1) / h;
    const double dh01 = (-6 * t2 + 6 * t) / h, dh11 = (3 * t2 - 2 * t) / h;
    *deriv = dh00 * y0 + dh10 * h * d0 + dh01 * y1 + dh11 * h * d1;
  }
  return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

} // namespace

FitResult fit_mean_oam(double measured_rotation_rad, const std::vector<CurveEntry>& curve,
                       const FitOptions& opts) {
  std::vector<std::pair<double, double>> pts; // (rotation, ell)
  for (const auto& e : curve)
    if (e.ok) pts.emplace_back(e.rotation_rad, static_cast<double>(e.ell));
  if (pts.size() < 2) throw validation_error("need at least two valid curve entries");
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (!(pts[i].first < pts[i + 1].first))
      throw validation_error("rotation curve is not strictly monotone");

  const double lo = pts.front().first, hi = pts.back().first;
  if (measured_rotation_rad < lo || measured_rotation_rad > hi)
    throw fit_domain_error("measured rotation " + io::fmt_g9(measured_rotation_rad) +
                           " rad lies outside the curve hull [" + io::fmt_g9(lo) + ", " +
                           io::fmt_g9(hi) + "]");

  std::vector<double> x(pts.size()), y(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    x[i] = pts[i].first;
    y[i] = pts[i].second;
  }
  const auto d = pchip_slopes(x, y);
  std::size_t seg = 0;
  while (seg + 2 < x.size() && measured_rotation_rad > x[seg + 1]) ++seg;
  double deriv = 0.0;
  const double l_hat = hermite_eval(x[seg], x[seg + 1], y[seg], y[seg + 1], d[seg], d[seg + 1],
                                    measured_rotation_rad, &deriv);

  FitResult r;
  r.l_hat = l_hat;
  r.sigma = std::abs(deriv) * opts.sigma_theta_rad;
  // residual: linear forward interpolation of the curve at l_hat
  double fwd = measured_rotation_rad;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double e0 = y[i], e1 = y[i + 1];
    if ((l_hat >= std::min(e0, e1)) && (l_hat <= std::max(e0, e1)) && e1 != e0) {
      fwd = x[i] + (x[i + 1] - x[i]) * (l_hat - e0) / (e1 - e0);
      break;
    }
  }
  r.residual_rad = std::abs(fwd - measured_rotation_rad);
  return r;
}

std::vector<OrderEfficiency> diffraction_order_efficiencies(const ComplexField& farfield,
                                                            double carrier_direction_rad,
                                                            double k_carrier_rad_per_nm,
                                                            const OrderBoxOptions& opts) {
  if (!(k_carrier_rad_per_nm > 0.0)) throw validation_error("k_carrier must be > 0");
  if (!(farfield.z_nm > 0.0))
    throw validation_error("far field must carry its camera length in the z tag");
  const double lambda_nm = farfield.wavelength_nm();
  // order separation on the camera plane, in pixels
  const double sep_px =
      lambda_nm * farfield.z_nm * k_carrier_rad_per_nm / (2.0 * pi * farfield.pitch_nm);
  if (sep_px < 4.0)
    throw validation_error("diffraction orders closer than 4 px; minimum k_carrier = " +
                           io::fmt_g9(k_carrier_rad_per_nm * 4.0 / sep_px) + " rad/nm");

  const auto intensity = intensity_grid(farfield);
  const double c = farfield.n / 2;
  const double dir_c = std::cos(carrier_direction_rad);
  const double dir_s = std::sin(carrier_direction_rad);

  // overlap check: ring radius of the +1 order must stay within half a separation
  {
    const double ox = c + sep_px * dir_c;
    const double oy = c + sep_px * dir_s;
    const int rmax = static_cast<int>(sep_px / 2.0) + 2;
    const auto avg = ring_average(intensity, farfield.n, ox, oy, 1,
                                  std::min(rmax, farfield.n / 2 - 2), 512);
    int best = 1;
    for (int j = 2; j < static_cast<int>(avg.size()); ++j)
      if (avg[j] > avg[best]) best = j;
    if (best > 1 && 2.0 * best > sep_px)
      throw validation_error(
          "diffraction orders overlap their ring diameter; minimum k_carrier = " +
          io::fmt_g9(k_carrier_rad_per_nm * 2.0 * best / sep_px) + " rad/nm");
  }

  const double total = farfield.total_power();
  const int n_orders = 2 * opts.max_order + 1;
  std::vector<double> acc(static_cast<std::size_t>(n_orders), 0.0);
  const double v_half = opts.box_height_factor * sep_px / 2.0;
  for (int iy = 0; iy < farfield.n; ++iy) {
    const double dy = iy - c;
    for (int ix = 0; ix < farfield.n; ++ix) {
      const double dx = ix - c;
      const double u = dx * dir_c + dy * dir_s;
      const double v = -dx * dir_s + dy * dir_c;
      if (std::abs(v) > v_half) continue;
      const int m = static_cast<int>(std::lround(u / sep_px));
      if (std::abs(m) > opts.max_order) continue;
      if (std::abs(u - m * sep_px) > sep_px / 2.0) continue;
      acc[static_cast<std::size_t>(m + opts.max_order)] +=
          intensity[static_cast<std::size_t>(iy) * farfield.n + ix];
    }
  }
  std::vector<OrderEfficiency> out;
  out.reserve(static_cast<std::size_t>(n_orders));
  const double norm = total > 0.0 ? farfield.pitch_nm * farfield.pitch_nm / total : 0.0;
  for (int m = -opts.max_order; m <= opts.max_order; ++m)
    out.push_back({m, acc[static_cast<std::size_t>(m + opts.max_order)] * norm});
  return out;
}

} // namespace evortex::oam
