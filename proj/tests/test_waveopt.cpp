#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "evortex/constants.hpp"
#include "evortex/errors.hpp"
#include "evortex/waveopt.hpp"

#include <cmath>
#include <random>

using namespace evortex;
using namespace evortex::waveopt;
using constants::pi;

namespace {

ComplexField random_field(int n, double pitch, double wavelength_pm, unsigned seed) {
  ComplexField f(n, pitch, wavelength_pm);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& s : f.samples) s = {u(rng), u(rng)};
  return f;
}

// effective Gaussian 1/e^2 radius from the intensity second moment
double second_moment_width(const ComplexField& f) {
  double num = 0.0, den = 0.0;
  for (int iy = 0; iy < f.n; ++iy)
    for (int ix = 0; ix < f.n; ++ix) {
      const double w = std::norm(f.at(ix, iy));
      const double x = f.x_nm(ix), y = f.y_nm(iy);
      num += w * (x * x + y * y);
      den += w;
    }
  return std::sqrt(2.0 * num / den);
}

double max_abs(const ComplexField& f) {
  double m = 0.0;
  for (const auto& u : f.samples) m = std::max(m, std::abs(u));
  return m;
}

} // namespace

TEST_CASE("lg_mode: gaussian, ring radius, unit power") {
  auto g = lg_mode(0, 0, 100.0, 256, 10.0, 2.0);
  CHECK(g.total_power() == doctest::Approx(1.0).epsilon(1e-8));
  // intensity max at center
  double best = -1.0;
  int bx = 0, by = 0;
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      if (std::norm(g.at(ix, iy)) > best) {
        best = std::norm(g.at(ix, iy));
        bx = ix;
        by = iy;
      }
  CHECK(bx == g.n / 2);
  CHECK(by == g.n / 2);

  // ell = 50: rim at waist*sqrt(ell/2) = 5 w
  const double w0 = 200.0;
  auto v = lg_mode(50, 0, w0, 1024, 10.0, 2.0);
  CHECK(v.total_power() == doctest::Approx(1.0).epsilon(1e-8));
  const double r_rim = 5.0 * w0;
  auto ring_intensity = [&](double r) {
    double acc = 0.0;
    for (int t = 0; t < 720; ++t) {
      const double th = 2 * pi * t / 720;
      const double px = v.n / 2 + r * std::cos(th) / v.pitch_nm;
      const double py = v.n / 2 + r * std::sin(th) / v.pitch_nm;
      acc += std::norm(v.sample_bilinear(px, py));
    }
    return acc;
  };
  CHECK(ring_intensity(r_rim) > ring_intensity(0.9 * r_rim));
  CHECK(ring_intensity(r_rim) > ring_intensity(1.1 * r_rim));

  for (int p : {0, 1, 3})
    CHECK(lg_mode(7, p, 150.0, 512, 10.0, 2.0).total_power() == doctest::Approx(1.0).epsilon(1e-8));

  CHECK_THROWS_AS(lg_mode(0, 0, 30.0, 256, 10.0, 2.0), validation_error);    // waist < 4 pitch
  CHECK_THROWS_AS(lg_mode(400, 0, 200.0, 256, 10.0, 2.0), validation_error); // ring off grid
}

TEST_CASE("fraunhofer: Airy first zero within half an output pixel") {
  const int n = 2048;
  const double pitch = 10.0, lambda_pm = 2.0;
  ComplexField ap(n, pitch, lambda_pm);
  const double d_nm = 64 * pitch; // aperture diameter
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double x = ap.x_nm(ix), y = ap.y_nm(iy);
      if (x * x + y * y <= d_nm * d_nm / 4.0) ap.at(ix, iy) = 1.0;
    }
  auto far = fraunhofer(ap);
  CHECK(far.total_power() == doctest::Approx(ap.total_power()).epsilon(1e-10));

  // azimuthally averaged intensity: first minimum vs 1.2197 lambda/D
  const double lambda_nm = lambda_pm * 1e-3;
  const double alpha_pix = lambda_nm / (n * pitch); // angular size of one pixel
  auto ring = [&](int j) {
    double acc = 0.0;
    for (int t = 0; t < 1024; ++t) {
      const double th = 2 * pi * t / 1024;
      acc += std::norm(far.sample_bilinear(n / 2 + j * std::cos(th), n / 2 + j * std::sin(th)));
    }
    return acc;
  };
  int j_min = -1;
  double prev = ring(1);
  for (int j = 2; j < 80; ++j) {
    const double cur = ring(j);
    if (cur > prev) {
      j_min = j - 1;
      break;
    }
    prev = cur;
  }
  REQUIRE(j_min > 0);
  // parabolic refinement around the minimum
  const double a = ring(j_min - 1), b = ring(j_min), c = ring(j_min + 1);
  const double frac = 0.5 * (a - c) / (a - 2 * b + c);
  const double alpha_zero = (j_min + frac) * alpha_pix;
  const double airy = 1.2196698912665045 * lambda_nm / d_nm;
  CHECK(std::abs(alpha_zero - airy) <= 0.5 * alpha_pix);
}

TEST_CASE("fraunhofer: shift theorem leaves intensity unchanged") {
  auto f = random_field(256, 5.0, 2.0, 11);
  auto far1 = fraunhofer(f);
  // circularly shift input by one pixel in x
  ComplexField g = f;
  for (int iy = 0; iy < f.n; ++iy)
    for (int ix = 0; ix < f.n; ++ix) g.at(ix, iy) = f.at((ix + 1) % f.n, iy);
  auto far2 = fraunhofer(g);
  double max_rel = 0.0;
  const double scale = max_abs(far1);
  for (std::size_t i = 0; i < far1.samples.size(); ++i)
    max_rel = std::max(max_rel,
                       std::abs(std::abs(far1.samples[i]) - std::abs(far2.samples[i])) / scale);
  CHECK(max_rel < 1e-10);
}

TEST_CASE("propagation: identity, unitarity, inverse") {
  auto f = random_field(256, 5.0, 2.0, 5);
  PropagationPlan zero(f, 0.0);
  auto f0 = fresnel_propagate(f, zero);
  for (std::size_t i = 0; i < f.samples.size(); i += 37)
    CHECK(std::abs(f0.samples[i] - f.samples[i]) < 1e-12);

  for (unsigned seed = 0; seed < 10; ++seed) {
    auto r = random_field(128, 8.0, 2.0, 100 + seed);
    PropagationPlan plan(r, 2.0e5);
    auto p = fresnel_propagate(r, plan);
    CHECK(p.total_power() == doctest::Approx(r.total_power()).epsilon(1e-10));
    PropagationPlan back(p, -2.0e5);
    auto q = fresnel_propagate(p, back);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      err += std::norm(q.samples[i] - r.samples[i]);
      ref += std::norm(r.samples[i]);
    }
    CHECK(std::sqrt(err / ref) < 1e-8);
  }
}

TEST_CASE("propagation: gaussian expands by sqrt(2) at its rayleigh range") {
  const double w0 = 120.0, pitch = 10.0, lambda_pm = 2.0;
  auto g = lg_mode(0, 0, w0, 512, pitch, lambda_pm);
  CHECK(second_moment_width(g) == doctest::Approx(w0).epsilon(1e-3));
  const double zt = pi * w0 * w0 / (lambda_pm * 1e-3);
  PropagationPlan plan(g, zt);
  auto gz = fresnel_propagate(g, plan);
  CHECK(second_moment_width(gz) == doctest::Approx(w0 * std::sqrt(2.0)).epsilon(0.01));
  CHECK(gz.z_nm == doctest::Approx(zt));

  // paraxial transfer-function variant agrees here
  PropagationPlan plan_tf(g, zt, PropagationMethod::fresnel_transfer);
  auto gz2 = fresnel_propagate(g, plan_tf);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < gz.samples.size(); ++i) {
    err += std::norm(gz.samples[i] - gz2.samples[i]);
    ref += std::norm(gz.samples[i]);
  }
  CHECK(std::sqrt(err / ref) < 1e-5);
}

TEST_CASE("propagation: rescaled fresnel matches the analytic gaussian") {
  const double w0 = 120.0, pitch = 10.0, lambda_pm = 2.0;
  auto g = lg_mode(0, 0, w0, 512, pitch, lambda_pm);
  const double zt = pi * w0 * w0 / (lambda_pm * 1e-3);
  const double m = 2.0;
  PropagationPlan plan(g, 2.0 * zt, PropagationMethod::fresnel_transfer, m);
  auto gz = fresnel_propagate(g, plan);
  CHECK(gz.pitch_nm == doctest::Approx(m * pitch));
  CHECK(gz.total_power() == doctest::Approx(1.0).epsilon(1e-6));
  const double wz = w0 * std::sqrt(1.0 + 4.0); // w(2 z_R)
  CHECK(second_moment_width(gz) == doctest::Approx(wz).epsilon(0.01));
}

TEST_CASE("propagation plan: aliasing guard names the safe dz") {
  auto f = random_field(128, 8.0, 2.0, 1);
  const double max_dz = PropagationPlan::max_safe_dz_nm(f); // n pitch^2 / lambda
  CHECK(max_dz == doctest::Approx(128 * 64.0 / 0.002));
  CHECK_THROWS_WITH_AS(PropagationPlan(f, 1.01 * max_dz), doctest::Contains("maximum safe dz"),
                       sampling_error);
  CHECK_NOTHROW(PropagationPlan(f, 0.99 * max_dz));
}

TEST_CASE("propagation is linear") {
  auto f = random_field(128, 8.0, 2.0, 21);
  auto g = random_field(128, 8.0, 2.0, 22);
  const std::complex<double> a{0.7, -0.3}, b{-1.1, 0.4};
  ComplexField sum(128, 8.0, 2.0);
  for (std::size_t i = 0; i < sum.samples.size(); ++i)
    sum.samples[i] = a * f.samples[i] + b * g.samples[i];
  PropagationPlan plan(f, 1.5e5);
  auto pf = fresnel_propagate(f, plan);
  auto pg = fresnel_propagate(g, plan);
  auto ps = fresnel_propagate(sum, plan);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < ps.samples.size(); ++i) {
    err += std::norm(ps.samples[i] - (a * pf.samples[i] + b * pg.samples[i]));
    ref += std::norm(ps.samples[i]);
  }
  CHECK(std::sqrt(err / ref) < 1e-12);
}

TEST_CASE("half-plane block") {
  auto g = lg_mode(0, 0, 200.0, 256, 10.0, 2.0);
  const double alpha = 0.3; // no sample sits exactly on this edge
  auto once = apply_half_plane_block(g, alpha);
  auto twice = apply_half_plane_block(once, alpha);
  for (std::size_t i = 0; i < g.samples.size(); i += 13)
    CHECK(once.samples[i] == twice.samples[i]); // idempotent off the edge set

  // complementary halves kill the field
  auto both = apply_half_plane_block(once, alpha + pi);
  CHECK(max_abs(both) == 0.0);

  // symmetric beam: half the power within one edge row
  CHECK(once.total_power() == doctest::Approx(0.5 * g.total_power()).epsilon(0.02));

  // axis-aligned edge: the y = 0 row keeps half amplitude
  auto blocked = apply_half_plane_block(g, 0.0);
  const int cy = g.n / 2;
  CHECK(std::abs(blocked.at(10, cy)) ==
        doctest::Approx(0.5 * std::abs(g.at(10, cy))).epsilon(1e-12));
  CHECK(std::abs(blocked.at(10, cy + 5)) == 0.0);          // blocked side (y > 0)
  CHECK(blocked.at(10, cy - 5) == g.at(10, cy - 5));       // kept side
}

TEST_CASE("circular aperture") {
  auto v = lg_mode(50, 0, 200.0, 1024, 10.0, 2.0);
  // aperture far outside the grid: identity
  auto same = apply_circular_aperture(v, 2.0 * v.half_extent_nm());
  CHECK(same.samples == v.samples);
  // radius at 3 rim radii: negligible power loss
  const double rim = 5.0 * 200.0;
  auto cut = apply_circular_aperture(v, 3.0 * rim);
  CHECK(v.total_power() - cut.total_power() < 1e-4);
  // tiny aperture removes almost everything (vortex core is dark)
  auto tiny = apply_circular_aperture(v, 2.0 * v.pitch_nm);
  CHECK(tiny.total_power() < 1e-6);
  CHECK_THROWS_AS(apply_circular_aperture(v, 0.0), validation_error);
}

TEST_CASE("rotation: larmor angle arithmetic and rigid rotation fidelity") {
  CHECK(larmor_rotation_angle_rad(2.0, 1e6, 232796486.28087974) ==
        doctest::Approx(0.7555182807398843).epsilon(1e-12));
  CHECK(larmor_rotation_angle_rad(0.0, 1e6, 2.3e8) == 0.0);
  CHECK(larmor_rotation_angle_rad(-2.0, 1e6, 232796486.28087974) ==
        doctest::Approx(-0.7555182807398843).epsilon(1e-12));

  // a blob at +x moves to +y under a +pi/2 rotation
  ComplexField f(128, 10.0, 2.0);
  for (int iy = 0; iy < f.n; ++iy)
    for (int ix = 0; ix < f.n; ++ix) {
      const double dx = f.x_nm(ix) - 300.0, dy = f.y_nm(iy);
      f.at(ix, iy) = std::exp(-(dx * dx + dy * dy) / (2 * 50.0 * 50.0));
    }
  auto r = rotate_field(f, pi / 2);
  double best = -1.0;
  int bx = 0, by = 0;
  for (int iy = 0; iy < f.n; ++iy)
    for (int ix = 0; ix < f.n; ++ix)
      if (std::norm(r.at(ix, iy)) > best) {
        best = std::norm(r.at(ix, iy));
        bx = ix;
        by = iy;
      }
  CHECK(std::abs(r.x_nm(bx)) <= 10.0);
  CHECK(std::abs(r.y_nm(by) - 300.0) <= 10.0);

  // rotate forward then back: small resampling residue only
  auto g = lg_mode(3, 0, 150.0, 256, 10.0, 2.0);
  auto fwd = rotate_field(g, 0.02);
  CHECK(fwd.total_power() == doctest::Approx(g.total_power()).epsilon(1e-3));
  auto back = rotate_field(fwd, -0.02);
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < g.samples.size(); ++i) {
    err += std::norm(back.samples[i] - g.samples[i]);
    ref += std::norm(g.samples[i]);
  }
  CHECK(std::sqrt(err / ref) < 1e-3);

  // b = 0 is the identity
  auto same = apply_larmor_rotation(g, 0.0, 1e6, 2.3e8);
  CHECK(same.samples == g.samples);
}

TEST_CASE("raw field export round-trips") {
  auto f = random_field(64, 3.5, 1.96874890068487934, 99);
  f.z_nm = 123.25;
  const auto path = std::filesystem::temp_directory_path() / "evortex_field_test.bin";
  write_field_raw(path, f);
  auto g = read_field_raw(path);
  CHECK(g.n == f.n);
  CHECK(g.pitch_nm == f.pitch_nm);
  CHECK(g.wavelength_pm == f.wavelength_pm);
  CHECK(g.z_nm == f.z_nm);
  CHECK(g.samples == f.samples);
  std::filesystem::remove(path);
}
