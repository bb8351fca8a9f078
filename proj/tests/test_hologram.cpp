#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "evortex/beamline.hpp"
#include "evortex/constants.hpp"
#include "evortex/errors.hpp"
#include "evortex/hologram.hpp"

#include <cmath>
#include <random>

using namespace evortex;
using namespace evortex::hologram;
using constants::pi;

namespace {

HologramSpec small_spec(int ell, double d_c = 120.0, double r_um = 2.0, double excl_um = 0.3,
                        double pitch = 10.0) {
  HologramSpec s;
  s.ell = ell;
  s.carrier_period_nm = d_c;
  s.pattern_radius_um = r_um;
  s.exclusion_radius_um = excl_um;
  s.pixel_pitch_nm = pitch;
  return s;
}

// finite-difference |grad f| oracle, independent of the analytic gradient
double grad_fd(double x, double y, const HologramSpec& s) {
  const double h = 1e-3;
  auto f = [&](double px, double py) {
    return grating_phase(std::hypot(px, py), std::atan2(py, px), s);
  };
  const double fx = (f(x + h, y) - f(x - h, y)) / (2 * h);
  const double fy = (f(x, y + h) - f(x, y - h)) / (2 * h);
  return std::hypot(fx, fy);
}

// brute-force stationary point search over the relevant half plane
std::pair<double, double> brute_force_stationary(const HologramSpec& s) {
  const double k = s.carrier_k_rad_per_nm();
  const double rho_star = std::abs(s.ell) / k;
  const double step = s.pixel_pitch_nm / 2.0;
  const double y_sign = s.ell > 0 ? 1.0 : -1.0;
  double best_x = 0, best_y = y_sign * rho_star, best_g = 1e300;
  for (double y = 0.5 * rho_star; y <= 1.5 * rho_star; y += step) {
    for (double x = -0.5 * rho_star; x <= 0.5 * rho_star; x += step) {
      const double g = grad_fd(x, y_sign * y, s);
      if (g < best_g) {
        best_g = g;
        best_x = x;
        best_y = y_sign * y;
      }
    }
  }
  return {best_x, best_y};
}

} // namespace

TEST_CASE("grating phase matches its closed form") {
  auto s = small_spec(1000, 100.0, 30.0, 2.0, 20.0);
  // ell = 0: a plain carrier
  auto s0 = small_spec(0, 100.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ur(10.0, 2000.0), ut(-pi, pi);
  for (int i = 0; i < 50; ++i) {
    const double rho = ur(rng), th = ut(rng);
    CHECK(grating_phase(rho, th, s0) ==
          doctest::Approx(rho * s0.carrier_k_rad_per_nm() * std::cos(th)).epsilon(1e-12));
    // theta = pi/2: rho drops out
    CHECK(grating_phase(rho, pi / 2, s) == doctest::Approx(1000.0 * pi / 2).epsilon(1e-9));
  }
  CHECK(grating_phase(10000.0, 0.0, s) == doctest::Approx(628.3185307179587).epsilon(1e-12));
}

TEST_CASE("thickness profile: rectangular sign behavior and duty") {
  auto s = small_spec(1, 100.0);
  // f = +-pi/2 via theta = pi/2 and ell = +-1
  CHECK(thickness_profile(500.0, pi / 2, s) == 1.0);
  s.ell = -1;
  CHECK(thickness_profile(500.0, pi / 2, s) == 0.0);

  // spatial average over carrier periods equals the duty cycle
  for (double duty : {0.5, 0.3, 0.7}) {
    auto sd = small_spec(0, 100.0);
    sd.duty = duty;
    double acc = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) acc += thickness_profile(500.0 + i * 100.0 / n, 0.0, sd);
    CHECK(acc / n == doctest::Approx(duty).epsilon(2e-3));
  }
}

TEST_CASE("thickness profile: smooth profiles") {
  auto s = small_spec(0, 100.0);
  s.profile = GrooveProfile::sinusoidal;
  CHECK(thickness_profile(0.0, 0.0, s) == doctest::Approx(0.5).epsilon(1e-12)); // f = 0
  s.profile = GrooveProfile::blazed;
  // sawtooth ramps with f and wraps at 2 pi
  CHECK(thickness_profile(25.0, 0.0, s) == doctest::Approx(0.25).epsilon(1e-12)); // f = pi/2
  CHECK(thickness_profile(50.0, 0.0, s) == doctest::Approx(0.5).epsilon(1e-12));  // f = pi
}

TEST_CASE("thickness profile: 2 pi rotation covariance") {
  auto s = small_spec(17, 130.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ur(1.0, 3000.0), ut(-pi, pi);
  int mismatches = 0;
  for (int i = 0; i < 100000; ++i) {
    const double rho = ur(rng), th = ut(rng);
    if (thickness_profile(rho, th, s) != thickness_profile(rho, th + 2 * pi, s)) ++mismatches;
  }
  // discrete levels: equal except within float noise of the threshold
  CHECK(mismatches == 0);
  s.profile = GrooveProfile::sinusoidal;
  for (int i = 0; i < 1000; ++i) {
    const double rho = ur(rng), th = ut(rng);
    CHECK(thickness_profile(rho, th, s) ==
          doctest::Approx(thickness_profile(rho, th + 2 * pi, s)).epsilon(1e-9));
  }
}

TEST_CASE("local line spacing") {
  auto s = small_spec(1000, 100.0, 30.0, 2.0, 20.0);
  const double k = s.carrier_k_rad_per_nm();

  // infinity sentinel at the stationary point
  CHECK(std::isinf(local_line_spacing_nm(1000.0 / k, pi / 2, s)));

  // carrier-only grating: d = d_c/2 everywhere
  auto s0 = small_spec(0, 100.0);
  for (double th : {0.0, 0.3, 1.2, 2.9})
    CHECK(local_line_spacing_nm(700.0, th, s0) == doctest::Approx(50.0).epsilon(1e-12));

  // dense azimuth opposite the stationary point
  CHECK(local_line_spacing_nm(1000.0 / k, 3 * pi / 2, s) == doctest::Approx(25.0).epsilon(1e-12));

  // carrier dominates far out: d -> d_c/2 at theta = 0 within 1%
  CHECK(local_line_spacing_nm(100.0 * 1000.0 / k, 0.0, s) == doctest::Approx(50.0).epsilon(0.01));

  CHECK_THROWS_AS(local_line_spacing_nm(0.0, 0.0, s), validation_error);
}

TEST_CASE("stationary point: analytic location, saddle class, brute-force oracle") {
  auto s = small_spec(1000, 100.0, 30.0, 2.0, 20.0);
  const auto p = find_stationary_point(s);
  CHECK(p.rho_nm == doctest::Approx(15915.494309189533).epsilon(1e-12));
  CHECK(p.theta_rad == doctest::Approx(pi / 2).epsilon(1e-12));
  CHECK(p.classification == StationaryClass::saddle);

  auto sm = small_spec(-1000, 100.0, 30.0, 2.0, 20.0);
  const auto pm = find_stationary_point(sm);
  CHECK(pm.rho_nm == doctest::Approx(p.rho_nm).epsilon(1e-12));
  CHECK(pm.theta_rad == doctest::Approx(-pi / 2).epsilon(1e-12));
  CHECK(pm.classification == StationaryClass::saddle);

  CHECK_THROWS_AS(find_stationary_point(small_spec(0)), validation_error);

  // brute-force finite-difference search agrees within one pixel pitch
  for (int ell : {60, -90}) {
    auto sb = small_spec(ell, 150.0, 5.0, 0.2, 15.0);
    const auto pa = find_stationary_point(sb);
    const auto [bx, by] = brute_force_stationary(sb);
    const double ax = pa.rho_nm * std::cos(pa.theta_rad);
    const double ay = pa.rho_nm * std::sin(pa.theta_rad);
    CHECK(std::hypot(bx - ax, by - ay) <= sb.pixel_pitch_nm);
  }
}

TEST_CASE("spec validation names the violated field") {
  auto s = small_spec(10);
  s.exclusion_radius_um = 3.0; // exceeds the 2 um pattern radius
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("exclusion_radius"), validation_error);
  s = small_spec(10);
  s.pixel_pitch_nm = 40.0; // >= carrier/4
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("pixel_pitch"), validation_error);
  s = small_spec(10);
  s.duty = 1.0;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("duty"), validation_error);
  s = small_spec(10);
  s.phase_depth_rad = 7.0;
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("phase_depth"), validation_error);
}

TEST_CASE("rasterize: determinism across tile sizes and threads") {
  auto s = small_spec(50);
  RasterOptions a;
  a.tile_size_px = 4096;
  a.threads = 1;
  const auto bm1 = rasterize(s, a);
  RasterOptions b;
  b.tile_size_px = 64;
  b.threads = 3;
  const auto bm2 = rasterize(s, b);
  RasterOptions c;
  c.tile_size_px = 123;
  c.threads = 2;
  const auto bm3 = rasterize(s, c);
  CHECK(bm1.data == bm2.data);
  CHECK(bm1.data == bm3.data);
  CHECK(bm1.width == raster_side_px(s));
  CHECK(bm1.levels == 2);

  RasterOptions bad;
  bad.tile_size_px = 10; // 100 px budget < one 400 px row
  CHECK_THROWS_WITH_AS(rasterize(s, bad), doctest::Contains("tile budget"), validation_error);
}

TEST_CASE("rasterize: annulus masking and straight fringes at ell = 0") {
  auto s = small_spec(0);
  const auto bm = rasterize(s);
  const double c = (bm.width - 1) / 2.0;
  // outside the pattern radius and inside the exclusion hole: level 0
  CHECK(bm.at(0, 0) == 0);
  CHECK(bm.at(bm.width / 2, bm.height / 2) == 0);
  // fringe period along the carrier axis equals carrier_period within one pixel
  const int cy = bm.height / 2;
  std::vector<int> rises;
  for (int x = 1; x < bm.width; ++x) {
    const double xc = (x - c) * s.pixel_pitch_nm;
    if (std::abs(xc) < 1500.0 && std::abs(xc) > 400.0) // inside the annulus
      if (bm.at(x - 1, cy) == 0 && bm.at(x, cy) == 1) rises.push_back(x);
  }
  REQUIRE(rises.size() >= 3);
  for (std::size_t i = 1; i < rises.size(); ++i) {
    const double period = (rises[i] - rises[i - 1]) * s.pixel_pitch_nm;
    if (period < 1.5 * s.carrier_period_nm) // skip the jump across the hole
      CHECK(std::abs(period - s.carrier_period_nm) <= s.pixel_pitch_nm);
  }
}

TEST_CASE("rasterize: charge conjugation mirrors the pattern through the carrier axis") {
  auto sp = small_spec(7);
  auto sm = small_spec(-7);
  const auto bp = rasterize(sp);
  const auto bm = rasterize(sm);
  REQUIRE(bp.width == bm.width);
  REQUIRE(bp.width % 2 == 0); // even grid: no pixel row sits on the mirror axis
  bool equal = true;
  for (int y = 0; y < bp.height && equal; ++y)
    for (int x = 0; x < bp.width; ++x)
      if (bm.at(x, y) != bp.at(x, bp.height - 1 - y)) {
        equal = false;
        break;
      }
  CHECK(equal);
}

TEST_CASE("fabricability report") {
  // uniform grating: line width duty*d_c/2 everywhere, violation is all-or-nothing
  auto s0 = small_spec(0, 100.0);
  const auto r_none = fabricability_report(s0, 20.0); // 25 nm lines > 20 nm
  CHECK(r_none.min_line_width_nm == doctest::Approx(25.0).epsilon(1e-9));
  CHECK(r_none.violating_area_fraction == 0.0);
  const auto r_all = fabricability_report(s0, 30.0);
  CHECK(r_all.violating_area_fraction == 1.0);
  const auto r_zero = fabricability_report(s0, 0.0);
  CHECK(r_zero.violating_area_fraction == 0.0);

  // fork hologram: the sampled minimum is bracketed by the analytic field
  auto s = small_spec(1000, 130.0, 30.0, 3.0, 30.0);
  const auto rep = fabricability_report(s, 33.0);
  CHECK(rep.min_line_width_nm == doctest::Approx(s.duty * rep.min_local_spacing_nm));
  CHECK(rep.min_line_width_nm <= rep.min_local_spacing_nm);
  CHECK(rep.violating_area_fraction >= 0.0);
  CHECK(rep.violating_area_fraction <= 1.0);
  // densest lines sit at the inner edge opposite the stationary point
  const double k = s.carrier_k_rad_per_nm();
  const double d_inner = pi / (1000.0 / s.exclusion_radius_nm() + k);
  CHECK(rep.min_local_spacing_nm >= d_inner * 0.95);
  CHECK(rep.min_local_spacing_nm <= pi / k);
  double hist_total = rep.spacing_hist_overflow;
  for (double b : rep.spacing_hist) hist_total += b;
  CHECK(hist_total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("transmission function") {
  const auto beam = beamline::BeamParams::from_voltage(300000.0);
  auto s = small_spec(10, 120.0, 2.0, 0.3, 10.0);

  // t0 for a pi phase depth: 48.1 nm at the illustrative V_mip = 10 V
  const double t0 = t0_for_phase_depth_nm(pi, beam, 10.0);
  CHECK(t0 == doctest::Approx(pi / (beam.interaction_constant_rad_per_v_nm * 10.0)).epsilon(1e-12));
  CHECK(t0 == doctest::Approx(48.14).epsilon(1e-3));

  auto f = transmission_function(s, beam, 10.0, t0, 512, 10.0);
  // peak-to-trough phase across the pattern is pi to 1e-12
  double ph_min = 10.0, ph_max = -10.0;
  for (int iy = 0; iy < f.n; ++iy)
    for (int ix = 0; ix < f.n; ++ix) {
      const auto u = f.at(ix, iy);
      if (std::abs(u) > 0.5) {
        const double ph = std::arg(u);
        ph_min = std::min(ph_min, ph);
        ph_max = std::max(ph_max, ph);
      }
    }
  CHECK(ph_max - ph_min == doctest::Approx(pi).epsilon(1e-12));

  // amplitude mask: the open hole transmits, outside is opaque
  CHECK(std::abs(f.at(f.n / 2, f.n / 2)) == doctest::Approx(1.0));
  CHECK(std::abs(f.at(0, 0)) == 0.0);
  s.exclusion_mode = ExclusionMode::blocked;
  auto fb = transmission_function(s, beam, 10.0, t0, 512, 10.0);
  CHECK(std::abs(fb.at(fb.n / 2, fb.n / 2)) == 0.0);

  // t0 = 0: pure amplitude annulus
  auto fa = transmission_function(s, beam, 10.0, 0.0, 512, 10.0);
  for (std::size_t i = 0; i < fa.samples.size(); i += 101) {
    const auto u = fa.samples[i];
    CHECK(u.imag() == 0.0);
    CHECK((u.real() == 0.0 || u.real() == 1.0));
  }

  CHECK_THROWS_WITH_AS(transmission_function(s, beam, 10.0, t0, 256, 10.0),
                       doctest::Contains("grid too small"), validation_error);
}
