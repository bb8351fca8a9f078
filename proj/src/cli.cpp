#include "evortex/cli.hpp"

#include "evortex/beamline.hpp"
#include "evortex/config.hpp"
#include "evortex/constants.hpp"
#include "evortex/errors.hpp"
#include "evortex/hologram.hpp"
#include "evortex/io.hpp"
#include "evortex/oam.hpp"
#include "evortex/waveopt.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace evortex::cli {

namespace fs = std::filesystem;
using cfg::Config;
using io::fmt_g9;

namespace {

void apply_overrides(Config& config, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw validation_error("override '" + s + "' is not of the form section.key=value");
    config.set(s.substr(0, eq), s.substr(eq + 1));
  }
}

// leftover tokens of the form --section.key=value are config overrides too
void apply_extras(Config& config, const std::vector<std::string>& extras) {
  for (const auto& tok : extras) {
    if (tok.rfind("--", 0) == 0 && tok.find('=') != std::string::npos &&
        tok.find('.') != std::string::npos) {
      const auto eq = tok.find('=');
      config.set(tok.substr(2, eq - 2), tok.substr(eq + 1));
    } else {
      throw validation_error("unrecognized argument '" + tok + "'");
    }
  }
}

hologram::HologramSpec spec_from_config(const Config& c) {
  hologram::HologramSpec spec;
  spec.ell = c.get_int("hologram.ell", 1000);
  spec.carrier_period_nm = c.get_double("hologram.carrier_period_nm", 100.0);
  spec.pattern_radius_um = c.get_double("hologram.pattern_radius_um", 30.0);
  spec.exclusion_radius_um = c.get_double("hologram.exclusion_radius_um", 2.0);
  spec.duty = c.get_double("hologram.duty", 0.5);
  spec.profile = hologram::groove_profile_from_string(
      c.get_str("hologram.profile", "rectangular"));
  spec.phase_depth_rad = c.get_double("hologram.phase_depth_rad", constants::pi);
  spec.pixel_pitch_nm = c.get_double("hologram.pixel_pitch_nm", 4.0);
  spec.exclusion_mode = hologram::exclusion_mode_from_string(
      c.get_str("hologram.exclusion_mode", "open"));
  return spec;
}

void write_common_outputs(const fs::path& out, const Config& c) {
  std::ofstream echo(out / "config_echo.cfg");
  echo << c.serialize_resolved();
  std::ofstream ver(out / "version.txt");
  ver << tool_version << "\n";
}

void write_meta(const fs::path& path,
                const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream m(path);
  io::write_kv(m, kv);
}

// ---------------------------------------------------------------- synth ----

int cmd_synth(const Config& c, const fs::path& out, std::optional<int> tile_override) {
  hologram::HologramSpec spec = spec_from_config(c);
  spec.validate();
  hologram::RasterOptions ro;
  ro.tile_size_px = tile_override ? *tile_override : c.get_int("raster.tile_size_px", 4096);

  const int side = hologram::raster_side_px(spec);
  const bool binary = spec.profile == hologram::GrooveProfile::rectangular;
  const fs::path pattern_path = out / (binary ? "pattern.pbm" : "pattern.pgm");
  std::string hash_hex;
  {
    std::ofstream pf(pattern_path, std::ios::binary);
    if (!pf) throw std::runtime_error("cannot open " + pattern_path.string());
    if (binary) {
      io::PbmWriter w(pf, side, side);
      hologram::rasterize_stream(spec, ro,
                                 [&](int, const std::uint8_t* row) { w.write_row(row); });
      hash_hex = w.content_hash_hex();
    } else {
      io::Pgm8Writer w(pf, side, side);
      hologram::rasterize_stream(spec, ro,
                                 [&](int, const std::uint8_t* row) { w.write_row(row); });
      hash_hex = w.content_hash_hex();
    }
  }

  auto kv = spec.to_kv();
  kv.emplace_back("width_px", std::to_string(side));
  kv.emplace_back("height_px", std::to_string(side));
  kv.emplace_back("levels", std::to_string(spec.levels()));
  kv.emplace_back("format", binary ? "P4" : "P5");
  kv.emplace_back("content_hash_fnv1a64", hash_hex);
  kv.emplace_back("tool_version", tool_version);
  write_meta(out / "pattern.meta", kv);

  const double min_feature = c.get_double("fabricability.min_feature_nm", 33.0);
  hologram::FabricabilityOptions fo;
  fo.n_rho = c.get_int("fabricability.n_rho", 96);
  fo.n_theta = c.get_int("fabricability.n_theta", 256);
  const auto rep = hologram::fabricability_report(spec, min_feature, fo);
  std::ofstream fcsv(out / "fabricability.csv");
  io::CsvWriter w(fcsv);
  w.row({"rho_nm", "theta_rad", "spacing_nm", "line_width_nm"});
  for (const auto& s : rep.samples)
    w.row({fmt_g9(s.rho_nm), fmt_g9(s.theta_rad), fmt_g9(s.spacing_nm),
           fmt_g9(s.line_width_nm)});
  fcsv << "\n";
  w.row({"summary_key", "value"});
  w.row({"min_local_spacing_nm", fmt_g9(rep.min_local_spacing_nm)});
  w.row({"min_line_width_nm", fmt_g9(rep.min_line_width_nm)});
  w.row({"violating_area_fraction", fmt_g9(rep.violating_area_fraction)});
  w.row({"min_feature_nm", fmt_g9(min_feature)});
  w.row({"hist_bin_nm", fmt_g9(rep.hist_bin_nm)});
  w.row({"hist_overflow_fraction", fmt_g9(rep.spacing_hist_overflow)});
  fcsv << "\n";
  w.row({"hist_bin_lo_nm", "area_fraction"});
  for (std::size_t b = 0; b < rep.spacing_hist.size(); ++b)
    w.row({fmt_g9(b * rep.hist_bin_nm), fmt_g9(rep.spacing_hist[b])});
  return 0;
}

// ------------------------------------------------------------- simulate ----

int cmd_simulate(const Config& c, const fs::path& out) {
  hologram::HologramSpec spec = spec_from_config(c);
  spec.validate();
  const auto beam = beamline::BeamParams::from_voltage(c.get_double("beam.voltage_v", 300000.0));
  const double v_mip = c.get_double("beam.v_mip_v", 10.0);
  double t0 = c.get_double("field.t0_nm", 0.0);
  if (t0 <= 0.0) t0 = hologram::t0_for_phase_depth_nm(spec.phase_depth_rad, beam, v_mip);
  const int grid_n = c.get_int("field.grid_n", 2048);
  const double pitch = c.require_double("field.pitch_nm");
  const double camera_nm = c.get_double("simulate.camera_length_nm", 1e9);
  const int max_order = c.get_int("simulate.max_order", 5);
  const bool beam_stop = c.get_bool("simulate.beam_stop", false);

  auto trans = hologram::transmission_function(spec, beam, v_mip, t0, grid_n, pitch);
  auto far = waveopt::fraunhofer(trans, camera_nm);

  oam::OrderBoxOptions obo;
  obo.max_order = max_order;
  const auto orders =
      oam::diffraction_order_efficiencies(far, 0.0, spec.carrier_k_rad_per_nm(), obo);
  {
    std::ofstream ocsv(out / "orders.csv");
    io::CsvWriter w(ocsv);
    w.row({"order", "power_fraction"});
    for (const auto& o : orders) w.row({std::to_string(o.order), fmt_g9(o.power_fraction)});
  }

  const double sep_nm = far.wavelength_nm() * camera_nm / spec.carrier_period_nm;
  const double scale =
      waveopt::write_intensity_pgm16(out / "farfield.pgm", far, beam_stop, 0.5 * sep_nm);
  write_meta(out / "farfield.meta",
             {{"n", std::to_string(far.n)},
              {"pitch_nm", fmt_g9(far.pitch_nm)},
              {"wavelength_pm", fmt_g9(far.wavelength_pm)},
              {"camera_length_nm", fmt_g9(camera_nm)},
              {"intensity_at_65535", fmt_g9(scale)},
              {"beam_stop", beam_stop ? "true" : "false"},
              {"beam_stop_radius_nm", fmt_g9(beam_stop ? 0.5 * sep_nm : 0.0)},
              {"t0_nm", fmt_g9(t0)},
              {"tool_version", tool_version}});

  // OAM spectrum of the +1 order
  const double sep_px = sep_nm / far.pitch_nm;
  int crop_m = 1;
  while (crop_m < sep_px && crop_m < grid_n) crop_m <<= 1;
  auto plus1 = waveopt::crop(far, grid_n / 2 + static_cast<int>(std::lround(sep_px)),
                             grid_n / 2, crop_m);
  const int ell = spec.ell;
  const int width = std::max(10, std::abs(ell) / 2);
  oam::SpectrumOptions so;
  so.n_theta = 1024;
  while (so.n_theta / 2 <= std::abs(ell) + width) so.n_theta *= 2;
  so.center_px = {plus1.n / 2.0, plus1.n / 2.0};
  const auto spectrum = oam::oam_spectrum(plus1, ell - width, ell + width, so);
  {
    std::ofstream scsv(out / "order1_spectrum.csv");
    io::CsvWriter w(scsv);
    w.row({"ell", "power_fraction"});
    for (int l = spectrum.ell_min; l <= spectrum.ell_max; ++l)
      w.row({std::to_string(l), fmt_g9(spectrum.at(l))});
    scsv << "\n";
    w.row({"summary_key", "value"});
    w.row({"mean_oam_hbar", fmt_g9(oam::mean_oam(spectrum))});
    w.row({"range_warning", spectrum.range_warning ? "true" : "false"});
  }
  return 0;
}

// ----------------------------------------------------------------- gouy ----

oam::GouyGeometry geometry_from_config(const Config& c) {
  oam::GouyGeometry g;
  g.beam = beamline::BeamParams::from_voltage(c.get_double("beam.voltage_v", 300000.0));
  g.aperture_z_over_zr = c.get_double("gouy.aperture_z_over_zr", 0.5);
  g.analysis_z_over_zr = c.get_double("gouy.analysis_z_over_zr", 2.0);
  g.grid_n = c.get_int("gouy.grid_n", 2048);
  g.pitch_nm = c.get_double("gouy.pitch_nm", 50.0);
  g.waist_nm = c.get_double("gouy.waist_nm", 3200.0);
  g.edge_azimuth_rad = c.get_double("gouy.edge_azimuth_rad", 0.0);
  g.lens_field_tesla = c.get_double("gouy.lens_field_tesla", 0.0);
  g.ell_ref = c.get_int("gouy.ell_ref", 1000);
  if (c.get_bool("gouy.use_hologram", false)) {
    g.hologram_spec = spec_from_config(c);
    g.v_mip_volt = c.get_double("beam.v_mip_v", 10.0);
  }
  return g;
}

int cmd_gouy(const Config& c, const fs::path& out) {
  const auto geom = geometry_from_config(c);
  std::vector<int> ells = c.get_int_list("gouy.ell_list", {20, 40});
  const int z_steps = c.get_int("gouy.z_steps", 4);
  if (ells.empty()) throw validation_error("gouy.ell_list must not be empty");

  // parity check companion for the first requested ell
  std::vector<int> all_ells = ells;
  const int parity_ell = -ells.front();
  if (std::find(all_ells.begin(), all_ells.end(), parity_ell) == all_ells.end())
    all_ells.push_back(parity_ell);
  std::sort(all_ells.begin(), all_ells.end());

  const auto curve = oam::rotation_curve(all_ells, geom);
  int failures = 0;
  {
    std::ofstream ccsv(out / "curve.csv");
    io::CsvWriter w(ccsv);
    w.row({"ell", "rotation_rad", "z_over_zR", "method"});
    for (const auto& e : curve) {
      if (!e.ok) {
        ++failures;
        w.row({std::to_string(e.ell), "nan", fmt_g9(e.z_over_zr), "error"});
      } else {
        w.row({std::to_string(e.ell), fmt_g9(e.rotation_rad), fmt_g9(e.z_over_zr), e.method});
      }
    }
  }

  // rotation vs z and snapshots for the first requested ell
  std::string first_error;
  try {
    const int ell0 = ells.front();
    oam::GouyRun run = oam::run_gouy_pipeline(ell0, geom);
    {
      std::ofstream zcsv(out / "rotation_vs_z.csv");
      io::CsvWriter w(zcsv);
      w.row({"z_over_zR", "gouy_rad", "larmor_rad"});
      for (int i = 1; i <= z_steps; ++i) {
        const double z = geom.aperture_z_over_zr +
                         (geom.analysis_z_over_zr - geom.aperture_z_over_zr) * i / z_steps;
        const double dz = (z - geom.aperture_z_over_zr) * run.z_r_nm;
        waveopt::PropagationPlan plan(run.before, dz);
        auto f = waveopt::fresnel_propagate(run.before, plan);
        if (geom.lens_field_tesla != 0.0)
          f = waveopt::apply_larmor_rotation(f, geom.lens_field_tesla, dz,
                                             geom.beam.velocity_m_per_s);
        const auto meas = oam::measure_rotation(run.before, f,
                                                oam::default_annuli(run.rim_nm, run.before), z);
        w.row({fmt_g9(z), fmt_g9(meas.gouy_component_rad), fmt_g9(meas.larmor_component_rad)});
      }
    }
    const double scale_b = waveopt::write_intensity_pgm16(out / "before.pgm", run.before);
    const double scale_a = waveopt::write_intensity_pgm16(out / "after.pgm", run.after);

    double parity_sum = 0.0;
    bool parity_ok = false;
    double rot0 = 0.0;
    for (const auto& e : curve) {
      if (e.ell == ell0 && e.ok) rot0 = e.rotation_rad;
    }
    for (const auto& e : curve) {
      if (e.ell == parity_ell && e.ok) {
        parity_sum = e.rotation_rad + rot0;
        parity_ok = true;
      }
    }
    write_meta(out / "summary.txt",
               {{"aperture_z_over_zR", fmt_g9(geom.aperture_z_over_zr)},
                {"analysis_z_over_zR", fmt_g9(geom.analysis_z_over_zr)},
                {"ell_first", std::to_string(ell0)},
                {"rim_nm", fmt_g9(run.rim_nm)},
                {"z_R_nm", fmt_g9(run.z_r_nm)},
                {"gouy_rad", fmt_g9(run.measurement.gouy_component_rad)},
                {"larmor_rad", fmt_g9(run.measurement.larmor_component_rad)},
                {"larmor_expected_rad",
                 fmt_g9(waveopt::larmor_rotation_angle_rad(geom.lens_field_tesla, run.dz_nm,
                                                           geom.beam.velocity_m_per_s))},
                {"parity_ell", std::to_string(parity_ell)},
                {"parity_rotation_sum_rad", parity_ok ? fmt_g9(parity_sum) : "n/a"},
                {"before_intensity_at_65535", fmt_g9(scale_b)},
                {"after_intensity_at_65535", fmt_g9(scale_a)},
                {"curve_failures", std::to_string(failures)},
                {"tool_version", tool_version}});
  } catch (const sampling_error& e) {
    first_error = e.what();
    ++failures;
    write_meta(out / "summary.txt",
               {{"error", first_error}, {"curve_failures", std::to_string(failures)}});
  }
  return failures > 0 ? 3 : 0;
}

// ------------------------------------------------------------------ fit ----

std::vector<oam::CurveEntry> read_curve_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open curve file " + path.string());
  std::vector<oam::CurveEntry> curve;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) break;
    if (header) {
      header = false;
      continue;
    }
    std::istringstream ss(line);
    std::string cell;
    oam::CurveEntry e;
    std::getline(ss, cell, ',');
    e.ell = std::stoi(cell);
    std::getline(ss, cell, ',');
    if (cell == "nan") continue;
    e.rotation_rad = std::stod(cell);
    std::getline(ss, cell, ',');
    e.z_over_zr = std::stod(cell);
    std::getline(ss, cell, ',');
    e.method = cell;
    if (e.method == "error") continue;
    curve.push_back(e);
  }
  return curve;
}

int cmd_fit(const Config& c, const fs::path& out) {
  const double measured = c.require_double("fit.measured_rotation_rad");
  const fs::path curve_path = c.require_str("fit.curve_csv");
  oam::FitOptions fo;
  fo.sigma_theta_rad = c.get_double("fit.sigma_theta_rad", constants::pi / 1024.0);
  const auto curve = read_curve_csv(curve_path);
  const auto fit = oam::fit_mean_oam(measured, curve, fo);
  write_meta(out / "fit_report.txt",
             {{"measured_rotation_rad", fmt_g9(measured)},
              {"L_hat_hbar", fmt_g9(fit.l_hat)},
              {"sigma_hbar", fmt_g9(fit.sigma)},
              {"residual_rad", fmt_g9(fit.residual_rad)},
              {"report", "<L> = (" + fmt_g9(fit.l_hat) + " +- " + fmt_g9(fit.sigma) + ") hbar"},
              {"curve_points", std::to_string(curve.size())},
              {"tool_version", tool_version}});
  return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"electron vortex hologram synthesis and wave-optics toolkit"};
  app.require_subcommand(1);
  app.allow_extras();

  std::string config_path, out_dir;
  std::vector<std::string> sets;
  std::optional<int> tile_size;
  int tile_size_raw = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file");
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--set", sets, "override: section.key=value")->take_all();
    sub->allow_extras();
  };
  CLI::App* synth = app.add_subcommand("synth", "rasterize a hologram pattern");
  synth->add_option("--tile-size", tile_size_raw, "raster tile side in pixels");
  CLI::App* simulate = app.add_subcommand("simulate", "far-field diffraction of a hologram");
  CLI::App* gouy = app.add_subcommand("gouy", "knife-edge rotation pipeline");
  CLI::App* fit = app.add_subcommand("fit", "fit <L> from a rotation curve");
  for (CLI::App* sub : {synth, simulate, gouy, fit}) add_common(sub);

  try {
    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) { // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    Config config = config_path.empty() ? Config{} : Config::parse_file(config_path);
    apply_overrides(config, sets);
    CLI::App* sub = app.get_subcommands().front();
    apply_extras(config, sub->remaining());
    if (synth->parsed() && synth->count("--tile-size") > 0) tile_size = tile_size_raw;

    fs::path out(out_dir);
    fs::create_directories(out);
    int rc = 0;
    if (synth->parsed())
      rc = cmd_synth(config, out, tile_size);
    else if (simulate->parsed())
      rc = cmd_simulate(config, out);
    else if (gouy->parsed())
      rc = cmd_gouy(config, out);
    else if (fit->parsed())
      rc = cmd_fit(config, out);
    write_common_outputs(out, config);
    return rc;
  } catch (const fit_domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const sampling_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace evortex::cli
