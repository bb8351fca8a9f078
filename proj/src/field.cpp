#include "evortex/field.hpp"

#include "evortex/errors.hpp"
#include "evortex/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace evortex::waveopt {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_grid(int n, double pitch_nm) {
  if (!is_power_of_two(n)) throw validation_error("grid side must be a power of two");
  if (!(pitch_nm > 0.0)) throw validation_error("grid pitch must be > 0");
}

ComplexField::ComplexField(int n_, double pitch_nm_, double wavelength_pm_, double z_nm_)
    : n(n_), pitch_nm(pitch_nm_), wavelength_pm(wavelength_pm_), z_nm(z_nm_),
      samples(static_cast<std::size_t>(n_) * n_) {
  validate_grid(n_, pitch_nm_);
}

double ComplexField::total_power() const {
  double acc = 0.0;
  for (const auto& u : samples) acc += std::norm(u);
  return acc * pitch_nm * pitch_nm;
}

void ComplexField::normalize_power() {
  const double p = total_power();
  if (p <= 0.0) return;
  const double s = 1.0 / std::sqrt(p);
  for (auto& u : samples) u *= s;
}

std::complex<double> ComplexField::sample_bilinear(double ix, double iy) const {
  const int x0 = static_cast<int>(std::floor(ix));
  const int y0 = static_cast<int>(std::floor(iy));
  const double fx = ix - x0;
  const double fy = iy - y0;
  auto val = [&](int x, int y) -> std::complex<double> {
    if (x < 0 || x >= n || y < 0 || y >= n) return {0.0, 0.0};
    return at(x, y);
  };
  return val(x0, y0) * ((1 - fx) * (1 - fy)) + val(x0 + 1, y0) * (fx * (1 - fy)) +
         val(x0, y0 + 1) * ((1 - fx) * fy) + val(x0 + 1, y0 + 1) * (fx * fy);
}

ComplexField crop(const ComplexField& f, int cx, int cy, int m) {
  if (!is_power_of_two(m)) throw validation_error("crop size must be a power of two");
  ComplexField out(m, f.pitch_nm, f.wavelength_pm, f.z_nm);
  for (int y = 0; y < m; ++y) {
    const int sy = cy - m / 2 + y;
    if (sy < 0 || sy >= f.n) continue;
    for (int x = 0; x < m; ++x) {
      const int sx = cx - m / 2 + x;
      if (sx < 0 || sx >= f.n) continue;
      out.at(x, y) = f.at(sx, sy);
    }
  }
  return out;
}

void write_field_raw(const std::filesystem::path& path, const ComplexField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "evortex-field 1\n"
      << "n " << f.n << "\n"
      << "pitch_nm " << io::fmt_g17(f.pitch_nm) << "\n"
      << "wavelength_pm " << io::fmt_g17(f.wavelength_pm) << "\n"
      << "z_nm " << io::fmt_g17(f.z_nm) << "\n"
      << "end\n";
  static_assert(sizeof(std::complex<double>) == 16);
  out.write(reinterpret_cast<const char*>(f.samples.data()),
            static_cast<std::streamsize>(f.samples.size() * sizeof(std::complex<double>)));
}

ComplexField read_field_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "evortex-field 1") throw validation_error("bad field file magic");
  int n = 0;
  double pitch = 0, wl = 0, z = 0;
  while (std::getline(in, line) && line != "end") {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "n") ss >> n;
    else if (key == "pitch_nm") ss >> pitch;
    else if (key == "wavelength_pm") ss >> wl;
    else if (key == "z_nm") ss >> z;
  }
  ComplexField f(n, pitch, wl, z);
  in.read(reinterpret_cast<char*>(f.samples.data()),
          static_cast<std::streamsize>(f.samples.size() * sizeof(std::complex<double>)));
  if (!in) throw std::runtime_error("truncated field file " + path.string());
  return f;
}

double write_intensity_pgm16(const std::filesystem::path& path, const ComplexField& f,
                             bool mask_center, double mask_radius_nm) {
  double imax = 0.0;
  std::vector<double> intensity(f.samples.size());
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    intensity[i] = std::norm(f.samples[i]);
  }
  if (mask_center) {
    const double r2 = mask_radius_nm * mask_radius_nm;
    for (int iy = 0; iy < f.n; ++iy)
      for (int ix = 0; ix < f.n; ++ix) {
        const double x = f.x_nm(ix), y = f.y_nm(iy);
        if (x * x + y * y <= r2) intensity[static_cast<std::size_t>(iy) * f.n + ix] = 0.0;
      }
  }
  for (double v : intensity) imax = std::max(imax, v);
  const double scale = imax > 0.0 ? 65535.0 / imax : 0.0;
  std::vector<std::uint16_t> pix(intensity.size());
  // flip rows: image row 0 is +y
  for (int iy = 0; iy < f.n; ++iy) {
    const int src = f.n - 1 - iy;
    for (int ix = 0; ix < f.n; ++ix) {
      const double v = intensity[static_cast<std::size_t>(src) * f.n + ix] * scale;
      pix[static_cast<std::size_t>(iy) * f.n + ix] =
          static_cast<std::uint16_t>(v < 0 ? 0 : (v > 65535 ? 65535 : std::lround(v)));
    }
  }
  io::write_pgm16(path, f.n, f.n, pix.data());
  return imax;
}

} // namespace evortex::waveopt
