// field.hpp - sampled 2D complex wavefunction
#ifndef EVORTEX_FIELD_HPP
#define EVORTEX_FIELD_HPP

#include <complex>
#include <filesystem>
#include <vector>

namespace evortex::waveopt {

/// Square sampled complex field. The grid center sits at index (n/2, n/2);
/// sample (ix, iy) is at x = (ix - n/2) * pitch, y = (iy - n/2) * pitch.
/// n must be a power of two.
struct ComplexField {
  int n = 0;
  double pitch_nm = 0.0;
  double wavelength_pm = 0.0;
  double z_nm = 0.0;
  std::vector<std::complex<double>> samples; // row-major

  ComplexField() = default;
  ComplexField(int n_, double pitch_nm_, double wavelength_pm_, double z_nm_ = 0.0);

  std::complex<double>& at(int ix, int iy) {
    return samples[static_cast<std::size_t>(iy) * n + ix];
  }
  const std::complex<double>& at(int ix, int iy) const {
    return samples[static_cast<std::size_t>(iy) * n + ix];
  }

  double wavelength_nm() const { return wavelength_pm * 1e-3; }
  double x_nm(int ix) const { return (ix - n / 2) * pitch_nm; }
  double y_nm(int iy) const { return (iy - n / 2) * pitch_nm; }
  double half_extent_nm() const { return n / 2 * pitch_nm; }

  /// Total power sum(|u|^2) * pitch^2.
  double total_power() const;

  /// Scales all samples so that total_power() == 1. No-op on a null field.
  void normalize_power();

  /// Complex bilinear interpolation at pixel coordinates; 0 outside the grid.
  std::complex<double> sample_bilinear(double ix, double iy) const;
};

bool is_power_of_two(int n);

/// Throws validation_error unless n is a power of two and pitch > 0.
void validate_grid(int n, double pitch_nm);

/// Extracts an m x m subfield (m a power of two) centered at pixel
/// (cx, cy); out-of-range source pixels read as 0.
ComplexField crop(const ComplexField& f, int cx, int cy, int m);

/// Raw export: a short text header (terminated by "end") followed by
/// n*n little-endian float64 re/im pairs, row-major.
void write_field_raw(const std::filesystem::path& path, const ComplexField& f);
ComplexField read_field_raw(const std::filesystem::path& path);

/// 16-bit PGM of |u|^2, linearly scaled to the intensity maximum.
/// Returns the intensity value mapped to 65535 (recorded in sidecars).
/// Row 0 of the image is the +y edge of the grid.
double write_intensity_pgm16(const std::filesystem::path& path, const ComplexField& f,
                             bool mask_center = false, double mask_radius_nm = 0.0);

} // namespace evortex::waveopt

#endif
