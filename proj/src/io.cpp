#include "evortex/io.hpp"

#include "evortex/errors.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace evortex::io {

std::string fmt_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt_g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void Fnv64::update(const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint64_t h = state_;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  state_ = h;
}

std::string Fnv64::hex() const {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

PbmWriter::PbmWriter(std::ostream& out, int width, int height)
    : out_(out), width_(width), height_(height), packed_((width + 7) / 8) {
  if (width <= 0 || height <= 0) throw validation_error("PBM dimensions must be positive");
  out_ << "P4\n" << width_ << " " << height_ << "\n";
}

void PbmWriter::write_row(const std::uint8_t* levels) {
  if (rows_ >= height_) throw validation_error("PBM row overflow");
  std::memset(packed_.data(), 0, packed_.size());
  for (int x = 0; x < width_; ++x)
    if (levels[x]) packed_[x >> 3] |= static_cast<std::uint8_t>(0x80u >> (x & 7));
  out_.write(reinterpret_cast<const char*>(packed_.data()),
             static_cast<std::streamsize>(packed_.size()));
  hash_.update(packed_.data(), packed_.size());
  ++rows_;
}

Pgm8Writer::Pgm8Writer(std::ostream& out, int width, int height)
    : out_(out), width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw validation_error("PGM dimensions must be positive");
  out_ << "P5\n" << width_ << " " << height_ << "\n255\n";
}

void Pgm8Writer::write_row(const std::uint8_t* levels) {
  if (rows_ >= height_) throw validation_error("PGM row overflow");
  out_.write(reinterpret_cast<const char*>(levels), width_);
  hash_.update(levels, static_cast<std::size_t>(width_));
  ++rows_;
}

void write_pgm16(const std::filesystem::path& path, int width, int height,
                 const std::uint16_t* samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "P5\n" << width << " " << height << "\n65535\n";
  std::vector<std::uint8_t> row(static_cast<std::size_t>(width) * 2);
  for (int y = 0; y < height; ++y) {
    const std::uint16_t* src = samples + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      row[2 * x] = static_cast<std::uint8_t>(src[x] >> 8);
      row[2 * x + 1] = static_cast<std::uint8_t>(src[x] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ",";
    out_ << cells[i];
  }
  out_ << "\n";
}

void write_kv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

} // namespace evortex::io
