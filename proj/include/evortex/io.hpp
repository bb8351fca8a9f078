// io.hpp - file formats: binary PBM/PGM, CSV, key/value metadata, raw fields
#ifndef EVORTEX_IO_HPP
#define EVORTEX_IO_HPP

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace evortex::io {

/// %.9g formatting used for every float written to CSV and reports.
std::string fmt_g9(double v);
/// %.17g formatting for metadata values that must round-trip exactly.
std::string fmt_g17(double v);

/// Streaming FNV-1a 64-bit hash.
class Fnv64 {
public:
  void update(const void* data, std::size_t n);
  std::uint64_t digest() const { return state_; }
  std::string hex() const;

private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

/// Streaming binary PBM (magic P4) writer. Rows are packed MSB-first and
/// padded to a byte boundary; level 1 maps to a set bit (black).
class PbmWriter {
public:
  PbmWriter(std::ostream& out, int width, int height);
  void write_row(const std::uint8_t* levels);
  int rows_written() const { return rows_; }
  std::uint64_t content_hash() const { return hash_.digest(); }
  std::string content_hash_hex() const { return hash_.hex(); }

private:
  std::ostream& out_;
  int width_, height_, rows_ = 0;
  std::vector<std::uint8_t> packed_;
  Fnv64 hash_;
};

/// Streaming binary PGM (magic P5, maxval 255) writer, one byte per pixel.
class Pgm8Writer {
public:
  Pgm8Writer(std::ostream& out, int width, int height);
  void write_row(const std::uint8_t* levels);
  int rows_written() const { return rows_; }
  std::uint64_t content_hash() const { return hash_.digest(); }
  std::string content_hash_hex() const { return hash_.hex(); }

private:
  std::ostream& out_;
  int width_, height_, rows_ = 0;
  Fnv64 hash_;
};

/// 16-bit binary PGM (maxval 65535). Samples are written most significant
/// byte first as the PGM format requires.
void write_pgm16(const std::filesystem::path& path, int width, int height,
                 const std::uint16_t* samples);

/// CSV writer: header row, LF line endings, floats preformatted by caller.
class CsvWriter {
public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& cells);

private:
  std::ostream& out_;
};

/// key = value metadata lines (one per pair), used for sidecar files.
void write_kv(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv);

} // namespace evortex::io

#endif
