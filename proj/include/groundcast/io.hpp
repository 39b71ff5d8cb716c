#pragma once

// File plumbing: binary PPM/PGM images, deterministic number formatting for
// JSON/CSV emission, and whole-file read/write helpers. Writers are byte
// deterministic: fixed header layout, fixed field order, and %.17g for reals
// so round trips lose nothing.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "groundcast/common.hpp"
#include "groundcast/render.hpp"

namespace groundcast {

inline std::string format_real(double v) {
  if (v == 0.0) v = 0.0;  // collapse negative zero so text round trips stay stable
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Err::io_error, "cannot open for writing: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Err::io_error, "short write: " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::io_error, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(Err::io_error, "read failed: " + path);
  return ss.str();
}

inline void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) fail(Err::io_error, "cannot create directory: " + path);
}

// --- PPM (P6) grayscale-as-RGB images and PGM (P5) masks -------------------

inline std::string encode_ppm(const Image& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(img.width) * img.height * 3);
  for (std::uint8_t g : img.pixels) {
    out.push_back(static_cast<char>(g));
    out.push_back(static_cast<char>(g));
    out.push_back(static_cast<char>(g));
  }
  return out;
}

inline std::string encode_pgm(const Mask& mask) {
  std::string out =
      "P5\n" + std::to_string(mask.width) + " " + std::to_string(mask.height) + "\n255\n";
  out.reserve(out.size() + mask.bits.size());
  for (std::uint8_t b : mask.bits) out.push_back(static_cast<char>(b ? 255 : 0));
  return out;
}

namespace detail {

// Reads the three header fields after the magic, skipping whitespace and
// '#' comment lines, and returns the offset of the first payload byte.
inline std::size_t parse_netpbm_header(const std::string& data, const char* magic, int& width,
                                       int& height, const std::string& path) {
  if (data.size() < 2 || data[0] != magic[0] || data[1] != magic[1])
    fail(Err::parse_error, path + ": expected " + magic + " header");
  std::size_t pos = 2;
  long fields[3];
  for (long& field : fields) {
    while (pos < data.size()) {
      if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    std::size_t end = pos;
    while (end < data.size() && std::isdigit(static_cast<unsigned char>(data[end]))) ++end;
    if (end == pos) fail(Err::parse_error, path + ": malformed header");
    field = std::stol(data.substr(pos, end - pos));
    pos = end;
  }
  if (fields[0] <= 0 || fields[1] <= 0 || fields[2] != 255)
    fail(Err::parse_error, path + ": unsupported dimensions or maxval");
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos])))
    fail(Err::parse_error, path + ": missing header terminator");
  width = static_cast<int>(fields[0]);
  height = static_cast<int>(fields[1]);
  return pos + 1;
}

}  // namespace detail

inline Image decode_ppm(const std::string& data, const std::string& path = "<ppm>") {
  int w = 0, h = 0;
  const std::size_t off = detail::parse_netpbm_header(data, "P6", w, h, path);
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (data.size() - off < need) fail(Err::parse_error, path + ": truncated pixel data");
  Image img(w, h);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    img.pixels[i] = static_cast<std::uint8_t>(data[off + i * 3]);
  return img;
}

inline Mask decode_pgm(const std::string& data, const std::string& path = "<pgm>") {
  int w = 0, h = 0;
  const std::size_t off = detail::parse_netpbm_header(data, "P5", w, h, path);
  const std::size_t need = static_cast<std::size_t>(w) * h;
  if (data.size() - off < need) fail(Err::parse_error, path + ": truncated pixel data");
  Mask mask(w, h);
  for (std::size_t i = 0; i < mask.bits.size(); ++i)
    mask.bits[i] = data[off + i] != 0 ? 1 : 0;
  return mask;
}

inline void write_ppm(const std::string& path, const Image& img) { write_file(path, encode_ppm(img)); }
inline Image read_ppm(const std::string& path) { return decode_ppm(read_file(path), path); }
inline void write_pgm(const std::string& path, const Mask& mask) { write_file(path, encode_pgm(mask)); }
inline Mask read_pgm(const std::string& path) { return decode_pgm(read_file(path), path); }

// --- CSV -------------------------------------------------------------------

// Rows of already-formatted cells; the writer only supplies layout. Cells in
// this project never contain commas or quotes, so no escaping dialect.
inline std::string encode_csv(const std::vector<std::string>& header,
                              const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out.push_back(',');
    out += header[i];
  }
  out.push_back('\n');
  for (const auto& row : rows) {
    if (row.size() != header.size()) fail(Err::schema_error, "csv row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      out += row[i];
    }
    out.push_back('\n');
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    fail(Err::schema_error, "csv missing column: " + name);
  }
};

inline CsvTable decode_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != table.header.size())
        fail(Err::schema_error, "csv row width does not match header");
      table.rows.push_back(std::move(cells));
    }
  }
  if (first) fail(Err::schema_error, "csv has no header row");
  return table;
}

}  // namespace groundcast
