#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scatmaxp/error.hpp"
#include "scatmaxp/grid.hpp"

namespace scatmaxp::io {

namespace detail {

inline std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

inline void put_double(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  bits = to_little_endian(bits);
  char bytes[8];
  std::memcpy(bytes, &bits, 8);
  out.append(bytes, 8);
}

inline double get_double(const char* bytes) {
  std::uint64_t bits;
  std::memcpy(&bits, bytes, 8);
  bits = to_little_endian(bits);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace detail

/// SGRID: one text header line
///   SGRID d origin... side_lengths... samples...
/// followed by (re, im) little-endian float64 pairs in row-major order.
inline std::string encode_sgrid(const SignalGrid& f) {
  const Plate& p = f.plate();
  std::string out = "SGRID " + std::to_string(p.dim());
  for (int i = 0; i < p.dim(); ++i) out += ' ' + detail::num17(p.origin()[i]);
  for (int i = 0; i < p.dim(); ++i) out += ' ' + detail::num17(p.side_lengths()[i]);
  for (int i = 0; i < p.dim(); ++i) out += ' ' + std::to_string(p.extent(i));
  out += '\n';
  out.reserve(out.size() + 16 * f.size());
  for (const cplx& v : f.values()) {
    detail::put_double(out, v.real());
    detail::put_double(out, v.imag());
  }
  return out;
}

inline SignalGrid decode_sgrid(const std::string& bytes) {
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string::npos || bytes.compare(0, 6, "SGRID ") != 0) throw Error("not an SGRID stream");
  std::istringstream header(bytes.substr(6, eol - 6));
  int dim = 0;
  if (!(header >> dim) || dim < 1 || dim > kMaxDim) throw Error("SGRID header has an invalid dimension");
  Vec origin{0.0, 0.0}, sides{1.0, 1.0};
  Extents samples{1, 1};
  for (int i = 0; i < dim; ++i)
    if (!(header >> origin[i])) throw Error("SGRID header is missing origin values");
  for (int i = 0; i < dim; ++i)
    if (!(header >> sides[i])) throw Error("SGRID header is missing side lengths");
  for (int i = 0; i < dim; ++i)
    if (!(header >> samples[i])) throw Error("SGRID header is missing sample counts");
  std::string extra;
  if (header >> extra) throw Error("SGRID header has trailing fields");
  Plate plate(dim, origin, sides, samples);
  const std::size_t expected = plate.sample_count() * 16;
  if (bytes.size() - eol - 1 != expected)
    throw Error("SGRID payload has " + std::to_string(bytes.size() - eol - 1) + " bytes, expected " +
                std::to_string(expected));
  std::vector<cplx> values(plate.sample_count());
  const char* data = bytes.data() + eol + 1;
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = {detail::get_double(data + 16 * i), detail::get_double(data + 16 * i + 8)};
  return SignalGrid(plate, std::move(values));
}

inline void write_sgrid(const std::filesystem::path& path, const SignalGrid& f) {
  detail::write_file(path, encode_sgrid(f));
}

inline SignalGrid read_sgrid(const std::filesystem::path& path) {
  try {
    return decode_sgrid(detail::read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

/// Binary PGM (P5, maxval 255) as a real signal on [0,1]^2, values scaled
/// to [0,1]. Image rows map to axis 0.
inline SignalGrid decode_pgm(const std::string& bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() {
    for (;;) {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) throw Error("truncated PGM header");
    return bytes.substr(start, pos - start);
  };
  if (next_token() != "P5") throw Error("only binary PGM (P5) is supported");
  std::size_t width = 0, height = 0, maxval = 0;
  try {
    width = std::stoul(next_token());
    height = std::stoul(next_token());
    maxval = std::stoul(next_token());
  } catch (const std::logic_error&) {
    throw Error("malformed PGM header");
  }
  if (maxval != 255) throw Error("PGM maxval must be 255, got " + std::to_string(maxval));
  if (width == 0 || height == 0) throw Error("PGM image is empty");
  ++pos;  // single whitespace before the raster
  if (bytes.size() < pos + width * height) throw Error("PGM raster is truncated");
  std::vector<cplx> values(width * height);
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = static_cast<double>(static_cast<unsigned char>(bytes[pos + i])) / 255.0;
  return SignalGrid(Plate::unit_square(height, width), std::move(values));
}

inline std::string encode_pgm(const SignalGrid& f) {
  const Plate& p = f.plate();
  if (p.dim() != 2) throw Error("PGM output needs a 2D signal");
  std::string out = "P5\n" + std::to_string(p.extent(1)) + ' ' + std::to_string(p.extent(0)) + "\n255\n";
  for (const cplx& v : f.values()) {
    const double x = std::clamp(v.real(), 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(x * 255.0))));
  }
  return out;
}

inline SignalGrid read_pgm(const std::filesystem::path& path) {
  try {
    return decode_pgm(detail::read_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

/// Reads a signal from .pgm or SGRID, choosing by extension (.pgm) or magic.
inline SignalGrid read_signal(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file(path);
  try {
    if (bytes.compare(0, 2, "P5") == 0) return decode_pgm(bytes);
    return decode_sgrid(bytes);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

/// Decimal with 17 significant digits; round-trips any float64.
inline std::string format_number(double v) { return detail::num17(v); }

}  // namespace scatmaxp::io
