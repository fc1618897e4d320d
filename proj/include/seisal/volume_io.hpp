#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "seisal/core.hpp"
#include "seisal/volume.hpp"

// "seisvol" container: a flat little-endian dump of one volume.
//
//   bytes 0..3   magic "SVOL"
//   u32          version (1)
//   u32 x3       T, X, Y
//   f32          sample interval in ms (0 when unknown)
//   f32 x T*X*Y  samples, t fastest, then x, then y
//
// A JSON sidecar (same basename + ".json") records axis labels and where the
// data came from. It is informational: loading reads only the binary file.

namespace seisal {

namespace detail {

inline void put_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

inline void put_f32le(std::string& out, float f) {
  put_u32le(out, std::bit_cast<std::uint32_t>(f));
}

inline std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace detail

inline std::string sidecar_path(const std::string& svol_path) {
  std::filesystem::path p(svol_path);
  p.replace_extension(".json");
  return p.string();
}

inline void save_svol(const Volume3D& v, const std::string& path,
                      const std::string& provenance = "") {
  std::string buf;
  buf.reserve(20 + v.data.size() * 4);
  buf += "SVOL";
  detail::put_u32le(buf, 1);
  detail::put_u32le(buf, static_cast<std::uint32_t>(v.dims.t));
  detail::put_u32le(buf, static_cast<std::uint32_t>(v.dims.x));
  detail::put_u32le(buf, static_cast<std::uint32_t>(v.dims.y));
  detail::put_f32le(buf, v.sample_interval_ms);
  for (float f : v.data) detail::put_f32le(buf, f);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw parse_error("cannot open " + path + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw parse_error("short write to " + path);
  out.close();

  std::ofstream side(sidecar_path(path), std::ios::trunc);
  if (side) {
    side << "{\n"
         << "  \"format\": \"seisvol\",\n"
         << "  \"version\": 1,\n"
         << "  \"dims\": {\"t\": " << v.dims.t << ", \"x\": " << v.dims.x
         << ", \"y\": " << v.dims.y << "},\n"
         << "  \"sample_interval_ms\": " << v.sample_interval_ms << ",\n"
         << "  \"first_inline\": " << v.first_inline << ",\n"
         << "  \"first_crossline\": " << v.first_crossline << ",\n"
         << "  \"axis_labels\": [\"" << detail::json_escape(v.axis_labels[0])
         << "\", \"" << detail::json_escape(v.axis_labels[1]) << "\", \""
         << detail::json_escape(v.axis_labels[2]) << "\"],\n"
         << "  \"provenance\": \"" << detail::json_escape(provenance)
         << "\"\n}\n";
  }
}

struct SvolLoad {
  Volume3D volume;
  std::uint64_t zeroed_nonfinite = 0;  // payload values sanitized to 0
};

inline SvolLoad load_svol_checked(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 24) throw parse_error(path + ": truncated seisvol header");
  if (std::memcmp(buf.data(), "SVOL", 4) != 0)
    throw parse_error(path + ": bad magic, not a seisvol file");
  const std::uint32_t version = detail::get_u32le(&buf[4]);
  if (version != 1)
    throw parse_error(path + ": unsupported seisvol version " +
                      std::to_string(version));
  SvolLoad r;
  r.volume.dims.t = static_cast<int>(detail::get_u32le(&buf[8]));
  r.volume.dims.x = static_cast<int>(detail::get_u32le(&buf[12]));
  r.volume.dims.y = static_cast<int>(detail::get_u32le(&buf[16]));
  if (r.volume.dims.t <= 0 || r.volume.dims.x <= 0 || r.volume.dims.y <= 0)
    throw parse_error(path + ": non-positive dimensions");
  r.volume.sample_interval_ms =
      std::bit_cast<float>(detail::get_u32le(&buf[20]));
  const std::size_t count = r.volume.dims.count();
  if (buf.size() != 24 + count * 4)
    throw parse_error(path + ": payload size " +
                      std::to_string(buf.size() - 24) + " does not match dims " +
                      r.volume.dims.str());
  r.volume.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    float f = std::bit_cast<float>(detail::get_u32le(&buf[24 + i * 4]));
    if (!std::isfinite(f)) {
      f = 0.0f;
      ++r.zeroed_nonfinite;
    }
    r.volume.data[i] = f;
  }
  return r;
}

inline Volume3D load_svol(const std::string& path) {
  return load_svol_checked(path).volume;
}

// 8-bit binary PGM. Values are taken as already normalized to [0,1];
// anything outside is clamped.
inline void write_pgm(const Slice2D& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw parse_error("cannot open " + path + " for writing");
  out << "P5\n" << s.cols << " " << s.rows << "\n255\n";
  std::vector<unsigned char> px(s.data.size());
  for (std::size_t i = 0; i < s.data.size(); ++i) {
    const double v = std::clamp(static_cast<double>(s.data[i]), 0.0, 1.0);
    px[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(px.data()),
            static_cast<std::streamsize>(px.size()));
  if (!out) throw parse_error("short write to " + path);
}

}  // namespace seisal
