#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "seisal/core.hpp"
#include "seisal/volume.hpp"

// SEG-Y rev1 reader, big-endian throughout. Only 4-byte IBM float (format 1)
// and 4-byte IEEE float (format 5) payloads are accepted; anything else is
// rejected rather than guessed.

namespace seisal {

class ByteSource {
 public:
  virtual ~ByteSource() = default;
  virtual std::size_t size() const = 0;
  // Reads exactly len bytes; throws parse_error on a short read.
  virtual void read_at(std::size_t offset, void* dst, std::size_t len) const = 0;
};

class MemorySource final : public ByteSource {
 public:
  explicit MemorySource(std::vector<unsigned char> bytes)
      : bytes_(std::move(bytes)) {}

  std::size_t size() const override { return bytes_.size(); }

  void read_at(std::size_t offset, void* dst, std::size_t len) const override {
    if (offset + len > bytes_.size())
      throw parse_error("read past end of buffer (offset " +
                        std::to_string(offset) + ", len " +
                        std::to_string(len) + ", size " +
                        std::to_string(bytes_.size()) + ")");
    std::memcpy(dst, bytes_.data() + offset, len);
  }

 private:
  std::vector<unsigned char> bytes_;
};

class FileSource final : public ByteSource {
 public:
  explicit FileSource(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw parse_error("cannot open " + path);
    in_.seekg(0, std::ios::end);
    size_ = static_cast<std::size_t>(in_.tellg());
  }

  std::size_t size() const override { return size_; }

  void read_at(std::size_t offset, void* dst, std::size_t len) const override {
    if (offset + len > size_)
      throw parse_error(path_ + ": truncated (wanted " + std::to_string(len) +
                        " bytes at offset " + std::to_string(offset) + ")");
    in_.seekg(static_cast<std::streamoff>(offset));
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(len));
    if (in_.gcount() != static_cast<std::streamsize>(len))
      throw parse_error(path_ + ": short read at offset " +
                        std::to_string(offset));
  }

 private:
  std::string path_;
  mutable std::ifstream in_;
  std::size_t size_ = 0;
};

namespace detail {

inline std::uint16_t be_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

inline std::uint32_t be_u32(const unsigned char* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) |
         static_cast<std::uint32_t>(p[3]);
}

inline std::int32_t be_i32(const unsigned char* p) {
  return static_cast<std::int32_t>(be_u32(p));
}

}  // namespace detail

struct SegyBinaryHeader {
  std::uint16_t samples_per_trace = 0;
  std::uint16_t sample_interval_us = 0;
  std::uint16_t data_format_code = 0;
};

struct SegyOptions {
  int inline_byte = 189;     // 1-based trace-header position, 4-byte int
  int crossline_byte = 193;  // 1-based trace-header position, 4-byte int
  bool fill_missing = false;

  bool operator==(const SegyOptions&) const = default;
};

constexpr std::size_t kSegyTextSize = 3200;
constexpr std::size_t kSegyBinSize = 400;
constexpr std::size_t kSegyTraceHeaderSize = 240;

// Textual header comes back as raw EBCDIC bytes, preserved verbatim.
inline std::pair<std::array<unsigned char, kSegyTextSize>, SegyBinaryHeader>
parse_headers(const ByteSource& src) {
  if (src.size() < kSegyTextSize + kSegyBinSize)
    throw parse_error("truncated stream: " + std::to_string(src.size()) +
                      " bytes, need at least 3600 for SEG-Y headers");
  std::array<unsigned char, kSegyTextSize> text;
  src.read_at(0, text.data(), text.size());

  unsigned char bin[kSegyBinSize];
  src.read_at(kSegyTextSize, bin, sizeof bin);
  SegyBinaryHeader h;
  // 1-based file positions 3217, 3221 and 3225 relative to the 3200-byte
  // textual header.
  h.sample_interval_us = detail::be_u16(&bin[16]);
  h.samples_per_trace = detail::be_u16(&bin[20]);
  h.data_format_code = detail::be_u16(&bin[24]);

  if (h.data_format_code != 1 && h.data_format_code != 5)
    throw parse_error("unsupported data format code " +
                      std::to_string(h.data_format_code) +
                      " (only 1 = IBM float and 5 = IEEE float)");
  if (h.samples_per_trace == 0)
    throw parse_error("binary header declares zero samples per trace");
  return {text, h};
}

// IBM System/360 hexadecimal float: sign bit, 7-bit base-16 exponent biased
// by 64, 24-bit fraction. Exact in double, then rounded once to float.
inline float ibm_to_ieee(std::uint32_t word) {
  const std::uint32_t frac = word & 0x00FFFFFFu;
  if (frac == 0) return 0.0f;
  const int exponent = static_cast<int>((word >> 24) & 0x7Fu) - 64;
  const double magnitude = std::ldexp(static_cast<double>(frac),
                                      4 * exponent - 24);
  return static_cast<float>(word & 0x80000000u ? -magnitude : magnitude);
}

struct SegyGeometry {
  std::vector<int> inlines;     // sorted, unique
  std::vector<int> crosslines;  // sorted, unique
  // data offset of trace (inline index, crossline index), -1 when absent;
  // crossline index varies fastest
  std::vector<std::int64_t> trace_data_offset;
  std::uint16_t samples = 0;
  std::uint64_t trace_count = 0;

  std::int64_t offset_at(std::size_t il_idx, std::size_t xl_idx) const {
    return trace_data_offset[il_idx * crosslines.size() + xl_idx];
  }
};

// Single pass over the trace headers: collects the inline/crossline grid and
// where every trace's samples start. The grid must be complete unless
// fill_missing is set; duplicates are always an error.
inline SegyGeometry scan_geometry(const ByteSource& src,
                                  const SegyBinaryHeader& bin,
                                  const SegyOptions& opt = {}) {
  if (opt.inline_byte < 1 || opt.inline_byte + 3 > 240 ||
      opt.crossline_byte < 1 || opt.crossline_byte + 3 > 240)
    throw config_error("inline/crossline byte positions must fit in the "
                       "240-byte trace header");

  std::uint16_t samples = bin.samples_per_trace;
  std::map<std::pair<int, int>, std::int64_t> traces;  // (il, xl) -> offset
  std::size_t pos = kSegyTextSize + kSegyBinSize;
  unsigned char th[kSegyTraceHeaderSize];
  bool first = true;
  while (pos < src.size()) {
    if (pos + kSegyTraceHeaderSize > src.size())
      throw parse_error("truncated trace header at offset " +
                        std::to_string(pos));
    src.read_at(pos, th, sizeof th);
    const int il = detail::be_i32(&th[opt.inline_byte - 1]);
    const int xl = detail::be_i32(&th[opt.crossline_byte - 1]);
    const std::uint16_t ns = detail::be_u16(&th[114]);
    if (first) {
      if (ns != 0 && ns != samples) samples = ns;  // per-trace override
      first = false;
    } else if (ns != 0 && ns != samples) {
      throw parse_error("trace at offset " + std::to_string(pos) +
                        " declares " + std::to_string(ns) +
                        " samples, expected " + std::to_string(samples));
    }
    const std::size_t data = pos + kSegyTraceHeaderSize;
    const std::size_t data_len = static_cast<std::size_t>(samples) * 4;
    if (data + data_len > src.size())
      throw parse_error("truncated trace data at offset " +
                        std::to_string(data));
    if (!traces.emplace(std::pair{il, xl},
                        static_cast<std::int64_t>(data)).second)
      throw parse_error("duplicate trace for inline " + std::to_string(il) +
                        ", crossline " + std::to_string(xl));
    pos = data + data_len;
  }
  if (traces.empty()) throw parse_error("file contains no traces");

  SegyGeometry g;
  g.samples = samples;
  g.trace_count = traces.size();
  for (const auto& [key, off] : traces) {
    if (g.inlines.empty() || g.inlines.back() != key.first)
      g.inlines.push_back(key.first);
  }
  {
    std::vector<int> xs;
    for (const auto& [key, off] : traces) xs.push_back(key.second);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    g.crosslines = std::move(xs);
  }

  g.trace_data_offset.assign(g.inlines.size() * g.crosslines.size(), -1);
  std::map<int, std::size_t> il_idx, xl_idx;
  for (std::size_t i = 0; i < g.inlines.size(); ++i) il_idx[g.inlines[i]] = i;
  for (std::size_t i = 0; i < g.crosslines.size(); ++i)
    xl_idx[g.crosslines[i]] = i;
  for (const auto& [key, off] : traces)
    g.trace_data_offset[il_idx[key.first] * g.crosslines.size() +
                        xl_idx[key.second]] = off;

  if (!opt.fill_missing) {
    for (std::size_t i = 0; i < g.trace_data_offset.size(); ++i)
      if (g.trace_data_offset[i] < 0) {
        const std::size_t il = i / g.crosslines.size();
        const std::size_t xl = i % g.crosslines.size();
        throw parse_error(
            "incomplete grid: missing trace for inline " +
            std::to_string(g.inlines[il]) + ", crossline " +
            std::to_string(g.crosslines[xl]) +
            " (pass fill-missing to zero-fill)");
      }
  }
  return g;
}

struct SegyLoadReport {
  std::uint64_t trace_count = 0;
  int inline_min = 0, inline_max = 0;
  int crossline_min = 0, crossline_max = 0;
  std::uint16_t samples_per_trace = 0;
  std::uint16_t data_format_code = 0;
  float sample_interval_ms = 0.0f;
  std::uint64_t zeroed_samples = 0;  // non-finite or |v| > 1e30
  std::uint64_t filled_traces = 0;   // zero-filled grid holes
};

struct SegyLoadResult {
  Volume3D volume;
  SegyLoadReport report;
  std::array<unsigned char, kSegyTextSize> textual_header;
};

inline SegyLoadResult load_segy(const ByteSource& src,
                                const SegyOptions& opt = {}) {
  auto [text, bin] = parse_headers(src);
  const SegyGeometry geo = scan_geometry(src, bin, opt);

  SegyLoadResult res;
  res.textual_header = text;
  res.report.trace_count = geo.trace_count;
  res.report.inline_min = geo.inlines.front();
  res.report.inline_max = geo.inlines.back();
  res.report.crossline_min = geo.crosslines.front();
  res.report.crossline_max = geo.crosslines.back();
  res.report.samples_per_trace = geo.samples;
  res.report.data_format_code = bin.data_format_code;
  res.report.sample_interval_ms = bin.sample_interval_us / 1000.0f;

  Volume3D& v = res.volume;
  v.dims = {static_cast<int>(geo.samples),
            static_cast<int>(geo.crosslines.size()),
            static_cast<int>(geo.inlines.size())};
  v.data.assign(v.dims.count(), 0.0f);
  v.sample_interval_ms = res.report.sample_interval_ms;
  v.first_inline = geo.inlines.front();
  v.first_crossline = geo.crosslines.front();
  v.axis_labels = {"time", "crossline", "inline"};

  const bool ibm = bin.data_format_code == 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(geo.samples) * 4);
  for (std::size_t y = 0; y < geo.inlines.size(); ++y)
    for (std::size_t x = 0; x < geo.crosslines.size(); ++x) {
      const std::int64_t off = geo.offset_at(y, x);
      if (off < 0) {
        ++res.report.filled_traces;
        continue;  // volume is pre-zeroed
      }
      src.read_at(static_cast<std::size_t>(off), raw.data(), raw.size());
      float* dst = &v.data[v.index(0, static_cast<int>(x),
                                   static_cast<int>(y))];
      for (std::size_t s = 0; s < geo.samples; ++s) {
        const std::uint32_t w = detail::be_u32(&raw[s * 4]);
        float f = ibm ? ibm_to_ieee(w) : std::bit_cast<float>(w);
        if (!std::isfinite(f) || std::abs(f) > 1e30f) {
          f = 0.0f;
          ++res.report.zeroed_samples;
        }
        dst[s] = f;
      }
    }
  return res;
}

inline SegyLoadResult load_segy(const std::string& path,
                                const SegyOptions& opt = {}) {
  FileSource src(path);
  return load_segy(src, opt);
}

}  // namespace seisal
