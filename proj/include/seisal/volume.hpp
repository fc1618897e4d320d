#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seisal/core.hpp"

namespace seisal {

// Dense scalar field over a (t, x, y) grid, float32 samples. Storage order:
// t varies fastest, then x, then y, i.e. flat = t + T*(x + X*y). A trace is
// therefore contiguous, matching how trace-oriented formats deliver data.
struct Volume3D {
  Dims dims;
  std::vector<float> data;

  float sample_interval_ms = 0.0f;  // 0 when unknown
  int first_inline = 0;
  int first_crossline = 0;
  std::array<std::string, 3> axis_labels{"time", "crossline", "inline"};

  Volume3D() = default;
  Volume3D(Dims d, float fill = 0.0f) : dims(d), data(d.count(), fill) {}

  std::size_t index(int t, int x, int y) const {
    return static_cast<std::size_t>(t) +
           static_cast<std::size_t>(dims.t) *
               (static_cast<std::size_t>(x) +
                static_cast<std::size_t>(dims.x) * static_cast<std::size_t>(y));
  }

  float at(int t, int x, int y) const { return data[index(t, x, y)]; }
  float& at(int t, int x, int y) { return data[index(t, x, y)]; }

  bool all_finite() const {
    for (float v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

struct TileOrigin {
  int t = 0;
  int x = 0;
  int y = 0;
  bool operator==(const TileOrigin&) const = default;
};

// Plan of overlapped n^3 windows covering a volume. Origins advance by
// `stride` per axis and the last window per axis is clamped onto the
// boundary, so every voxel is covered at least once. Origins are stored
// y-major (y slowest, t fastest), which fixes the accumulation order.
struct TileGrid {
  Dims dims;
  int n = 0;
  int stride = 0;
  std::vector<TileOrigin> origins;
  std::vector<std::uint32_t> coverage;  // per voxel, Volume3D layout
};

inline std::vector<int> tile_axis_origins(int extent, int n, int stride) {
  std::vector<int> o;
  for (int p = 0; p + n <= extent; p += stride) o.push_back(p);
  if (o.empty() || o.back() + n < extent) o.push_back(extent - n);
  return o;
}

inline TileGrid tile_plan(Dims dims, int n, int stride) {
  if (n < 4)
    throw config_error("cube side must be at least 4, got " + std::to_string(n));
  if (n > dims.t || n > dims.x || n > dims.y)
    throw config_error("cube side " + std::to_string(n) +
                       " exceeds volume dims " + dims.str());
  if (stride < 1 || 2 * stride > n)
    throw config_error("stride " + std::to_string(stride) +
                       " breaks the >50% overlap rule (need 1 <= stride <= " +
                       std::to_string(n / 2) + " for n=" + std::to_string(n) +
                       ")");

  TileGrid g;
  g.dims = dims;
  g.n = n;
  g.stride = stride;

  const auto ot = tile_axis_origins(dims.t, n, stride);
  const auto ox = tile_axis_origins(dims.x, n, stride);
  const auto oy = tile_axis_origins(dims.y, n, stride);
  g.origins.reserve(ot.size() * ox.size() * oy.size());
  for (int y : oy)
    for (int x : ox)
      for (int t : ot) g.origins.push_back({t, x, y});

  g.coverage.assign(dims.count(), 0);
  for (const TileOrigin& o : g.origins)
    for (int y = o.y; y < o.y + n; ++y)
      for (int x = o.x; x < o.x + n; ++x) {
        std::uint32_t* row = &g.coverage[static_cast<std::size_t>(y) * dims.x *
                                             dims.t +
                                         static_cast<std::size_t>(x) * dims.t];
        for (int t = o.t; t < o.t + n; ++t) ++row[t];
      }
  return g;
}

// Collects per-tile contributions and averages overlaps away: each voxel
// ends up with the plain mean of every tile value written onto it. Sums are
// kept in double so the result is independent of how tiles are grouped.
class TileAccumulator {
 public:
  explicit TileAccumulator(Dims dims)
      : dims_(dims), sum_(dims.count(), 0.0), hits_(dims.count(), 0) {}

  // values: n^3 scalars in tile-local layout (t fastest).
  void add_tile(TileOrigin o, int n, std::span<const double> values) {
    check_tile(o, n);
    if (values.size() != static_cast<std::size_t>(n) * n * n)
      throw std::invalid_argument("tile payload size mismatch");
    std::size_t v = 0;
    for (int y = o.y; y < o.y + n; ++y)
      for (int x = o.x; x < o.x + n; ++x) {
        const std::size_t base = idx(o.t, x, y);
        for (int t = 0; t < n; ++t, ++v) {
          sum_[base + t] += values[v];
          ++hits_[base + t];
        }
      }
  }

  // Splats one scalar across the whole tile footprint.
  void add_tile_constant(TileOrigin o, int n, double value) {
    check_tile(o, n);
    for (int y = o.y; y < o.y + n; ++y)
      for (int x = o.x; x < o.x + n; ++x) {
        const std::size_t base = idx(o.t, x, y);
        for (int t = 0; t < n; ++t) {
          sum_[base + t] += value;
          ++hits_[base + t];
        }
      }
  }

  // Coverage-averaged result. Voxels no tile touched stay 0.
  Volume3D normalized() const {
    Volume3D out(dims_);
    for (std::size_t i = 0; i < sum_.size(); ++i)
      if (hits_[i]) out.data[i] = static_cast<float>(sum_[i] / hits_[i]);
    return out;
  }

  const std::vector<std::uint32_t>& hits() const { return hits_; }

 private:
  std::size_t idx(int t, int x, int y) const {
    return static_cast<std::size_t>(t) +
           static_cast<std::size_t>(dims_.t) *
               (static_cast<std::size_t>(x) +
                static_cast<std::size_t>(dims_.x) * static_cast<std::size_t>(y));
  }

  void check_tile(TileOrigin o, int n) const {
    if (o.t < 0 || o.x < 0 || o.y < 0 || o.t + n > dims_.t ||
        o.x + n > dims_.x || o.y + n > dims_.y)
      throw std::out_of_range("tile [" + std::to_string(o.t) + "," +
                              std::to_string(o.x) + "," + std::to_string(o.y) +
                              "]+" + std::to_string(n) +
                              " falls outside volume " + dims_.str());
  }

  Dims dims_;
  std::vector<double> sum_;
  std::vector<std::uint32_t> hits_;
};

// Affine rescale onto [0, 1]. A constant volume (no range) maps to zeros.
// Idempotent: applying it twice gives the same bits as applying it once.
inline Volume3D minmax_normalize(const Volume3D& v) {
  Volume3D out = v;
  if (v.data.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(v.data.begin(), v.data.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) {
    std::fill(out.data.begin(), out.data.end(), 0.0f);
    return out;
  }
  const double range = hi - lo;
  for (std::size_t i = 0; i < v.data.size(); ++i)
    out.data[i] = static_cast<float>((v.data[i] - lo) / range);
  return out;
}

struct Slice2D {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;  // row-major

  float at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  float& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Fixed-index plane through the volume. Row/column axes follow the cyclic
// order of the remaining axes: slicing t gives (x rows, y cols), slicing x
// gives (t rows, y cols), slicing y gives (t rows, x cols).
inline Slice2D extract_slice(const Volume3D& v, Axis axis, int index) {
  if (index < 0 || index >= v.dims.along(axis))
    throw std::out_of_range("slice index " + std::to_string(index) +
                            " out of range for axis " +
                            std::string(axis_name(axis)) + " of " +
                            v.dims.str());
  Slice2D s;
  switch (axis) {
    case Axis::T:
      s.rows = v.dims.x;
      s.cols = v.dims.y;
      s.data.resize(static_cast<std::size_t>(s.rows) * s.cols);
      for (int x = 0; x < v.dims.x; ++x)
        for (int y = 0; y < v.dims.y; ++y) s.at(x, y) = v.at(index, x, y);
      break;
    case Axis::X:
      s.rows = v.dims.t;
      s.cols = v.dims.y;
      s.data.resize(static_cast<std::size_t>(s.rows) * s.cols);
      for (int t = 0; t < v.dims.t; ++t)
        for (int y = 0; y < v.dims.y; ++y) s.at(t, y) = v.at(t, index, y);
      break;
    case Axis::Y:
      s.rows = v.dims.t;
      s.cols = v.dims.x;
      s.data.resize(static_cast<std::size_t>(s.rows) * s.cols);
      for (int t = 0; t < v.dims.t; ++t)
        for (int x = 0; x < v.dims.x; ++x) s.at(t, x) = v.at(t, x, index);
      break;
  }
  return s;
}

}  // namespace seisal
