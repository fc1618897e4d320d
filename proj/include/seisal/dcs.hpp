#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "seisal/core.hpp"
#include "seisal/parallel.hpp"
#include "seisal/spectral.hpp"
#include "seisal/volume.hpp"

namespace seisal {

// Neighbor offset of a center-surround window: i0 steps along t, j0 along x,
// r0 along y, w is the Gaussian weight applied to the neighbor.
struct WindowOffset {
  int i0 = 0;
  int j0 = 0;
  int r0 = 0;
  double w = 1.0;
};

struct DirectionalWindow {
  std::string name = "full";
  std::vector<WindowOffset> offsets;

  int q() const { return static_cast<int>(offsets.size()); }
};

inline double window_weight(int i0, int j0, int r0, double sigma) {
  const double d2 = static_cast<double>(i0) * i0 +
                    static_cast<double>(j0) * j0 +
                    static_cast<double>(r0) * r0;
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

// Builds the offset set for one orientation tag. Axis windows run along a
// single axis, diagonal windows along the matched-sign 45-degree line of the
// named plane, and "full" takes everything within Chebyshev radius r. Offsets
// come out in lexicographic (i0, j0, r0) order, which fixes summation order.
inline DirectionalWindow make_window(const std::string& orientation, int r,
                                     double sigma) {
  if (r < 1)
    throw std::invalid_argument("window radius must be >= 1, got " +
                                std::to_string(r));
  if (!(sigma > 0.0))
    throw std::invalid_argument("window sigma must be > 0");

  DirectionalWindow win;
  win.name = orientation;
  auto push = [&](int a, int b, int c) {
    win.offsets.push_back({a, b, c, window_weight(a, b, c, sigma)});
  };

  if (orientation == "axis-t") {
    for (int s = -r; s <= r; ++s)
      if (s != 0) push(s, 0, 0);
  } else if (orientation == "axis-x") {
    for (int s = -r; s <= r; ++s)
      if (s != 0) push(0, s, 0);
  } else if (orientation == "axis-y") {
    for (int s = -r; s <= r; ++s)
      if (s != 0) push(0, 0, s);
  } else if (orientation == "diag-tx") {
    for (int s = -r; s <= r; ++s)
      if (s != 0) push(s, s, 0);
  } else if (orientation == "diag-ty") {
    for (int s = -r; s <= r; ++s)
      if (s != 0) push(s, 0, s);
  } else if (orientation == "diag-xy") {
    for (int s = -r; s <= r; ++s)
      if (s != 0) push(0, s, s);
  } else if (orientation == "full") {
    for (int a = -r; a <= r; ++a)
      for (int b = -r; b <= r; ++b)
        for (int c = -r; c <= r; ++c)
          if (a || b || c) push(a, b, c);
  } else {
    throw std::invalid_argument("unknown window orientation '" + orientation +
                                "'");
  }
  return win;
}

// Plain-text window template, one "i0 j0 r0 w" line per offset. '#' starts a
// comment, blank lines are skipped.
inline DirectionalWindow load_window(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open window template " + path);
  DirectionalWindow win;
  win.name = "custom";
  std::set<std::tuple<int, int, int>> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int i0, j0, r0;
    double w;
    if (!(ls >> i0)) continue;  // blank or comment-only line
    if (!(ls >> j0 >> r0 >> w))
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": expected 'i0 j0 r0 w'");
    std::string extra;
    if (ls >> extra)
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": trailing junk '" + extra + "'");
    if (i0 == 0 && j0 == 0 && r0 == 0)
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": offset (0,0,0) is the center, not a neighbor");
    if (!(w > 0.0) || w > 1.0)
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": weight must be in (0,1]");
    if (!seen.insert({i0, j0, r0}).second)
      throw config_error(path + ":" + std::to_string(lineno) +
                         ": duplicate offset");
    win.offsets.push_back({i0, j0, r0, w});
  }
  if (win.offsets.empty())
    throw config_error(path + ": window template has no offsets");
  return win;
}

enum class DcsWeighting { Inner, Outer };

inline DcsWeighting weighting_from_name(const std::string& s) {
  if (s == "inner") return DcsWeighting::Inner;
  if (s == "outer") return DcsWeighting::Outer;
  throw std::invalid_argument("unknown weighting '" + s +
                              "', expected inner or outer");
}

inline const char* weighting_name(DcsWeighting w) {
  return w == DcsWeighting::Outer ? "outer" : "inner";
}

struct DcsConfig {
  DirectionalWindow window;
  int radius = 2;
  double sigma = 1.0;
  DcsWeighting weighting = DcsWeighting::Inner;
};

inline DcsConfig make_dcs_config(const std::string& orientation, int r,
                                 double sigma,
                                 DcsWeighting weighting = DcsWeighting::Inner) {
  DcsConfig cfg;
  cfg.window = make_window(orientation, r, sigma);
  cfg.radius = r;
  cfg.sigma = sigma;
  cfg.weighting = weighting;
  return cfg;
}

// Center-surround response: per voxel, the mean over window offsets of
// |center - w * neighbor| (or w * |center - neighbor| with outer weighting).
// Neighbor indices are clamped at the volume boundary; clamped neighbors may
// coincide with the center and still count toward the mean.
inline Volume3D dcs_saliency(const Volume3D& e, const DcsConfig& cfg,
                             int threads = 1) {
  const auto& offs = cfg.window.offsets;
  if (offs.empty()) throw std::invalid_argument("window has no offsets");
  const int T = e.dims.t, X = e.dims.x, Y = e.dims.y;
  const std::size_t q = offs.size();
  const double qinv = 1.0 / static_cast<double>(q);
  const bool outer = cfg.weighting == DcsWeighting::Outer;

  Volume3D out(e.dims);
  out.sample_interval_ms = e.sample_interval_ms;
  out.first_inline = e.first_inline;
  out.first_crossline = e.first_crossline;
  out.axis_labels = e.axis_labels;

  parallel_for(static_cast<std::size_t>(Y), threads,
               [&](std::size_t yb, std::size_t ye) {
    // Per-offset column base for the current (x, y), so the inner t loop only
    // clamps t.
    std::vector<std::size_t> nbase(q);
    for (int y = static_cast<int>(yb); y < static_cast<int>(ye); ++y) {
      for (int x = 0; x < X; ++x) {
        for (std::size_t k = 0; k < q; ++k) {
          const int nx = std::clamp(x + offs[k].j0, 0, X - 1);
          const int ny = std::clamp(y + offs[k].r0, 0, Y - 1);
          nbase[k] = e.index(0, nx, ny);
        }
        const std::size_t obase = out.index(0, x, y);
        for (int t = 0; t < T; ++t) {
          const double c = e.data[obase + static_cast<std::size_t>(t)];
          double acc = 0.0;
          for (std::size_t k = 0; k < q; ++k) {
            const int nt = std::clamp(t + offs[k].i0, 0, T - 1);
            const double nb = e.data[nbase[k] + static_cast<std::size_t>(nt)];
            acc += outer ? offs[k].w * std::abs(c - nb)
                         : std::abs(c - offs[k].w * nb);
          }
          out.data[obase + static_cast<std::size_t>(t)] =
              static_cast<float>(acc * qinv);
        }
      }
    }
  });
  return out;
}

struct SaliencyMaps {
  Volume3D s_t, s_x, s_y;

  const Volume3D& along(Axis a) const {
    switch (a) {
      case Axis::T: return s_t;
      case Axis::X: return s_x;
      case Axis::Y: return s_y;
    }
    return s_t;
  }
};

// One directional map per energy volume, each minmax-normalized so the
// fusion stage sees comparable scales.
inline SaliencyMaps dcs_all(const EnergyVolumes& energies,
                            const DcsConfig& cfg_t, const DcsConfig& cfg_x,
                            const DcsConfig& cfg_y, int threads = 1) {
  if (energies.e_t.dims != energies.e_x.dims ||
      energies.e_t.dims != energies.e_y.dims)
    throw std::invalid_argument("energy volumes disagree on dims: " +
                                energies.e_t.dims.str() + " vs " +
                                energies.e_x.dims.str() + " vs " +
                                energies.e_y.dims.str());
  SaliencyMaps maps;
  maps.s_t = minmax_normalize(dcs_saliency(energies.e_t, cfg_t, threads));
  maps.s_x = minmax_normalize(dcs_saliency(energies.e_x, cfg_x, threads));
  maps.s_y = minmax_normalize(dcs_saliency(energies.e_y, cfg_y, threads));
  return maps;
}

}  // namespace seisal
