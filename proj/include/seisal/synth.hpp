#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "seisal/core.hpp"
#include "seisal/volume.hpp"

namespace seisal {

enum class Scenario { Layered, LayeredFault, LayeredDome, ChaoticPatch };

inline Scenario scenario_from_name(const std::string& s) {
  if (s == "layered") return Scenario::Layered;
  if (s == "layered+fault") return Scenario::LayeredFault;
  if (s == "layered+dome") return Scenario::LayeredDome;
  if (s == "chaotic-patch") return Scenario::ChaoticPatch;
  throw std::invalid_argument("unknown scenario '" + s + "'");
}

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::Layered: return "layered";
    case Scenario::LayeredFault: return "layered+fault";
    case Scenario::LayeredDome: return "layered+dome";
    case Scenario::ChaoticPatch: return "chaotic-patch";
  }
  return "layered";
}

struct SyntheticSpec {
  Dims dims{64, 64, 64};
  Scenario scenario = Scenario::LayeredFault;

  // layered+fault
  double dip_deg = 75.0;
  int throw_voxels = 3;

  // layered+dome; negative center/radius mean "volume center" and
  // "min-extent / 4"
  std::array<double, 3> dome_center{-1.0, -1.0, -1.0};
  double dome_radius = -1.0;

  // chaotic-patch; negative bounds mean "centered box of half extent"
  std::array<int, 3> region_lo{-1, -1, -1};
  std::array<int, 3> region_hi{-1, -1, -1};

  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline double unit_double(std::uint64_t h) {
  // (0, 1]: never zero, so it is safe under log()
  return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

// Counter-based values: each draw depends only on (key, counter), never on
// call order, so any parallel split over voxels yields identical volumes.
inline double hash_unit(std::uint64_t key, std::uint64_t counter) {
  return unit_double(splitmix64(key + counter * 0x9E3779B97F4A7C15ull));
}

inline double hash_gauss(std::uint64_t key, std::uint64_t counter) {
  const double u1 = hash_unit(key, 2 * counter);
  const double u2 = hash_unit(key, 2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Horizontal layering: a seed-derived bank of depth sinusoids, unit RMS.
struct LayerBank {
  static constexpr int kCount = 4;
  std::array<double, kCount> freq;   // cycles per t-extent
  std::array<double, kCount> phase;
  std::array<double, kCount> amp;
  double inv_extent = 0.0;

  LayerBank(std::uint64_t seed, int t_extent) {
    const std::uint64_t key = splitmix64(seed ^ 0x6c61796572ull);  // component id
    double power = 0.0;
    for (int h = 0; h < kCount; ++h) {
      freq[h] = 4.0 + 10.0 * hash_unit(key, 2 * h);
      phase[h] = 2.0 * std::numbers::pi * hash_unit(key, 2 * h + 1);
      amp[h] = 1.0 / (1.0 + h);
      power += 0.5 * amp[h] * amp[h];
    }
    const double scale = 1.0 / std::sqrt(power);
    for (double& a : amp) a *= scale;
    inv_extent = 1.0 / t_extent;
  }

  double at(double t) const {
    double v = 0.0;
    for (int h = 0; h < kCount; ++h)
      v += amp[h] *
           std::sin(2.0 * std::numbers::pi * freq[h] * t * inv_extent +
                    phase[h]);
    return v;
  }
};

}  // namespace detail

// Deterministic test volumes with ground truth. The mask marks voxels within
// distance 1 of the planted structure's surface (the fault plane, the dome
// shell, or the chaotic region's boundary); plain layered volumes have an
// empty mask.
inline std::pair<Volume3D, Volume3D> generate(const SyntheticSpec& spec) {
  const Dims dims = spec.dims;
  if (dims.t < 4 || dims.x < 4 || dims.y < 4)
    throw std::invalid_argument("synthetic dims must be at least 4^3, got " +
                                dims.str());
  if (!(spec.noise_sigma >= 0.0))
    throw std::invalid_argument("noise sigma must be >= 0");

  const detail::LayerBank layers(spec.seed, dims.t);
  const std::uint64_t noise_key =
      detail::splitmix64(spec.seed ^ 0x6e6f697365ull);
  const std::uint64_t body_key =
      detail::splitmix64(spec.seed ^ 0x626f6479ull);

  Volume3D vol(dims);
  Volume3D mask(dims);

  const double tc = 0.5 * (dims.t - 1);
  const double xc = 0.5 * (dims.x - 1);
  const double yc = 0.5 * (dims.y - 1);

  // Scenario geometry, validated up front.
  double cot_dip = 0.0, plane_norm = 1.0;
  if (spec.scenario == Scenario::LayeredFault) {
    if (!(spec.dip_deg > 0.0 && spec.dip_deg <= 90.0))
      throw std::invalid_argument("fault dip must be in (0, 90] degrees");
    if (spec.throw_voxels < 0 || spec.throw_voxels >= dims.t)
      throw std::invalid_argument("fault throw " +
                                  std::to_string(spec.throw_voxels) +
                                  " does not fit t extent " +
                                  std::to_string(dims.t));
    const double rad = spec.dip_deg * std::numbers::pi / 180.0;
    cot_dip = std::cos(rad) / std::sin(rad);
    plane_norm = std::sqrt(1.0 + cot_dip * cot_dip);
  }

  std::array<double, 3> dc{0.0, 0.0, 0.0};  // dome center, (t, x, y)
  double dr = 0.0;
  if (spec.scenario == Scenario::LayeredDome) {
    dc = spec.dome_center;
    if (dc[0] < 0) dc = {tc, xc, yc};
    dr = spec.dome_radius;
    if (dr < 0) dr = 0.25 * std::min({dims.t, dims.x, dims.y});
    if (dr < 2.0) throw std::invalid_argument("dome radius too small");
    if (dc[0] - dr < 0 || dc[0] + dr >= dims.t || dc[1] - dr < 0 ||
        dc[1] + dr >= dims.x || dc[2] - dr < 0 || dc[2] + dr >= dims.y)
      throw std::invalid_argument("dome does not fit inside " + dims.str());
  }

  std::array<int, 3> lo = spec.region_lo, hi = spec.region_hi;
  if (spec.scenario == Scenario::ChaoticPatch) {
    if (lo[0] < 0) {
      lo = {dims.t / 4, dims.x / 4, dims.y / 4};
      hi = {3 * dims.t / 4, 3 * dims.x / 4, 3 * dims.y / 4};
    }
    const std::array<int, 3> ext{dims.t, dims.x, dims.y};
    for (int a = 0; a < 3; ++a)
      if (lo[a] < 0 || hi[a] <= lo[a] || hi[a] > ext[a])
        throw std::invalid_argument("chaotic region does not fit inside " +
                                    dims.str());
  }

  // Oblique texture for dome fill and chaotic patches.
  std::array<double, 9> tex;
  for (int i = 0; i < 9; ++i)
    tex[i] = 2.0 * detail::hash_unit(body_key, 100 + i) - 1.0;
  const auto chaos = [&](int t, int x, int y, std::uint64_t counter) {
    double v = 0.0;
    for (int h = 0; h < 3; ++h)
      v += std::sin(2.0 * std::numbers::pi *
                        (tex[3 * h] * t + tex[3 * h + 1] * x +
                         tex[3 * h + 2] * y) /
                        8.0 +
                    2.0 * std::numbers::pi * detail::hash_unit(body_key, h));
    return 0.5 * v + 0.4 * detail::hash_gauss(body_key, counter);
  };

  std::size_t flat = 0;
  for (int y = 0; y < dims.y; ++y)
    for (int x = 0; x < dims.x; ++x)
      for (int t = 0; t < dims.t; ++t, ++flat) {
        double value = 0.0;
        double m = 0.0;
        switch (spec.scenario) {
          case Scenario::Layered:
            value = layers.at(t);
            break;
          case Scenario::LayeredFault: {
            const double signed_off = (x - xc) - (t - tc) * cot_dip;
            value = signed_off > 0.0
                        ? layers.at(t - spec.throw_voxels)
                        : layers.at(t);
            if (std::abs(signed_off) / plane_norm <= 1.0) m = 1.0;
            break;
          }
          case Scenario::LayeredDome: {
            const double ddt = t - dc[0], ddx = x - dc[1], ddy = y - dc[2];
            const double rho =
                std::sqrt(ddt * ddt + ddx * ddx + ddy * ddy);
            if (rho < dr) {
              value = 0.15 * chaos(t, x, y, flat);
            } else {
              const double lat2 = ddx * ddx + ddy * ddy;
              const double lift =
                  0.5 * dr * std::exp(-lat2 / (2.0 * dr * dr));
              value = layers.at(t + lift);
            }
            if (std::abs(rho - dr) <= 1.0) m = 1.0;
            break;
          }
          case Scenario::ChaoticPatch: {
            const bool inside = t >= lo[0] && t < hi[0] && x >= lo[1] &&
                                x < hi[1] && y >= lo[2] && y < hi[2];
            value = inside ? chaos(t, x, y, flat) : layers.at(t);
            // distance to the box surface, from either side
            const std::array<double, 3> p{double(t), double(x), double(y)};
            double out2 = 0.0;
            double inside_min = std::numeric_limits<double>::infinity();
            for (int a = 0; a < 3; ++a) {
              const double below = (lo[a] - 0.0) - p[a];
              const double above = p[a] - (hi[a] - 1.0);
              const double excess = std::max({below, above, 0.0});
              out2 += excess * excess;
              inside_min = std::min(
                  inside_min, std::min(p[a] - lo[a], (hi[a] - 1.0) - p[a]));
            }
            const double dist =
                out2 > 0.0 ? std::sqrt(out2) : inside_min;
            if (dist <= 1.0) m = 1.0;
            break;
          }
        }
        if (spec.noise_sigma > 0.0)
          value += spec.noise_sigma * detail::hash_gauss(noise_key, flat);
        vol.data[flat] = static_cast<float>(value);
        mask.data[flat] = static_cast<float>(m);
      }

  vol.axis_labels = {"time", "crossline", "inline"};
  return {std::move(vol), std::move(mask)};
}

struct DetectionReport {
  double auc = 0.5;
  double mean_in = 0.0;
  double mean_out = 0.0;
  double contrast_ratio = 0.0;
  std::uint64_t in_count = 0;
  std::uint64_t out_count = 0;
};

// Rank-sum AUC: the probability that a random in-mask voxel outranks a
// random out-of-mask voxel, ties counted one half. Mask voxels are those
// with value >= 0.5.
inline DetectionReport auc(const Volume3D& saliency, const Volume3D& mask) {
  if (saliency.dims != mask.dims)
    throw std::invalid_argument("saliency dims " + saliency.dims.str() +
                                " do not match mask dims " + mask.dims.str());
  const std::size_t n = saliency.data.size();
  std::vector<std::pair<float, bool>> v(n);
  DetectionReport rep;
  double sum_in = 0.0, sum_out = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool in = mask.data[i] >= 0.5f;
    v[i] = {saliency.data[i], in};
    if (in) {
      ++rep.in_count;
      sum_in += saliency.data[i];
    } else {
      ++rep.out_count;
      sum_out += saliency.data[i];
    }
  }
  if (rep.in_count == 0 || rep.out_count == 0)
    throw std::invalid_argument("mask must contain both classes");

  std::sort(v.begin(), v.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double rank_in = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && v[j].first == v[i].first) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) +
                                   static_cast<double>(j));  // 1-based
    for (std::size_t k = i; k < j; ++k)
      if (v[k].second) rank_in += avg_rank;
    i = j;
  }
  const double ni = static_cast<double>(rep.in_count);
  const double no = static_cast<double>(rep.out_count);
  rep.auc = (rank_in - ni * (ni + 1.0) / 2.0) / (ni * no);
  rep.mean_in = sum_in / ni;
  rep.mean_out = sum_out / no;
  if (rep.mean_out > 0.0)
    rep.contrast_ratio = rep.mean_in / rep.mean_out;
  else
    rep.contrast_ratio = rep.mean_in > 0.0
                             ? std::numeric_limits<double>::infinity()
                             : 1.0;
  return rep;
}

}  // namespace seisal
