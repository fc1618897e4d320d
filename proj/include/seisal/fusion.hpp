#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "seisal/core.hpp"
#include "seisal/dcs.hpp"
#include "seisal/parallel.hpp"
#include "seisal/volume.hpp"

namespace seisal {

using Vec3 = std::array<double, 3>;

inline double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

enum class TrainerKind { None, Lms, Nlms, Rls };

inline TrainerKind trainer_from_name(const std::string& s) {
  if (s == "lms") return TrainerKind::Lms;
  if (s == "nlms") return TrainerKind::Nlms;
  if (s == "rls") return TrainerKind::Rls;
  throw std::invalid_argument("unknown trainer '" + s +
                              "', expected lms, nlms or rls");
}

inline const char* trainer_name(TrainerKind k) {
  switch (k) {
    case TrainerKind::None: return "none";
    case TrainerKind::Lms: return "lms";
    case TrainerKind::Nlms: return "nlms";
    case TrainerKind::Rls: return "rls";
  }
  return "none";
}

struct TrainerConfig {
  TrainerKind kind = TrainerKind::Nlms;
  double mu_lms = 0.05;
  double mu_nlms = 0.5;
  double eps = 1e-6;     // NLMS norm guard
  double lambda = 0.999; // RLS forgetting factor
  double delta = 0.01;   // RLS state starts at I/delta

  bool operator==(const TrainerConfig&) const = default;
};

// One a-priori-error update each. All return e = d - w.s computed before the
// weight change, so e == 0 leaves w untouched bit for bit.

inline double lms_step(Vec3& w, const Vec3& s, double d, double mu) {
  const double e = d - dot3(w, s);
  for (int i = 0; i < 3; ++i) w[i] += mu * e * s[i];
  return e;
}

inline double nlms_step(Vec3& w, const Vec3& s, double d, double mu,
                        double eps) {
  const double e = d - dot3(w, s);
  const double g = mu / (eps + dot3(s, s));
  for (int i = 0; i < 3; ++i) w[i] += g * e * s[i];
  return e;
}

// Symmetric 3x3 inverse-correlation state for RLS.
struct RlsState {
  std::array<double, 9> p{};  // row-major

  static RlsState init(double delta) {
    if (!(delta > 0.0))
      throw std::invalid_argument("RLS delta must be > 0");
    RlsState st;
    const double v = 1.0 / delta;
    st.p = {v, 0, 0, 0, v, 0, 0, 0, v};
    return st;
  }
};

inline double rls_step(Vec3& w, RlsState& st, const Vec3& s, double d,
                       double lambda) {
  auto& p = st.p;
  // u = P s (P symmetric, so this is also s^T P transposed)
  Vec3 u{p[0] * s[0] + p[1] * s[1] + p[2] * s[2],
         p[3] * s[0] + p[4] * s[1] + p[5] * s[2],
         p[6] * s[0] + p[7] * s[1] + p[8] * s[2]};
  const double denom = lambda + dot3(s, u);
  const Vec3 k{u[0] / denom, u[1] / denom, u[2] / denom};
  const double e = d - dot3(w, s);
  for (int i = 0; i < 3; ++i) w[i] += k[i] * e;
  // P <- (P - k u^T) / lambda, then resymmetrize against drift
  std::array<double, 9> q;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      q[r * 3 + c] = (p[r * 3 + c] - k[r] * u[c]) / lambda;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      p[r * 3 + c] = 0.5 * (q[r * 3 + c] + q[c * 3 + r]);
  return e;
}

// Windowed MSE history point: mean e^2 over the `window` samples ending at
// sample number `iteration`.
struct MsePoint {
  std::uint64_t iteration = 0;
  double mse = 0.0;
  std::uint32_t window = 0;
};

inline void write_mse_csv(std::ostream& out,
                          const std::vector<MsePoint>& history) {
  out << "iteration_index,windowed_mse\n";
  char buf[64];
  for (const MsePoint& p : history) {
    const auto r = std::to_chars(buf, buf + sizeof buf, p.mse);
    out << p.iteration << ',' << std::string_view(buf, r.ptr - buf) << '\n';
  }
}

// Fusion weights in axis order (t, x, y).
struct FusionWeights {
  Vec3 w{0.0, 0.0, 0.0};
  TrainerKind trainer = TrainerKind::None;
  std::vector<MsePoint> history;

  static FusionWeights equal() {
    FusionWeights f;
    f.w = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return f;
  }

  static FusionWeights manual(double wt, double wx, double wy) {
    FusionWeights f;
    f.w = {wt, wx, wy};
    if (!std::isfinite(wt) || !std::isfinite(wx) || !std::isfinite(wy))
      throw std::invalid_argument("fusion weights must be finite");
    return f;
  }

  bool any_negative() const { return w[0] < 0 || w[1] < 0 || w[2] < 0; }
};

// What the trainers chase: either one of the directional maps or a labeled
// volume. section_stride N > 0 re-trains on y-section k*N and applies those
// weights to sections [k*N, (k+1)*N); 0 trains once over the whole volume.
struct DesiredMap {
  enum class Source { SelectAxis, Labeled };
  Source source = Source::SelectAxis;
  Axis axis = Axis::T;
  const Volume3D* labeled = nullptr;
  int section_stride = 0;
};

namespace detail {

inline const Volume3D& resolve_desired(const SaliencyMaps& maps,
                                       const DesiredMap& desired) {
  if (maps.s_t.dims != maps.s_x.dims || maps.s_t.dims != maps.s_y.dims)
    throw std::invalid_argument("saliency maps disagree on dims");
  if (desired.source == DesiredMap::Source::SelectAxis)
    return maps.along(desired.axis);
  if (!desired.labeled)
    throw std::invalid_argument("labeled desired map is null");
  if (desired.labeled->dims != maps.s_t.dims)
    throw std::invalid_argument("desired map dims " +
                                desired.labeled->dims.str() +
                                " do not match saliency maps " +
                                maps.s_t.dims.str());
  for (float v : desired.labeled->data)
    if (!(v >= -1e-6f && v <= 1.0f + 1e-6f))
      throw std::invalid_argument(
          "desired map values must lie in [0,1], found " + std::to_string(v));
  return *desired.labeled;
}

struct MseRecorder {
  static constexpr std::uint32_t kWindow = 1000;
  std::vector<MsePoint> history;
  double acc = 0.0;
  std::uint32_t count = 0;
  std::uint64_t total = 0;

  void push(double e) {
    acc += e * e;
    ++count;
    ++total;
    if (count == kWindow) flush();
  }
  void flush() {
    if (count) {
      history.push_back({total, acc / count, count});
      acc = 0.0;
      count = 0;
    }
  }
};

// One trainer pass over y-sections [y0, y1), raster order (t fastest, then
// x, then y). Sequential by nature: every step reads the previous weights.
inline void train_sections(const SaliencyMaps& maps, const Volume3D& d,
                           const TrainerConfig& cfg, Vec3& w, RlsState& rls,
                           MseRecorder& rec, int y0, int y1) {
  const Dims dims = maps.s_t.dims;
  for (int y = y0; y < y1; ++y)
    for (int x = 0; x < dims.x; ++x) {
      const std::size_t base = maps.s_t.index(0, x, y);
      for (int t = 0; t < dims.t; ++t) {
        const std::size_t p = base + static_cast<std::size_t>(t);
        const Vec3 s{maps.s_t.data[p], maps.s_x.data[p], maps.s_y.data[p]};
        const double dv = d.data[p];
        double e = 0.0;
        switch (cfg.kind) {
          case TrainerKind::Lms: e = lms_step(w, s, dv, cfg.mu_lms); break;
          case TrainerKind::Nlms:
            e = nlms_step(w, s, dv, cfg.mu_nlms, cfg.eps);
            break;
          case TrainerKind::Rls:
            e = rls_step(w, rls, s, dv, cfg.lambda);
            break;
          case TrainerKind::None:
            throw std::invalid_argument("trainer kind 'none' cannot adapt");
        }
        rec.push(e);
      }
    }
}

inline void combine_sections(Volume3D& out, const Volume3D& s_t,
                             const Volume3D& s_x, const Volume3D& s_y,
                             const Vec3& w, int y0, int y1, int threads) {
  const Dims dims = s_t.dims;
  parallel_for(static_cast<std::size_t>(y1 - y0), threads,
               [&](std::size_t b, std::size_t e) {
    for (std::size_t yi = b; yi < e; ++yi) {
      const int y = y0 + static_cast<int>(yi);
      const std::size_t base = s_t.index(0, 0, y);
      const std::size_t count =
          static_cast<std::size_t>(dims.t) * static_cast<std::size_t>(dims.x);
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t p = base + i;
        out.data[p] = static_cast<float>(w[0] * s_t.data[p] +
                                         w[1] * s_x.data[p] +
                                         w[2] * s_y.data[p]);
      }
    }
  });
}

}  // namespace detail

// Weighted sum of the three maps, minmax-normalized.
inline Volume3D combine(const Volume3D& s_t, const Volume3D& s_x,
                        const Volume3D& s_y, const FusionWeights& fw,
                        int threads = 1) {
  if (s_t.dims != s_x.dims || s_t.dims != s_y.dims)
    throw std::invalid_argument("combine inputs disagree on dims: " +
                                s_t.dims.str() + " vs " + s_x.dims.str() +
                                " vs " + s_y.dims.str());
  for (double v : fw.w)
    if (!std::isfinite(v))
      throw std::invalid_argument("fusion weights must be finite");
  Volume3D out(s_t.dims);
  out.sample_interval_ms = s_t.sample_interval_ms;
  out.first_inline = s_t.first_inline;
  out.first_crossline = s_t.first_crossline;
  out.axis_labels = s_t.axis_labels;
  detail::combine_sections(out, s_t, s_x, s_y, fw.w, 0, s_t.dims.y, threads);
  return minmax_normalize(out);
}

// Runs the configured trainer over the maps and returns the weights it lands
// on, with the windowed MSE history. Training visits voxels in raster order;
// with a section stride N it visits only sections 0, N, 2N, ... (warm-started
// in sequence), which mirrors how fuse_adaptive applies them.
inline FusionWeights adapt_weights(const SaliencyMaps& maps,
                                   const DesiredMap& desired,
                                   const TrainerConfig& cfg) {
  const Volume3D& d = detail::resolve_desired(maps, desired);
  const Dims dims = maps.s_t.dims;
  if (dims.count() == 0)
    throw std::invalid_argument("empty training section: volume has no voxels");
  if (desired.section_stride < 0)
    throw std::invalid_argument("section stride must be >= 0");

  FusionWeights fw;
  fw.trainer = cfg.kind;
  RlsState rls = cfg.kind == TrainerKind::Rls ? RlsState::init(cfg.delta)
                                              : RlsState{};
  detail::MseRecorder rec;
  if (desired.section_stride == 0) {
    detail::train_sections(maps, d, cfg, fw.w, rls, rec, 0, dims.y);
  } else {
    for (int y = 0; y < dims.y; y += desired.section_stride)
      detail::train_sections(maps, d, cfg, fw.w, rls, rec, y, y + 1);
  }
  rec.flush();
  fw.history = std::move(rec.history);
  return fw;
}

// Adaptive fusion in one go. With a section stride, each block of N sections
// is combined with the weights trained on the block's leading section;
// normalization happens once at the end so blocks share a scale.
inline std::pair<Volume3D, FusionWeights> fuse_adaptive(
    const SaliencyMaps& maps, const DesiredMap& desired,
    const TrainerConfig& cfg, int threads = 1) {
  const Volume3D& d = detail::resolve_desired(maps, desired);
  const Dims dims = maps.s_t.dims;
  if (dims.count() == 0)
    throw std::invalid_argument("empty training section: volume has no voxels");

  FusionWeights fw;
  fw.trainer = cfg.kind;
  RlsState rls = cfg.kind == TrainerKind::Rls ? RlsState::init(cfg.delta)
                                              : RlsState{};
  detail::MseRecorder rec;
  Volume3D out(dims);
  out.sample_interval_ms = maps.s_t.sample_interval_ms;
  out.first_inline = maps.s_t.first_inline;
  out.first_crossline = maps.s_t.first_crossline;
  out.axis_labels = maps.s_t.axis_labels;

  const int stride = desired.section_stride;
  if (stride <= 0) {
    detail::train_sections(maps, d, cfg, fw.w, rls, rec, 0, dims.y);
    detail::combine_sections(out, maps.s_t, maps.s_x, maps.s_y, fw.w, 0, dims.y,
                             threads);
  } else {
    for (int y = 0; y < dims.y; y += stride) {
      detail::train_sections(maps, d, cfg, fw.w, rls, rec, y, y + 1);
      detail::combine_sections(out, maps.s_t, maps.s_x, maps.s_y, fw.w, y,
                               std::min(y + stride, dims.y), threads);
    }
  }
  rec.flush();
  fw.history = std::move(rec.history);
  return {minmax_normalize(out), std::move(fw)};
}

// Mean squared error of the weighted prediction against the desired map,
// over y-sections [y0, y1) (the whole volume by default).
inline double mean_squared_error(const SaliencyMaps& maps,
                                 const DesiredMap& desired, const Vec3& w,
                                 int y0 = 0, int y1 = -1) {
  const Volume3D& d = detail::resolve_desired(maps, desired);
  const Dims dims = maps.s_t.dims;
  if (y1 < 0) y1 = dims.y;
  double acc = 0.0;
  std::size_t n = 0;
  for (int y = y0; y < y1; ++y)
    for (int x = 0; x < dims.x; ++x) {
      const std::size_t base = maps.s_t.index(0, x, y);
      for (int t = 0; t < dims.t; ++t) {
        const std::size_t p = base + static_cast<std::size_t>(t);
        const Vec3 s{maps.s_t.data[p], maps.s_x.data[p], maps.s_y.data[p]};
        const double e = d.data[p] - dot3(w, s);
        acc += e * e;
        ++n;
      }
    }
  if (n == 0) throw std::invalid_argument("empty MSE domain");
  return acc / static_cast<double>(n);
}

}  // namespace seisal
