#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "seisal/core.hpp"
#include "seisal/parallel.hpp"
#include "seisal/volume.hpp"

namespace seisal {

// Local spectrum of one n^3 tile. Bins live in raw DFT layout (t-frequency
// fastest, then x, then y); the centered accessors map frequency coordinates
// (i, j, k) in [-n/2, n/2) onto that storage. i runs along t, j along x,
// k along y.
struct SpectralCube {
  int n = 0;
  std::vector<std::complex<double>> bins;

  explicit SpectralCube(int side = 0)
      : n(side),
        bins(static_cast<std::size_t>(side) * side * side,
             std::complex<double>(0.0, 0.0)) {}

  static int centered_of_raw(int u, int n) { return u < (n + 1) / 2 ? u : u - n; }
  static int raw_of_centered(int c, int n) { return c >= 0 ? c : c + n; }

  int min_freq() const { return -(n / 2); }
  int max_freq() const { return (n + 1) / 2 - 1; }

  std::size_t raw_index(int ut, int ux, int uy) const {
    return static_cast<std::size_t>(ut) +
           static_cast<std::size_t>(n) *
               (static_cast<std::size_t>(ux) +
                static_cast<std::size_t>(n) * static_cast<std::size_t>(uy));
  }

  std::complex<double> bin_raw(int ut, int ux, int uy) const {
    return bins[raw_index(ut, ux, uy)];
  }
  std::complex<double>& bin_raw(int ut, int ux, int uy) {
    return bins[raw_index(ut, ux, uy)];
  }

  std::complex<double> bin(int i, int j, int k) const {
    return bins[raw_index(raw_of_centered(i, n), raw_of_centered(j, n),
                          raw_of_centered(k, n))];
  }
  std::complex<double>& bin(int i, int j, int k) {
    return bins[raw_index(raw_of_centered(i, n), raw_of_centered(j, n),
                          raw_of_centered(k, n))];
  }
};

// Radix-2 decimation-in-time FFT for one contiguous complex line.
class FftPlan {
 public:
  explicit FftPlan(int n) : n_(n) {
    if (n < 2 || (n & (n - 1)) != 0)
      throw std::invalid_argument("unsupported transform size " +
                                  std::to_string(n) +
                                  ": powers of two only");
    rev_.resize(n);
    int log2n = 0;
    while ((1 << log2n) < n) ++log2n;
    for (int i = 0; i < n; ++i) {
      int r = 0;
      for (int b = 0; b < log2n; ++b)
        if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
      rev_[i] = r;
    }
    tw_.resize(n / 2);
    for (int k = 0; k < n / 2; ++k) {
      const double ang = -2.0 * std::numbers::pi * k / n;
      tw_[k] = std::complex<double>(std::cos(ang), std::sin(ang));
    }
  }

  int size() const { return n_; }

  void forward(std::complex<double>* line) const {
    for (int i = 0; i < n_; ++i)
      if (rev_[i] > i) std::swap(line[i], line[rev_[i]]);
    for (int len = 2; len <= n_; len <<= 1) {
      const int half = len >> 1;
      const int step = n_ / len;
      for (int block = 0; block < n_; block += len)
        for (int k = 0; k < half; ++k) {
          const std::complex<double> w = tw_[k * step];
          std::complex<double>& a = line[block + k];
          std::complex<double>& b = line[block + k + half];
          const std::complex<double> u = a;
          const std::complex<double> v = w * b;
          a = u + v;
          b = u - v;
        }
    }
  }

 private:
  int n_;
  std::vector<int> rev_;
  std::vector<std::complex<double>> tw_;
};

namespace detail {

// One axis of the 3D transform: lines of the cube at the given stride are
// gathered, transformed, and scattered back.
inline void fft_axis(SpectralCube& spec, const FftPlan& plan, int stride,
                     int line_count_a, int stride_a, int line_count_b,
                     int stride_b, std::vector<std::complex<double>>& scratch) {
  const int n = plan.size();
  scratch.resize(n);
  for (int a = 0; a < line_count_a; ++a)
    for (int b = 0; b < line_count_b; ++b) {
      const std::size_t base = static_cast<std::size_t>(a) * stride_a +
                               static_cast<std::size_t>(b) * stride_b;
      for (int u = 0; u < n; ++u)
        scratch[u] = spec.bins[base + static_cast<std::size_t>(u) * stride];
      plan.forward(scratch.data());
      for (int u = 0; u < n; ++u)
        spec.bins[base + static_cast<std::size_t>(u) * stride] = scratch[u];
    }
}

}  // namespace detail

// Full complex spectrum of a real n^3 cube (t fastest in the input, same as
// Volume3D layout), O(n^3 log n).
inline SpectralCube local_fft(std::span<const double> cube, int n) {
  const FftPlan plan(n);
  if (cube.size() != static_cast<std::size_t>(n) * n * n)
    throw std::invalid_argument("cube payload does not match n^3");
  SpectralCube spec(n);
  for (std::size_t i = 0; i < cube.size(); ++i)
    spec.bins[i] = std::complex<double>(cube[i], 0.0);

  std::vector<std::complex<double>> scratch;
  // t lines are contiguous; x lines stride n; y lines stride n^2.
  detail::fft_axis(spec, plan, 1, n, n, n, n * n, scratch);
  detail::fft_axis(spec, plan, n, n, 1, n, n * n, scratch);
  detail::fft_axis(spec, plan, n * n, n, 1, n, n, scratch);
  return spec;
}

// Slow reference transform. The DFT matrix of the flattened cube factors as
// a Kronecker product of three n-point DFT matrices, and this evaluates that
// product entry by entry: out[u] = sum_v D[ut,vt]*D[ux,vx]*D[uy,vy]*in[v].
// O(n^6), reference use only.
inline SpectralCube local_dft_oracle(std::span<const double> cube, int n) {
  if (n < 1 || n > 16)
    throw std::invalid_argument("oracle transform supports 1 <= n <= 16, got " +
                                std::to_string(n));
  if (cube.size() != static_cast<std::size_t>(n) * n * n)
    throw std::invalid_argument("cube payload does not match n^3");

  std::vector<std::complex<double>> d(static_cast<std::size_t>(n) * n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      const double ang = -2.0 * std::numbers::pi * ((u * v) % n) / n;
      d[static_cast<std::size_t>(u) * n + v] =
          std::complex<double>(std::cos(ang), std::sin(ang));
    }
  const auto D = [&](int u, int v) { return d[static_cast<std::size_t>(u) * n + v]; };

  SpectralCube spec(n);
  for (int uy = 0; uy < n; ++uy)
    for (int ux = 0; ux < n; ++ux)
      for (int ut = 0; ut < n; ++ut) {
        std::complex<double> acc(0.0, 0.0);
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x) {
            const std::complex<double> wxy = D(uy, y) * D(ux, x);
            const double* col = cube.data() + (static_cast<std::size_t>(y) * n + x) * n;
            for (int t = 0; t < n; ++t) acc += wxy * D(ut, t) * col[t];
          }
        spec.bin_raw(ut, ux, uy) = acc;
      }
  return spec;
}

// Fraction of a spectral point carried along axis m: the component of
// (i, j, k) orthogonal to m, over the point's distance from DC. Exactly 0
// at DC, which never contributes to any energy.
inline double projection_factor(Axis m, int i, int j, int k) {
  if (i == 0 && j == 0 && k == 0) return 0.0;
  const double i2 = static_cast<double>(i) * i;
  const double j2 = static_cast<double>(j) * j;
  const double k2 = static_cast<double>(k) * k;
  double p2 = 0.0;
  switch (m) {
    case Axis::T: p2 = j2 + k2; break;
    case Axis::X: p2 = i2 + k2; break;
    case Axis::Y: p2 = i2 + j2; break;
  }
  return std::sqrt(p2 / (i2 + j2 + k2));
}

// Factor table for one axis over a full cube, raw bin layout.
struct ProjectionField {
  Axis axis = Axis::T;
  int n = 0;
  std::vector<double> factors;

  double at_raw(std::size_t flat) const { return factors[flat]; }
};

inline ProjectionField projection_field(Axis m, int n) {
  ProjectionField f;
  f.axis = m;
  f.n = n;
  f.factors.resize(static_cast<std::size_t>(n) * n * n);
  std::size_t flat = 0;
  for (int uy = 0; uy < n; ++uy) {
    const int k = SpectralCube::centered_of_raw(uy, n);
    for (int ux = 0; ux < n; ++ux) {
      const int j = SpectralCube::centered_of_raw(ux, n);
      for (int ut = 0; ut < n; ++ut, ++flat) {
        const int i = SpectralCube::centered_of_raw(ut, n);
        f.factors[flat] = projection_factor(m, i, j, k);
      }
    }
  }
  return f;
}

// Splits a spectrum into its three directional parts; DC is zero in all of
// them.
inline std::array<SpectralCube, 3> project_spectrum(const SpectralCube& spec) {
  std::array<SpectralCube, 3> out{SpectralCube(spec.n), SpectralCube(spec.n),
                                  SpectralCube(spec.n)};
  for (int m = 0; m < 3; ++m) {
    const ProjectionField f = projection_field(static_cast<Axis>(m), spec.n);
    for (std::size_t b = 0; b < spec.bins.size(); ++b)
      out[m].bins[b] = std::complex<double>(spec.bins[b].real() * f.factors[b],
                                            spec.bins[b].imag() * f.factors[b]);
  }
  return out;
}

// Mean bin magnitude of a (projected) spectrum.
inline double spectral_energy(const SpectralCube& projected) {
  double s = 0.0;
  for (const std::complex<double>& b : projected.bins) s += std::abs(b);
  return s / static_cast<double>(projected.bins.size());
}

enum class Taper { None, Hann };

inline Taper taper_from_name(const std::string& s) {
  if (s == "none") return Taper::None;
  if (s == "hann") return Taper::Hann;
  throw std::invalid_argument("unknown taper '" + s + "', expected none or hann");
}

inline const char* taper_name(Taper t) {
  return t == Taper::Hann ? "hann" : "none";
}

struct EnergyVolumes {
  Volume3D e_t, e_x, e_y;

  const Volume3D& along(Axis a) const {
    switch (a) {
      case Axis::T: return e_t;
      case Axis::X: return e_x;
      case Axis::Y: return e_y;
    }
    return e_t;
  }
  Volume3D& along(Axis a) {
    switch (a) {
      case Axis::T: return e_t;
      case Axis::X: return e_x;
      case Axis::Y: return e_y;
    }
    return e_t;
  }
};

// Per-tile spectral energies splatted over tile footprints and coverage-
// averaged into three volumes.
//
// Each tile is gathered into doubles with its first sample subtracted before
// the transform. Only the DC bin can see a constant shift, and DC is excluded
// by the projection anyway, so working on residuals changes nothing
// mathematically while making two things exact rather than approximate: a
// constant volume yields exactly zero energies, and volumes differing by a
// representable constant yield bit-identical results.
//
// Parallelism is over tiles; the energies land in a per-tile array and are
// accumulated serially in fixed tile order, so any thread count produces the
// same bits.
inline EnergyVolumes energy_volumes(const Volume3D& v, const TileGrid& plan,
                                    Taper taper = Taper::None,
                                    int threads = 1) {
  if (plan.dims != v.dims)
    throw std::invalid_argument("tile plan dims " + plan.dims.str() +
                                " do not match volume dims " + v.dims.str());
  const int n = plan.n;
  const FftPlan fft(n);
  const ProjectionField ft = projection_field(Axis::T, n);
  const ProjectionField fx = projection_field(Axis::X, n);
  const ProjectionField fy = projection_field(Axis::Y, n);

  std::vector<double> taper1d;
  if (taper == Taper::Hann) {
    taper1d.resize(n);
    for (int i = 0; i < n; ++i)
      taper1d[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }

  const std::size_t tile_count = plan.origins.size();
  std::vector<std::array<double, 3>> tile_energy(tile_count);

  parallel_for(tile_count, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> cube(static_cast<std::size_t>(n) * n * n);
    std::vector<std::complex<double>> scratch;
    for (std::size_t ti = begin; ti < end; ++ti) {
      const TileOrigin o = plan.origins[ti];
      const double anchor = v.at(o.t, o.x, o.y);
      std::size_t w = 0;
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
          const float* col = &v.data[v.index(o.t, o.x + x, o.y + y)];
          for (int t = 0; t < n; ++t, ++w) cube[w] = col[t] - anchor;
        }
      if (!taper1d.empty()) {
        w = 0;
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x) {
            const double wxy = taper1d[x] * taper1d[y];
            for (int t = 0; t < n; ++t, ++w) cube[w] *= taper1d[t] * wxy;
          }
      }

      SpectralCube spec(n);
      for (std::size_t i = 0; i < cube.size(); ++i)
        spec.bins[i] = std::complex<double>(cube[i], 0.0);
      detail::fft_axis(spec, fft, 1, n, n, n, n * n, scratch);
      detail::fft_axis(spec, fft, n, n, 1, n, n * n, scratch);
      detail::fft_axis(spec, fft, n * n, n, 1, n, n, scratch);

      // Same arithmetic as spectral_energy(project_spectrum(...)[m]) so the
      // fused path is exactly equal to the composed one.
      double st = 0.0, sx = 0.0, sy = 0.0;
      for (std::size_t b = 0; b < spec.bins.size(); ++b) {
        const double re = spec.bins[b].real();
        const double im = spec.bins[b].imag();
        st += std::abs(std::complex<double>(re * ft.factors[b], im * ft.factors[b]));
        sx += std::abs(std::complex<double>(re * fx.factors[b], im * fx.factors[b]));
        sy += std::abs(std::complex<double>(re * fy.factors[b], im * fy.factors[b]));
      }
      const double cnt = static_cast<double>(spec.bins.size());
      tile_energy[ti] = {st / cnt, sx / cnt, sy / cnt};
    }
  });

  TileAccumulator at(v.dims), ax(v.dims), ay(v.dims);
  for (std::size_t ti = 0; ti < tile_count; ++ti) {
    at.add_tile_constant(plan.origins[ti], n, tile_energy[ti][0]);
    ax.add_tile_constant(plan.origins[ti], n, tile_energy[ti][1]);
    ay.add_tile_constant(plan.origins[ti], n, tile_energy[ti][2]);
  }

  EnergyVolumes out{at.normalized(), ax.normalized(), ay.normalized()};
  for (Volume3D* m : {&out.e_t, &out.e_x, &out.e_y}) {
    m->sample_interval_ms = v.sample_interval_ms;
    m->first_inline = v.first_inline;
    m->first_crossline = v.first_crossline;
    m->axis_labels = v.axis_labels;
  }
  return out;
}

}  // namespace seisal
