#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "seisal/spectral.hpp"
#include "support/oracles.hpp"

using namespace seisal;

namespace {

std::vector<double> random_cube(int n, std::uint64_t seed, double lo = -1.0,
                                double hi = 1.0) {
  refimpl::UniformStream u(seed);
  std::vector<double> cube(static_cast<std::size_t>(n) * n * n);
  for (double& d : cube) d = lo + u.next() * (hi - lo);
  return cube;
}

double max_mag(const SpectralCube& s) {
  double m = 0.0;
  for (const auto& b : s.bins) m = std::max(m, std::abs(b));
  return m;
}

}  // namespace

TEST_CASE("transform sizes are validated") {
  REQUIRE_THROWS_AS(FftPlan(12), std::invalid_argument);
  REQUIRE_THROWS_AS(FftPlan(0), std::invalid_argument);
  REQUIRE_THROWS_WITH(FftPlan(6),
                      Catch::Matchers::ContainsSubstring("powers of two"));
  std::vector<double> wrong(10, 0.0);
  REQUIRE_THROWS_AS(local_fft(wrong, 4), std::invalid_argument);
  std::vector<double> big(32 * 32 * 32, 0.0);
  REQUIRE_THROWS_AS(local_dft_oracle(big, 32), std::invalid_argument);
}

TEST_CASE("reference transform: impulse at the cube origin") {
  const int n = 4;
  std::vector<double> cube(static_cast<std::size_t>(n) * n * n, 0.0);
  cube[0] = 1.0;
  const SpectralCube spec = local_dft_oracle(cube, n);
  for (const auto& b : spec.bins)
    REQUIRE(std::abs(std::abs(b) - 1.0) < 1e-12);
}

TEST_CASE("reference transform: constant cube is DC-only") {
  const int n = 4;
  const double c = 2.125;
  std::vector<double> cube(static_cast<std::size_t>(n) * n * n, c);
  const SpectralCube spec = local_dft_oracle(cube, n);
  REQUIRE(std::abs(spec.bin(0, 0, 0) - std::complex<double>(64.0 * c, 0.0)) <
          1e-10);
  for (int k = spec.min_freq(); k <= spec.max_freq(); ++k)
    for (int j = spec.min_freq(); j <= spec.max_freq(); ++j)
      for (int i = spec.min_freq(); i <= spec.max_freq(); ++i)
        if (i || j || k) REQUIRE(std::abs(spec.bin(i, j, k)) < 1e-10);
}

TEST_CASE("reference transform matches an independent triple-sum DFT") {
  const int n = 4;
  const auto cube = random_cube(n, 1001);
  const SpectralCube kron = local_dft_oracle(cube, n);
  const auto direct = refimpl::dft_triple_sum(cube, n);
  for (std::size_t b = 0; b < kron.bins.size(); ++b)
    REQUIRE(std::abs(kron.bins[b] - direct[b]) < 1e-10);
}

TEST_CASE("fast transform matches the reference on 20 random 8-cubes") {
  const int n = 8;
  for (int trial = 0; trial < 20; ++trial) {
    const auto cube = random_cube(n, 5000 + trial);
    const SpectralCube fast = local_fft(cube, n);
    const SpectralCube slow = local_dft_oracle(cube, n);
    const double limit = 1e-8 * max_mag(slow);
    for (std::size_t b = 0; b < fast.bins.size(); ++b)
      REQUIRE(std::abs(fast.bins[b] - slow.bins[b]) <= limit);
  }
}

TEST_CASE("fast transform: zero cube, constant offset behavior") {
  const int n = 8;
  std::vector<double> zero(static_cast<std::size_t>(n) * n * n, 0.0);
  const SpectralCube zs = local_fft(zero, n);
  for (const auto& b : zs.bins) REQUIRE(b == std::complex<double>(0.0, 0.0));

  const auto cube = random_cube(n, 42);
  auto shifted = cube;
  for (double& d : shifted) d += 7.3;
  const SpectralCube a = local_fft(cube, n);
  const SpectralCube b = local_fft(shifted, n);
  const double n3 = static_cast<double>(n) * n * n;
  REQUIRE(std::abs(b.bin(0, 0, 0) - a.bin(0, 0, 0) -
                   std::complex<double>(7.3 * n3, 0.0)) < 1e-9 * 7.3 * n3);
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    if (i == 0) continue;  // raw index 0 is DC
    REQUIRE(std::abs(a.bins[i] - b.bins[i]) < 1e-9 * (1.0 + max_mag(a)));
  }
}

TEST_CASE("spectra of real cubes are Hermitian") {
  const int n = 8;
  const auto cube = random_cube(n, 77);
  const SpectralCube spec = local_fft(cube, n);
  const double tol = 1e-6 * max_mag(spec);
  for (int k = spec.min_freq() + 1; k <= spec.max_freq(); ++k)
    for (int j = spec.min_freq() + 1; j <= spec.max_freq(); ++j)
      for (int i = spec.min_freq() + 1; i <= spec.max_freq(); ++i)
        REQUIRE(std::abs(spec.bin(-i, -j, -k) - std::conj(spec.bin(i, j, k))) <
                tol);
}

TEST_CASE("projection factor: cardinal values") {
  REQUIRE(projection_factor(Axis::T, 0, 3, 4) == 1.0);
  REQUIRE(projection_factor(Axis::T, 0, 0, 0) == 0.0);
  REQUIRE(projection_factor(Axis::X, 0, 0, 0) == 0.0);
  REQUIRE(projection_factor(Axis::Y, 0, 0, 0) == 0.0);
  REQUIRE_THAT(projection_factor(Axis::X, 1, 2, 2),
               Catch::Matchers::WithinAbs(std::sqrt(5.0) / 3.0, 1e-15));
  // Against the independent reference formula on a grid.
  for (int i = -4; i < 4; ++i)
    for (int j = -4; j < 4; ++j)
      for (int k = -4; k < 4; ++k) {
        REQUIRE(projection_factor(Axis::T, i, j, k) ==
                refimpl::projection_factor_ref('t', i, j, k));
        REQUIRE(projection_factor(Axis::X, i, j, k) ==
                refimpl::projection_factor_ref('x', i, j, k));
        REQUIRE(projection_factor(Axis::Y, i, j, k) ==
                refimpl::projection_factor_ref('y', i, j, k));
      }
}

TEST_CASE("projection factors: squared sum is 2 off DC") {
  const int n = 8;
  const ProjectionField ft = projection_field(Axis::T, n);
  const ProjectionField fx = projection_field(Axis::X, n);
  const ProjectionField fy = projection_field(Axis::Y, n);
  REQUIRE(ft.factors[0] == 0.0);
  REQUIRE(fx.factors[0] == 0.0);
  REQUIRE(fy.factors[0] == 0.0);
  for (std::size_t b = 1; b < ft.factors.size(); ++b) {
    const double s = ft.factors[b] * ft.factors[b] +
                     fx.factors[b] * fx.factors[b] +
                     fy.factors[b] * fy.factors[b];
    REQUIRE(std::abs(s - 2.0) < 1e-12);
    REQUIRE(ft.factors[b] >= 0.0);
    REQUIRE(ft.factors[b] <= 1.0);
  }
}

TEST_CASE("projection splits a single off-axis bin as expected") {
  SpectralCube spec(8);
  spec.bin(0, 3, -4) = std::complex<double>(2.0, -1.0);
  const auto parts = project_spectrum(spec);
  const double full = std::norm(spec.bin(0, 3, -4));
  REQUIRE_THAT(std::norm(parts[0].bin(0, 3, -4)),
               Catch::Matchers::WithinRel(full, 1e-12));
  REQUIRE_THAT(std::norm(parts[1].bin(0, 3, -4)),
               Catch::Matchers::WithinRel(full * 16.0 / 25.0, 1e-12));
  REQUIRE_THAT(std::norm(parts[2].bin(0, 3, -4)),
               Catch::Matchers::WithinRel(full * 9.0 / 25.0, 1e-12));
  // Everything else is zero, including DC.
  for (std::size_t b = 0; b < spec.bins.size(); ++b)
    if (b != spec.raw_index(0, 3, SpectralCube::raw_of_centered(-4, 8)))
      for (int m = 0; m < 3; ++m)
        REQUIRE(parts[m].bins[b] == std::complex<double>(0.0, 0.0));
}

TEST_CASE("projection energy identity on 20 random spectra") {
  refimpl::UniformStream u(31337);
  for (int trial = 0; trial < 20; ++trial) {
    SpectralCube spec(8);
    for (auto& b : spec.bins)
      b = std::complex<double>(u.next() * 2.0 - 1.0, u.next() * 2.0 - 1.0);
    const auto parts = project_spectrum(spec);
    double lhs = 0.0;
    for (int m = 0; m < 3; ++m)
      for (const auto& b : parts[m].bins) lhs += std::norm(b);
    double rhs = 0.0;
    for (std::size_t b = 1; b < spec.bins.size(); ++b)
      rhs += std::norm(spec.bins[b]);
    rhs *= 2.0;
    REQUIRE_THAT(lhs, Catch::Matchers::WithinRel(rhs, 1e-9));
    for (int m = 0; m < 3; ++m)
      REQUIRE(parts[m].bin(0, 0, 0) == std::complex<double>(0.0, 0.0));
  }
}

TEST_CASE("spectral energy: zero and constant inputs") {
  SpectralCube zero(8);
  REQUIRE(spectral_energy(zero) == 0.0);

  const int n = 8;
  std::vector<double> cube(static_cast<std::size_t>(n) * n * n, 3.75);
  const auto parts = project_spectrum(local_fft(cube, n));
  for (int m = 0; m < 3; ++m) REQUIRE(spectral_energy(parts[m]) == 0.0);
}

TEST_CASE("spectral energy matches the reference pipeline on a random cube") {
  const int n = 4;
  const auto cube = random_cube(n, 2718);
  const auto direct = refimpl::dft_triple_sum(cube, n);

  const char axes[3] = {'t', 'x', 'y'};
  const auto fast = project_spectrum(local_fft(cube, n));
  for (int m = 0; m < 3; ++m) {
    double acc = 0.0;
    std::size_t flat = 0;
    for (int uy = 0; uy < n; ++uy)
      for (int ux = 0; ux < n; ++ux)
        for (int ut = 0; ut < n; ++ut, ++flat) {
          const int i = SpectralCube::centered_of_raw(ut, n);
          const int j = SpectralCube::centered_of_raw(ux, n);
          const int k = SpectralCube::centered_of_raw(uy, n);
          acc += std::abs(direct[flat]) *
                 refimpl::projection_factor_ref(axes[m], i, j, k);
        }
    const double expected = acc / static_cast<double>(n * n * n);
    REQUIRE_THAT(spectral_energy(fast[static_cast<std::size_t>(m)]),
                 Catch::Matchers::WithinAbs(expected, 1e-9));
  }
}

TEST_CASE("energy volumes: constant volume gives exactly zero energies") {
  Volume3D v({16, 16, 16});
  for (float& f : v.data) f = 11.25f;
  const TileGrid plan = tile_plan(v.dims, 8, 4);
  const EnergyVolumes e = energy_volumes(v, plan);
  for (const Volume3D* m : {&e.e_t, &e.e_x, &e.e_y})
    for (float f : m->data) REQUIRE(f == 0.0f);
}

TEST_CASE("energy volumes: fused path equals the composed operations") {
  Volume3D v = refimpl::random_volume({8, 8, 8}, 404, -2.0f, 2.0f);
  const TileGrid plan = tile_plan(v.dims, 8, 4);  // single tile
  const EnergyVolumes e = energy_volumes(v, plan);

  const int n = 8;
  std::vector<double> cube(static_cast<std::size_t>(n) * n * n);
  const double anchor = v.at(0, 0, 0);
  std::size_t w = 0;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      for (int t = 0; t < n; ++t, ++w) cube[w] = v.at(t, x, y) - anchor;
  const auto parts = project_spectrum(local_fft(cube, n));
  const float et = static_cast<float>(spectral_energy(parts[0]));
  const float ex = static_cast<float>(spectral_energy(parts[1]));
  const float ey = static_cast<float>(spectral_energy(parts[2]));
  for (int i = 0; i < 8 * 8 * 8; ++i) {
    REQUIRE(e.e_t.data[static_cast<std::size_t>(i)] == et);
    REQUIRE(e.e_x.data[static_cast<std::size_t>(i)] == ex);
    REQUIRE(e.e_y.data[static_cast<std::size_t>(i)] == ey);
  }
}

TEST_CASE("energy volumes: lateral energies dominate for pure t-layering") {
  // v varies only along t, so its local spectra live on the t-frequency
  // axis, where the t-projection factor vanishes.
  Volume3D v({32, 32, 32});
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      for (int t = 0; t < 32; ++t)
        v.data[v.index(t, x, y)] =
            static_cast<float>(std::sin(2.0 * 3.14159265358979 * 3.0 * t / 32.0));
  const EnergyVolumes e = energy_volumes(v, tile_plan(v.dims, 8, 4));
  const auto mean = [](const Volume3D& m) {
    double s = 0.0;
    for (float f : m.data) s += f;
    return s / static_cast<double>(m.data.size());
  };
  const double mt = mean(e.e_t), mx = mean(e.e_x), my = mean(e.e_y);
  REQUIRE(mx > 5.0 * mt);
  REQUIRE(my > 5.0 * mt);
  REQUIRE(mx > 0.0);
}

TEST_CASE("energy volumes: exact invariance to a representable offset") {
  // Values on the 2^-10 lattice in [0, 0.5) keep v + 7.3f exact per voxel,
  // so the residual cubes are identical and the outputs must match bit for
  // bit.
  Volume3D v({32, 32, 32});
  std::mt19937 gen(31);
  for (float& f : v.data)
    f = static_cast<float>(gen() % 512) * 0x1.0p-10f;
  Volume3D shifted = v;
  for (float& f : shifted.data) f += 7.3f;

  const TileGrid plan = tile_plan(v.dims, 16, 8);
  const EnergyVolumes a = energy_volumes(v, plan);
  const EnergyVolumes b = energy_volumes(shifted, plan);
  REQUIRE(a.e_t.data == b.e_t.data);
  REQUIRE(a.e_x.data == b.e_x.data);
  REQUIRE(a.e_y.data == b.e_y.data);
}

TEST_CASE("energy volumes: t-x transposition equivariance on a cube") {
  const Volume3D v = refimpl::random_volume({16, 16, 16}, 55);
  Volume3D vt(v.dims);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      for (int t = 0; t < 16; ++t)
        vt.data[vt.index(t, x, y)] = v.at(x, t, y);

  const TileGrid plan = tile_plan(v.dims, 8, 4);
  const EnergyVolumes a = energy_volumes(v, plan);
  const EnergyVolumes b = energy_volumes(vt, plan);

  double peak = 0.0;
  for (float f : a.e_x.data) peak = std::max(peak, std::abs(static_cast<double>(f)));
  const double tol = 1e-6 * (peak + 1.0);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      for (int t = 0; t < 16; ++t) {
        REQUIRE(std::abs(b.e_t.at(t, x, y) - a.e_x.at(x, t, y)) < tol);
        REQUIRE(std::abs(b.e_x.at(t, x, y) - a.e_t.at(x, t, y)) < tol);
        REQUIRE(std::abs(b.e_y.at(t, x, y) - a.e_y.at(x, t, y)) < tol);
      }
}

TEST_CASE("energy volumes: thread count does not change the bits") {
  const Volume3D v = refimpl::random_volume({24, 24, 24}, 808, -1.0f, 1.0f);
  const TileGrid plan = tile_plan(v.dims, 8, 4);
  const EnergyVolumes a = energy_volumes(v, plan, Taper::None, 1);
  const EnergyVolumes b = energy_volumes(v, plan, Taper::None, 8);
  REQUIRE(a.e_t.data == b.e_t.data);
  REQUIRE(a.e_x.data == b.e_x.data);
  REQUIRE(a.e_y.data == b.e_y.data);
}

TEST_CASE("energy volumes: taper option is plumbed through") {
  const Volume3D v = refimpl::random_volume({16, 16, 16}, 9001);
  const TileGrid plan = tile_plan(v.dims, 8, 4);
  const EnergyVolumes plain = energy_volumes(v, plan, Taper::None);
  const EnergyVolumes hann = energy_volumes(v, plan, Taper::Hann);
  REQUIRE(plain.e_t.data != hann.e_t.data);
  REQUIRE(taper_from_name("hann") == Taper::Hann);
  REQUIRE(taper_from_name("none") == Taper::None);
  REQUIRE_THROWS_AS(taper_from_name("hamming"), std::invalid_argument);
}

TEST_CASE("energy volumes: plan must match the volume") {
  const Volume3D v = refimpl::random_volume({16, 16, 16}, 1);
  const TileGrid plan = tile_plan({24, 24, 24}, 8, 4);
  REQUIRE_THROWS_AS(energy_volumes(v, plan), std::invalid_argument);
}
