#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "seisal/dcs.hpp"
#include "seisal/spectral.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace seisal;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

bool has_offset(const DirectionalWindow& w, int i0, int j0, int r0) {
  for (const auto& o : w.offsets)
    if (o.i0 == i0 && o.j0 == j0 && o.r0 == r0) return true;
  return false;
}

}  // namespace

TEST_CASE("window construction: axis window offsets and weights") {
  const DirectionalWindow w = make_window("axis-t", 2, 1.0);
  REQUIRE(w.offsets.size() == 4);
  // Lexicographic (i0, j0, r0) order.
  REQUIRE(w.offsets[0].i0 == -2);
  REQUIRE(w.offsets[1].i0 == -1);
  REQUIRE(w.offsets[2].i0 == 1);
  REQUIRE(w.offsets[3].i0 == 2);
  for (const auto& o : w.offsets) {
    REQUIRE(o.j0 == 0);
    REQUIRE(o.r0 == 0);
  }
  REQUIRE(w.offsets[0].w == std::exp(-2.0));
  REQUIRE(w.offsets[1].w == std::exp(-0.5));
  REQUIRE(w.offsets[2].w == std::exp(-0.5));
  REQUIRE(w.offsets[3].w == std::exp(-2.0));
}

TEST_CASE("window construction: diagonal windows use matched signs only") {
  const DirectionalWindow w = make_window("diag-tx", 1, 1.0);
  REQUIRE(w.offsets.size() == 2);
  REQUIRE(has_offset(w, -1, -1, 0));
  REQUIRE(has_offset(w, 1, 1, 0));
  REQUIRE_FALSE(has_offset(w, 1, -1, 0));
  REQUIRE_FALSE(has_offset(w, -1, 1, 0));
  for (const auto& o : w.offsets) REQUIRE(o.w == std::exp(-1.0));

  const DirectionalWindow ty = make_window("diag-ty", 1, 1.0);
  REQUIRE(ty.offsets.size() == 2);
  REQUIRE(has_offset(ty, 1, 0, 1));
  REQUIRE(has_offset(ty, -1, 0, -1));
  const DirectionalWindow xy = make_window("diag-xy", 1, 1.0);
  REQUIRE(xy.offsets.size() == 2);
  REQUIRE(has_offset(xy, 0, 1, 1));
  REQUIRE(has_offset(xy, 0, -1, -1));
}

TEST_CASE("window construction: full window is the Chebyshev shell") {
  const DirectionalWindow w = make_window("full", 1, 1e6);
  REQUIRE(w.offsets.size() == 26);
  REQUIRE_FALSE(has_offset(w, 0, 0, 0));
  for (const auto& o : w.offsets) {
    REQUIRE(o.w > 0.999999);
    REQUIRE(o.w <= 1.0);
  }
  REQUIRE(make_window("full", 2, 1.0).offsets.size() == 124);
}

TEST_CASE("window construction: invalid parameters are rejected") {
  REQUIRE_THROWS_AS(make_window("spiral", 1, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(make_window("full", 0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(make_window("full", 1, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(make_window("full", 1, -2.0), std::invalid_argument);
  REQUIRE_THROWS_AS(weighting_from_name("sideways"), std::invalid_argument);
  REQUIRE(weighting_from_name("inner") == DcsWeighting::Inner);
  REQUIRE(weighting_from_name("outer") == DcsWeighting::Outer);
}

TEST_CASE("window templates: parsing, comments, and rejection") {
  TempDir tmp;
  const std::string good = tmp.file("probe.win");
  write_text(good,
             "# lateral probe\n"
             "1 0 0 0.5\n"
             "-1 0 0 0.5   # mirrored\n"
             "\n"
             "0 2 0 1.0\n");
  const DirectionalWindow w = load_window(good);
  REQUIRE(w.offsets.size() == 3);
  REQUIRE(has_offset(w, 1, 0, 0));
  REQUIRE(has_offset(w, -1, 0, 0));
  REQUIRE(has_offset(w, 0, 2, 0));
  REQUIRE(w.offsets[2].w == 1.0);

  const auto expect_reject = [&](const char* name, const std::string& body,
                                 const std::string& needle) {
    const std::string p = tmp.file(name);
    write_text(p, body);
    REQUIRE_THROWS_WITH(load_window(p),
                        Catch::Matchers::ContainsSubstring(needle));
  };
  expect_reject("short.win", "1 0 0\n", "expected 'i0 j0 r0 w'");
  expect_reject("junk.win", "1 0 0 0.5 9\n", "trailing junk");
  expect_reject("center.win", "0 0 0 0.5\n", "center");
  expect_reject("zero_w.win", "1 0 0 0.0\n", "weight must be in (0,1]");
  expect_reject("big_w.win", "1 0 0 1.5\n", "weight must be in (0,1]");
  expect_reject("dup.win", "1 0 0 0.5\n1 0 0 0.4\n", "duplicate offset");
  expect_reject("empty.win", "# nothing here\n", "no offsets");
  REQUIRE_THROWS_AS(load_window(tmp.file("missing.win")), config_error);
}

TEST_CASE("center-surround: zero field maps to zero") {
  Volume3D e({6, 5, 4});
  const Volume3D s =
      dcs_saliency(e, make_dcs_config("full", 2, 1.0, DcsWeighting::Inner));
  for (float f : s.data) REQUIRE(f == 0.0f);
}

TEST_CASE("center-surround: constant field has a closed-form response") {
  const float c = 3.0f;
  Volume3D e({8, 7, 6});
  for (float& f : e.data) f = c;

  const DcsConfig cfg = make_dcs_config("full", 1, 1.0, DcsWeighting::Inner);
  double wsum = 0.0;
  for (const auto& o : cfg.window.offsets) wsum += 1.0 - o.w;
  const double expected = static_cast<double>(c) * wsum / 26.0;

  const Volume3D s = dcs_saliency(e, cfg);
  // Clamped neighbors at the boundary read the same constant, so every voxel
  // (boundary included) carries the same value.
  for (float f : s.data)
    REQUIRE_THAT(static_cast<double>(f),
                 Catch::Matchers::WithinRel(expected, 1e-6));

  const Volume3D so =
      dcs_saliency(e, make_dcs_config("full", 1, 1.0, DcsWeighting::Outer));
  for (float f : so.data) REQUIRE(f == 0.0f);
}

TEST_CASE("center-surround: impulse response along one axis") {
  Volume3D e({5, 5, 5});
  e.data[e.index(2, 2, 2)] = 1.0f;
  const double w = std::exp(-0.5);

  const Volume3D s =
      dcs_saliency(e, make_dcs_config("axis-t", 1, 1.0, DcsWeighting::Inner));
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x)
      for (int t = 0; t < 5; ++t) {
        const double got = s.at(t, x, y);
        double want = 0.0;
        if (x == 2 && y == 2) {
          if (t == 2) want = 1.0;           // |1 - w*0| on both sides
          if (t == 1 || t == 3) want = w / 2.0;  // one neighbor is the spike
        }
        REQUIRE_THAT(got, Catch::Matchers::WithinAbs(want, 1e-7));
      }

  const Volume3D so =
      dcs_saliency(e, make_dcs_config("axis-t", 1, 1.0, DcsWeighting::Outer));
  REQUIRE_THAT(static_cast<double>(so.at(2, 2, 2)),
               Catch::Matchers::WithinAbs(w, 1e-7));
  REQUIRE_THAT(static_cast<double>(so.at(1, 2, 2)),
               Catch::Matchers::WithinAbs(w / 2.0, 1e-7));
}

TEST_CASE("center-surround: boundary corner uses clamped neighbors") {
  Volume3D e({3, 3, 3});
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x)
      for (int t = 0; t < 3; ++t)
        e.data[e.index(t, x, y)] = static_cast<float>(t + 10 * x + 100 * y);

  const double w = std::exp(-0.5);
  const Volume3D s =
      dcs_saliency(e, make_dcs_config("axis-y", 1, 1.0, DcsWeighting::Inner));
  // At (0,0,0): the -1 neighbor clamps onto the corner itself (value 0), the
  // +1 neighbor reads 100.
  REQUIRE_THAT(static_cast<double>(s.at(0, 0, 0)),
               Catch::Matchers::WithinAbs((0.0 + 100.0 * w) / 2.0, 1e-5));
  // At (0,0,2): the +1 neighbor clamps onto the voxel itself (value 200), the
  // -1 neighbor reads 100.
  REQUIRE_THAT(static_cast<double>(s.at(0, 0, 2)),
               Catch::Matchers::WithinAbs(
                   (std::abs(200.0 - 100.0 * w) +
                    std::abs(200.0 - 200.0 * w)) / 2.0, 1e-4));
}

TEST_CASE("center-surround matches the naive reference on random fields") {
  const Volume3D e = refimpl::random_volume({16, 16, 16}, 2024, -1.0f, 2.0f);
  const char* tags[] = {"axis-t", "axis-x", "axis-y", "diag-tx",
                        "diag-ty", "diag-xy", "full"};
  for (const char* tag : tags) {
    for (const bool outer : {false, true}) {
      const DcsConfig cfg = make_dcs_config(
          tag, 2, 1.3, outer ? DcsWeighting::Outer : DcsWeighting::Inner);
      const Volume3D got = dcs_saliency(e, cfg, 3);
      const Volume3D want = refimpl::dcs_reference(e, cfg.window, outer);
      for (std::size_t i = 0; i < got.data.size(); ++i)
        REQUIRE_THAT(static_cast<double>(got.data[i]),
                     Catch::Matchers::WithinAbs(
                         static_cast<double>(want.data[i]), 1e-6));
    }
  }
}

TEST_CASE("center-surround: response scales linearly with the field") {
  const Volume3D e = refimpl::random_volume({8, 8, 8}, 7);
  Volume3D scaled(e.dims);
  const float alpha = 3.5f;
  for (std::size_t i = 0; i < e.data.size(); ++i)
    scaled.data[i] = alpha * e.data[i];

  const DcsConfig cfg = make_dcs_config("full", 1, 1.0, DcsWeighting::Inner);
  const Volume3D a = dcs_saliency(e, cfg);
  const Volume3D b = dcs_saliency(scaled, cfg);
  for (std::size_t i = 0; i < a.data.size(); ++i)
    REQUIRE_THAT(static_cast<double>(b.data[i]),
                 Catch::Matchers::WithinAbs(
                     static_cast<double>(alpha) * a.data[i], 1e-5));
}

TEST_CASE("center-surround: thread count does not change the bits") {
  const Volume3D e = refimpl::random_volume({12, 13, 14}, 99);
  const DcsConfig cfg = make_dcs_config("full", 2, 1.0, DcsWeighting::Inner);
  const Volume3D a = dcs_saliency(e, cfg, 1);
  const Volume3D b = dcs_saliency(e, cfg, 8);
  REQUIRE(a.data == b.data);
}

TEST_CASE("directional maps: normalization and dimension checks") {
  EnergyVolumes ev;
  ev.e_t = refimpl::random_volume({8, 8, 8}, 1);
  ev.e_x = refimpl::random_volume({8, 8, 8}, 2);
  ev.e_y = refimpl::random_volume({8, 8, 8}, 3);
  const DcsConfig cfg = make_dcs_config("full", 1, 1.0, DcsWeighting::Inner);
  const SaliencyMaps maps = dcs_all(ev, cfg, cfg, cfg);
  for (const Volume3D* m : {&maps.s_t, &maps.s_x, &maps.s_y}) {
    float lo = 1e30f, hi = -1e30f;
    for (float f : m->data) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
    REQUIRE(lo == 0.0f);
    REQUIRE(hi == 1.0f);
  }

  EnergyVolumes zero;
  zero.e_t = Volume3D({8, 8, 8});
  zero.e_x = Volume3D({8, 8, 8});
  zero.e_y = Volume3D({8, 8, 8});
  const SaliencyMaps flat = dcs_all(zero, cfg, cfg, cfg);
  for (float f : flat.s_t.data) REQUIRE(f == 0.0f);

  EnergyVolumes bad = std::move(zero);
  bad.e_x = Volume3D({8, 8, 9});
  REQUIRE_THROWS_AS(dcs_all(bad, cfg, cfg, cfg), std::invalid_argument);
}

TEST_CASE("directional maps: peak sits on a lateral sign-flip plane") {
  // v carries a pure t oscillation whose sign flips across x = 16. Tiles away
  // from the flip vary only along t, contributing nothing to the t-projected
  // energy; only the tile column straddling the flip (x in [12,19]) does.
  // After a radius-2 surround, the s_t peak must sit within two voxels of
  // that slab.
  Volume3D v({32, 32, 32});
  for (int y = 0; y < 32; ++y)
    for (int x = 0; x < 32; ++x)
      for (int t = 0; t < 32; ++t) {
        const double a =
            std::sin(2.0 * 3.14159265358979 * 3.0 * t / 32.0);
        v.data[v.index(t, x, y)] = static_cast<float>(x < 16 ? a : -a);
      }
  const EnergyVolumes ev = energy_volumes(v, tile_plan(v.dims, 8, 4));

  // The energy slab itself is confined to x in [12,19].
  for (int y = 0; y < 32; ++y)
    for (int t = 0; t < 32; ++t)
      for (int x : {0, 5, 11, 20, 26, 31})
        REQUIRE(ev.e_t.at(t, x, y) == 0.0f);
  double slab = 0.0;
  for (int x = 12; x <= 19; ++x) slab += ev.e_t.at(16, x, 16);
  REQUIRE(slab > 0.0);

  const DcsConfig cfg = make_dcs_config("full", 2, 1.0, DcsWeighting::Inner);
  const SaliencyMaps maps = dcs_all(ev, cfg, cfg, cfg);
  std::size_t best = 0;
  for (std::size_t i = 1; i < maps.s_t.data.size(); ++i)
    if (maps.s_t.data[i] > maps.s_t.data[best]) best = i;
  const int bx = static_cast<int>((best / 32) % 32);
  REQUIRE(bx >= 10);
  REQUIRE(bx <= 21);
  // Far from the slab the map is identically zero.
  for (int y : {0, 16, 31})
    for (int t : {0, 16, 31}) REQUIRE(maps.s_t.at(t, 2, y) == 0.0f);
}

TEST_CASE("center-surround: full window commutes with t-x transposition") {
  const Volume3D e = refimpl::random_volume({10, 10, 10}, 404);
  Volume3D et(e.dims);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x)
      for (int t = 0; t < 10; ++t)
        et.data[et.index(t, x, y)] = e.at(x, t, y);

  const DcsConfig cfg = make_dcs_config("full", 1, 1.0, DcsWeighting::Inner);
  const Volume3D a = dcs_saliency(e, cfg);
  const Volume3D b = dcs_saliency(et, cfg);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x)
      for (int t = 0; t < 10; ++t)
        REQUIRE_THAT(static_cast<double>(b.at(t, x, y)),
                     Catch::Matchers::WithinAbs(
                         static_cast<double>(a.at(x, t, y)), 1e-6));
}
