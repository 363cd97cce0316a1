// Copyright 2026 The critic-bench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "critic_bench/bev_render.hpp"
#include "critic_bench/errors.hpp"
#include "critic_bench/fixtures.hpp"
#include "critic_bench/scene_io.hpp"
#include "critic_bench/vocabulary.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>
#include <zlib.h>

#include <cstdlib>
#include <filesystem>

namespace cb = critic_bench;

namespace
{

std::uint32_t be32(const std::string & s, std::size_t i)
{
  return (static_cast<std::uint32_t>(static_cast<unsigned char>(s[i])) << 24) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(s[i + 1])) << 16) |
         (static_cast<std::uint32_t>(static_cast<unsigned char>(s[i + 2])) << 8) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(s[i + 3]));
}

// Minimal decoder for the encoder's output form (RGB8, filter 0).
cb::Raster decode_png(const std::string & png)
{
  EXPECT_EQ(png.substr(0, 8), std::string("\x89PNG\r\n\x1a\n", 8));
  cb::Raster r;
  std::string idat;
  std::size_t i = 8;
  while (i < png.size()) {
    const auto len = be32(png, i);
    const std::string type = png.substr(i + 4, 4);
    const std::string data = png.substr(i + 8, len);
    const auto crc = crc32(0L, reinterpret_cast<const Bytef *>(png.data() + i + 4), len + 4);
    EXPECT_EQ(crc, be32(png, i + 8 + len)) << type;
    if (type == "IHDR") {
      r.width = static_cast<int>(be32(data, 0));
      r.height = static_cast<int>(be32(data, 4));
      EXPECT_EQ(data.substr(8), std::string("\x08\x02\x00\x00\x00", 5));
    } else if (type == "IDAT") {
      idat += data;
    }
    i += 12 + len;
  }
  const std::size_t stride = 3 * static_cast<std::size_t>(r.width);
  std::string raw((stride + 1) * static_cast<std::size_t>(r.height), '\0');
  uLongf raw_len = raw.size();
  EXPECT_EQ(uncompress(reinterpret_cast<Bytef *>(raw.data()), &raw_len,
                       reinterpret_cast<const Bytef *>(idat.data()), idat.size()), Z_OK);
  for (int row = 0; row < r.height; ++row) {
    const std::size_t off = static_cast<std::size_t>(row) * (stride + 1);
    EXPECT_EQ(raw[off], '\0');
    r.rgb.insert(r.rgb.end(), raw.begin() + static_cast<long>(off + 1), raw.begin() + static_cast<long>(off + 1 + stride));
  }
  return r;
}

cb::Trajectory stationary()
{
  return test_support::path_trajectory([](double) { return cb::Pose2D{0.0, 0.0, 0.0}; });
}

}  // namespace

TEST(BevRender, StationaryMarkersAtRearAxlePixel)
{
  const auto scene = test_support::straight_road();
  const cb::RenderSpec spec;
  const auto px = cb::waypoint_pixels(stationary(), spec);
  ASSERT_EQ(px.size(), 8u);
  for (const auto & p : px) {
    EXPECT_EQ(p, (cb::PixelPoint{256, 256}));
  }
  const auto r = cb::rasterize_bev(scene, stationary(), spec);
  EXPECT_EQ(r.at(256, 256), spec.palette.waypoints);
}

TEST(BevRender, StraightTrajectoryEquallySpaced)
{
  const auto scene = test_support::straight_road();
  cb::RenderSpec spec;
  spec.meters_per_pixel = 0.25;  // 5 m between markers = 20 px
  const auto px = cb::waypoint_pixels(test_support::straight(10.0), spec);
  for (int k = 0; k < 8; ++k) {
    EXPECT_EQ(px[static_cast<std::size_t>(k)], (cb::PixelPoint{256, 256 - 20 * (k + 1)}));
  }
  const auto r = cb::rasterize_bev(scene, test_support::straight(10.0), spec);
  for (const auto & p : px) {
    for (int d = -spec.marker_radius; d <= spec.marker_radius; ++d) {
      EXPECT_EQ(r.at(p.col + d, p.row), spec.palette.waypoints);
      EXPECT_EQ(r.at(p.col, p.row + d), spec.palette.waypoints);
    }
  }

  // Default scale: row offsets are floor(256 - 5k / 0.15).
  const cb::RenderSpec def;
  const auto dpx = cb::waypoint_pixels(test_support::straight(10.0), def);
  for (int k = 0; k < 8; ++k) {
    const double v = 256.0 - 5.0 * (k + 1) / 0.15;
    EXPECT_EQ(dpx[static_cast<std::size_t>(k)].row, static_cast<int>(std::floor(v)));
  }
}

TEST(BevRender, EgoRedRectangleAtCenterForAnyFrame)
{
  for (const double heading : {0.0, 1.0, -2.5, 3.1}) {
    test_support::RoadOptions o;
    o.frame = {100.0 * heading, -40.0, heading};
    const auto scene = test_support::straight_road(o);
    const cb::RenderSpec spec;
    const auto r = cb::rasterize_bev(scene, test_support::straight(10.0), spec);
    // 4.6 x 1.9 m footprint: rows 256 +- 15, cols 256 +- 6, heading up.
    EXPECT_EQ(r.at(256, 256 + 14), spec.palette.ego);
    EXPECT_EQ(r.at(256 - 5, 256 + 10), spec.palette.ego);
    EXPECT_EQ(r.at(256 + 5, 256 - 10), spec.palette.ego);
    EXPECT_NE(r.at(256 + 8, 256), spec.palette.ego);
    EXPECT_NE(r.at(256, 256 + 17), spec.palette.ego);
  }
}

TEST(BevRender, DrawsAgentsAndDrivable)
{
  auto scene = test_support::straight_road();
  test_support::add_agent(scene, "ped", {10.0, -2.0, 0.0}, 0.8, 0.8, {0.0, 0.0}, cb::AgentCategory::kPedestrian);
  const cb::RenderSpec spec;
  const auto r = cb::rasterize_bev(scene, stationary(), spec);
  const auto ped = cb::to_pixel({10.0, -2.0}, spec);
  EXPECT_EQ(r.at(ped.col + 1, ped.row + 1), spec.palette.pedestrian);
  const auto road = cb::to_pixel({-20.0, 1.0}, spec);
  EXPECT_EQ(r.at(road.col, road.row), spec.palette.drivable);
  const auto off = cb::to_pixel({-20.0, 20.0}, spec);
  EXPECT_EQ(r.at(off.col, off.row), spec.palette.background);
}

TEST(BevRender, RangeClipsAndFarGeometryIsHarmless)
{
  auto scene = test_support::straight_road({.x_min = -1e6, .x_max = 1e6});
  test_support::add_agent(scene, "far", {5e5, 3e5, 0.3}, 4.0, 2.0, {0.0, 0.0});
  cb::RenderSpec spec;
  spec.range = 10.0;
  const auto r = cb::rasterize_bev(scene, test_support::straight(5.0), spec);
  const auto inside = cb::to_pixel({-5.0, 0.5}, spec);
  EXPECT_EQ(r.at(inside.col, inside.row), spec.palette.drivable);
  const auto beyond = cb::to_pixel({-20.0, 0.5}, spec);
  EXPECT_EQ(r.at(beyond.col, beyond.row), spec.palette.background);
  // Markers past the window are clipped too.
  const auto last = cb::waypoint_pixels(test_support::straight(5.0), spec).back();
  EXPECT_EQ(r.at(last.col, last.row), spec.palette.background);
}

TEST(BevRender, PngDecodesToRaster)
{
  auto scene = test_support::straight_road();
  test_support::add_agent(scene, "car", {15.0, 3.5, 0.2}, 4.5, 1.9, {5.0, 0.0});
  cb::RenderSpec spec;
  spec.width = 200;
  spec.height = 120;
  const auto raster = cb::rasterize_bev(scene, test_support::straight(8.0), spec);
  EXPECT_EQ(decode_png(cb::encode_png(raster)), raster);
  EXPECT_THROW(cb::encode_png(cb::Raster{2, 2, {}}), cb::PreconditionError);
}

TEST(BevRender, Deterministic)
{
  auto scene = test_support::straight_road({.frame = {3.0, 4.0, 0.4}});
  test_support::add_agent(scene, "car", {15.0, 3.5, 0.2}, 4.5, 1.9, {5.0, 0.0});
  EXPECT_EQ(cb::render_bev(scene, test_support::straight(9.0)), cb::render_bev(scene, test_support::straight(9.0)));
}

TEST(BevRender, SpecValidation)
{
  cb::RenderSpec spec;
  spec.meters_per_pixel = 0.0;
  EXPECT_THROW(spec.validate(), cb::ConfigError);
  spec = {};
  spec.width = 0;
  EXPECT_THROW(spec.validate(), cb::ConfigError);
}

TEST(BevRender, FileNames)
{
  EXPECT_EQ(cb::render_file_name("fx-0001:case1", cb::Slot::kA), "fx-0001:case1_A.png");
  EXPECT_EQ(cb::render_file_name("a/b c", cb::Slot::kB), "a_b_c_B.png");
}

class BevFixture : public ::testing::Test
{
protected:
  static void SetUpTestSuite()
  {
    corpus_ = new cb::FixtureCorpus(cb::generate_fixtures({.scenes = 20, .seed = 7}));
    const auto vocab = cb::build_vocabulary(cb::fixture_vocab_params());
    const auto ds = cb::build_dataset(corpus_->scenes, vocab, corpus_->splits, {});
    pairs_ = new std::vector<cb::PreferencePair>();
    for (const auto & [split, ps] : ds.pairs) {
      pairs_->insert(pairs_->end(), ps.begin(), ps.end());
    }
    std::sort(pairs_->begin(), pairs_->end(), [](const auto & a, const auto & b) { return a.pair_id < b.pair_id; });
  }
  static void TearDownTestSuite()
  {
    delete corpus_;
    delete pairs_;
  }
  static const cb::Scene & scene_of(const cb::PreferencePair & p)
  {
    for (const auto & s : corpus_->scenes) {
      if (s.scene_id == p.scene_id) {
        return s;
      }
    }
    throw std::runtime_error("scene not found");
  }
  static cb::FixtureCorpus * corpus_;
  static std::vector<cb::PreferencePair> * pairs_;
};

cb::FixtureCorpus * BevFixture::corpus_ = nullptr;
std::vector<cb::PreferencePair> * BevFixture::pairs_ = nullptr;

TEST_F(BevFixture, SwapAndDuplicateSlots)
{
  ASSERT_GE(pairs_->size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto & p = (*pairs_)[i];
    const auto [a, b] = cb::render_pair(scene_of(p), p);
    const auto [fa, fb] = cb::render_pair(scene_of(p), cb::flipped(p));
    EXPECT_EQ(fa, b);
    EXPECT_EQ(fb, a);
    EXPECT_NE(a, b);
    auto same = p;
    same.slot_b = same.slot_a;
    const auto [sa, sb] = cb::render_pair(scene_of(p), same);
    EXPECT_EQ(sa, sb);
  }
}

TEST_F(BevFixture, GoldenImages)
{
  const std::filesystem::path dir = std::filesystem::path(CRITIC_BENCH_TEST_DATA) / "golden" / "bev";
  const char * update = std::getenv("CRITIC_BENCH_UPDATE_GOLDEN");
  ASSERT_GE(pairs_->size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto & p = (*pairs_)[i];
    const auto [a, b] = cb::render_pair(scene_of(p), p);
    for (const auto & [slot, bytes] : {std::pair{cb::Slot::kA, a}, std::pair{cb::Slot::kB, b}}) {
      const auto path = dir / cb::render_file_name(p.pair_id, slot);
      if (update && std::string(update) == "1") {
        cb::write_file(path, bytes);
        continue;
      }
      ASSERT_TRUE(std::filesystem::exists(path)) << path << " (set CRITIC_BENCH_UPDATE_GOLDEN=1 to create)";
      EXPECT_TRUE(cb::read_file(path) == bytes) << path;
    }
  }
}
