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

#ifndef CRITIC_BENCH__BEV_RENDER_HPP_
#define CRITIC_BENCH__BEV_RENDER_HPP_

#include "critic_bench/miner.hpp"
#include "critic_bench/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace critic_bench
{

struct Rgb
{
  std::uint8_t r{0};
  std::uint8_t g{0};
  std::uint8_t b{0};
  friend bool operator==(const Rgb &, const Rgb &) = default;
};

struct Palette
{
  Rgb background{255, 255, 255};
  Rgb drivable{200, 200, 200};
  Rgb lane_line{110, 110, 110};
  Rgb crosswalk{245, 245, 245};
  Rgb ego{220, 30, 30};
  Rgb waypoints{0, 170, 0};
  Rgb vehicle{40, 90, 220};
  Rgb pedestrian{250, 140, 0};
  Rgb cyclist{150, 60, 200};
  Rgb static_object{80, 80, 80};
  Rgb heading_tick{0, 0, 0};
};

/// The ego (footprint center and rear-axle marker origin) sits at pixel
/// (width / 2, height / 2) with its heading pointing up. Geometry farther
/// than `range` meters from the ego along either axis is not drawn.
struct RenderSpec
{
  int width{512};
  int height{512};
  double meters_per_pixel{0.15};
  double range{60.0};
  Palette palette;
  int marker_radius{3};
  /// Dotted trajectory line: `dot_on` pixels drawn, then `dot_off` skipped.
  int dot_on{3};
  int dot_off{3};

  void validate() const;
};

struct Raster
{
  int width{0};
  int height{0};
  std::vector<std::uint8_t> rgb;  ///< row-major, top row first

  Rgb at(int col, int row) const;
  friend bool operator==(const Raster &, const Raster &) = default;
};

struct PixelPoint
{
  int col{0};
  int row{0};
  friend bool operator==(const PixelPoint &, const PixelPoint &) = default;
};

/// Pixel containing an ego-frame point: col = floor(W/2 - y/mpp),
/// row = floor(H/2 - x/mpp).
PixelPoint to_pixel(Vec2 ego_point, const RenderSpec & spec);

/// Centers of the 8 waypoint markers.
std::vector<PixelPoint> waypoint_pixels(const Trajectory & traj, const RenderSpec & spec);

Raster rasterize_bev(const Scene & scene, const Trajectory & traj, const RenderSpec & spec = {});

/// 8-bit RGB PNG, one IDAT chunk, filter 0 on every row, zlib level 9.
std::string encode_png(const Raster & raster);

/// PNG bytes of one candidate overlaid on the scene.
std::string render_bev(const Scene & scene, const Trajectory & traj, const RenderSpec & spec = {});

/// Renders of slot A and slot B.
std::pair<std::string, std::string> render_pair(
  const Scene & scene, const PreferencePair & pair, const RenderSpec & spec = {});

/// "{pair_id}_{slot}.png" with characters outside [A-Za-z0-9._:-] replaced by '_'.
std::string render_file_name(const std::string & pair_id, Slot slot);

}  // namespace critic_bench

#endif  // CRITIC_BENCH__BEV_RENDER_HPP_
