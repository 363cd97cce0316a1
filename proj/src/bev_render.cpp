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

#include <fmt/format.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <optional>

namespace critic_bench
{

void RenderSpec::validate() const
{
  if (width <= 0 || height <= 0) {
    throw ConfigError("render spec: canvas must be at least 1x1");
  }
  if (!(meters_per_pixel > 0.0)) {
    throw ConfigError("render spec: meters_per_pixel must be positive");
  }
  if (!(range > 0.0)) {
    throw ConfigError("render spec: range must be positive");
  }
  if (marker_radius < 0 || dot_on <= 0 || dot_off < 0) {
    throw ConfigError("render spec: marker radius and dot pattern must be nonnegative");
  }
}

Rgb Raster::at(int col, int row) const
{
  const auto i = 3 * (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col));
  return {rgb.at(i), rgb.at(i + 1), rgb.at(i + 2)};
}

namespace
{

// Continuous canvas coordinates: u grows right, v grows down.
struct CanvasPoint
{
  double u;
  double v;
};

CanvasPoint to_canvas(Vec2 p, const RenderSpec & spec)
{
  return {0.5 * spec.width - p.y / spec.meters_per_pixel, 0.5 * spec.height - p.x / spec.meters_per_pixel};
}

class Canvas
{
public:
  explicit Canvas(const RenderSpec & spec) : spec_(spec)
  {
    raster_.width = spec.width;
    raster_.height = spec.height;
    raster_.rgb.resize(3 * static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height));
    const double half_cols = spec.range / spec.meters_per_pixel;
    col_min_ = std::max(0, static_cast<int>(std::floor(0.5 * spec.width - half_cols)));
    col_max_ = std::min(spec.width - 1, static_cast<int>(std::ceil(0.5 * spec.width + half_cols)) - 1);
    row_min_ = std::max(0, static_cast<int>(std::floor(0.5 * spec.height - half_cols)));
    row_max_ = std::min(spec.height - 1, static_cast<int>(std::ceil(0.5 * spec.height + half_cols)) - 1);
    for (int r = 0; r < spec.height; ++r) {
      for (int c = 0; c < spec.width; ++c) {
        put(c, r, spec.palette.background);
      }
    }
  }

  void set(int c, int r, Rgb color)
  {
    if (c >= col_min_ && c <= col_max_ && r >= row_min_ && r <= row_max_) {
      put(c, r, color);
    }
  }

  // Scanline fill at pixel centers, even-odd rule. `pattern` decides per pixel.
  template <typename Pattern>
  void fill_polygon(const std::vector<CanvasPoint> & poly, Pattern pattern)
  {
    if (poly.size() < 3) {
      return;
    }
    double v_lo = poly[0].v;
    double v_hi = poly[0].v;
    for (const auto & p : poly) {
      v_lo = std::min(v_lo, p.v);
      v_hi = std::max(v_hi, p.v);
    }
    const int r0 = std::max(row_min_, static_cast<int>(std::floor(v_lo)));
    const int r1 = std::min(row_max_, static_cast<int>(std::ceil(v_hi)));
    std::vector<double> xs;
    for (int r = r0; r <= r1; ++r) {
      const double y = r + 0.5;
      xs.clear();
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto & a = poly[i];
        const auto & b = poly[(i + 1) % poly.size()];
        if ((a.v <= y && b.v > y) || (b.v <= y && a.v > y)) {
          xs.push_back(a.u + (y - a.v) * (b.u - a.u) / (b.v - a.v));
        }
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
        // Pixel c is inside when its center c + 0.5 lies in [xs[k], xs[k + 1]).
        const int c0 = std::max(col_min_, static_cast<int>(std::ceil(xs[k] - 0.5)));
        const int c1 = std::min(col_max_, static_cast<int>(std::ceil(xs[k + 1] - 0.5)) - 1);
        for (int c = c0; c <= c1; ++c) {
          if (const auto color = pattern(c, r)) {
            put(c, r, *color);
          }
        }
      }
    }
  }

  void fill_polygon(const std::vector<CanvasPoint> & poly, Rgb color)
  {
    fill_polygon(poly, [color](int, int) { return std::optional<Rgb>(color); });
  }

  // Bresenham line between the pixels containing a and b, clipped to the
  // canvas first. `step` counts drawn steps for dotted patterns and carries
  // across calls.
  void line(CanvasPoint a, CanvasPoint b, Rgb color, int dot_on = 1, int dot_off = 0, long * step = nullptr)
  {
    if (!clip(a, b)) {
      return;
    }
    int c0 = static_cast<int>(std::floor(a.u));
    int r0 = static_cast<int>(std::floor(a.v));
    const int c1 = static_cast<int>(std::floor(b.u));
    const int r1 = static_cast<int>(std::floor(b.v));
    const int dc = std::abs(c1 - c0);
    const int dr = -std::abs(r1 - r0);
    const int sc = c0 < c1 ? 1 : -1;
    const int sr = r0 < r1 ? 1 : -1;
    int err = dc + dr;
    long local = 0;
    long & k = step ? *step : local;
    while (true) {
      if (k % (dot_on + dot_off) < dot_on) {
        set(c0, r0, color);
      }
      ++k;
      if (c0 == c1 && r0 == r1) {
        break;
      }
      const int e2 = 2 * err;
      if (e2 >= dr) {
        err += dr;
        c0 += sc;
      }
      if (e2 <= dc) {
        err += dc;
        r0 += sr;
      }
    }
  }

  // Filled midpoint circle.
  void disc(PixelPoint center, int radius, Rgb color)
  {
    int x = radius;
    int y = 0;
    int d = 1 - radius;
    auto span = [&](int row, int half) {
      for (int c = center.col - half; c <= center.col + half; ++c) {
        set(c, row, color);
      }
    };
    while (x >= y) {
      span(center.row + y, x);
      span(center.row - y, x);
      span(center.row + x, y);
      span(center.row - x, y);
      ++y;
      if (d < 0) {
        d += 2 * y + 1;
      } else {
        --x;
        d += 2 * (y - x) + 1;
      }
    }
  }

  Raster take() { return std::move(raster_); }

private:
  void put(int c, int r, Rgb color)
  {
    const auto i = 3 * (static_cast<std::size_t>(r) * static_cast<std::size_t>(spec_.width) + static_cast<std::size_t>(c));
    raster_.rgb[i] = color.r;
    raster_.rgb[i + 1] = color.g;
    raster_.rgb[i + 2] = color.b;
  }

  // Liang-Barsky against [0, W) x [0, H) widened by one pixel.
  bool clip(CanvasPoint & a, CanvasPoint & b) const
  {
    const double lo_u = -1.0;
    const double hi_u = spec_.width + 1.0;
    const double lo_v = -1.0;
    const double hi_v = spec_.height + 1.0;
    const double du = b.u - a.u;
    const double dv = b.v - a.v;
    double t0 = 0.0;
    double t1 = 1.0;
    const double p[4] = {-du, du, -dv, dv};
    const double q[4] = {a.u - lo_u, hi_u - a.u, a.v - lo_v, hi_v - a.v};
    for (int i = 0; i < 4; ++i) {
      if (p[i] == 0.0) {
        if (q[i] < 0.0) {
          return false;
        }
        continue;
      }
      const double t = q[i] / p[i];
      if (p[i] < 0.0) {
        t0 = std::max(t0, t);
      } else {
        t1 = std::min(t1, t);
      }
      if (t0 > t1) {
        return false;
      }
    }
    const CanvasPoint na{a.u + t0 * du, a.v + t0 * dv};
    const CanvasPoint nb{a.u + t1 * du, a.v + t1 * dv};
    a = na;
    b = nb;
    return true;
  }

  const RenderSpec & spec_;
  Raster raster_;
  int col_min_{0};
  int col_max_{0};
  int row_min_{0};
  int row_max_{0};
};

std::vector<CanvasPoint> polygon_to_canvas(const Polygon & poly, const Pose2D & frame, const RenderSpec & spec)
{
  std::vector<CanvasPoint> out;
  out.reserve(poly.size());
  for (const auto & p : poly) {
    out.push_back(to_canvas(inverse_transform_point(frame, p), spec));
  }
  return out;
}

std::vector<CanvasPoint> box_to_canvas(const OrientedBox & box, const RenderSpec & spec)
{
  std::vector<CanvasPoint> out;
  for (const auto & c : box.corners()) {
    out.push_back(to_canvas(c, spec));
  }
  return out;
}

Rgb agent_color(AgentCategory c, const Palette & p)
{
  switch (c) {
    case AgentCategory::kVehicle:
      return p.vehicle;
    case AgentCategory::kPedestrian:
      return p.pedestrian;
    case AgentCategory::kCyclist:
      return p.cyclist;
    case AgentCategory::kStaticObject:
      return p.static_object;
  }
  return p.vehicle;
}

void draw_lane_edges(Canvas & canvas, const Lane & lane, const Pose2D & frame, const RenderSpec & spec)
{
  const auto & line = lane.centerline;
  const double hw = 0.5 * lane.width;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    const Vec2 a = inverse_transform_point(frame, line[i]);
    const Vec2 b = inverse_transform_point(frame, line[i + 1]);
    const Vec2 d = b - a;
    const double len = norm(d);
    if (len <= 0.0) {
      continue;
    }
    const Vec2 n{-d.y / len * hw, d.x / len * hw};
    canvas.line(to_canvas(a + n, spec), to_canvas(b + n, spec), spec.palette.lane_line);
    canvas.line(to_canvas(a - n, spec), to_canvas(b - n, spec), spec.palette.lane_line);
  }
}

}  // namespace

PixelPoint to_pixel(Vec2 ego_point, const RenderSpec & spec)
{
  const auto c = to_canvas(ego_point, spec);
  return {static_cast<int>(std::floor(c.u)), static_cast<int>(std::floor(c.v))};
}

std::vector<PixelPoint> waypoint_pixels(const Trajectory & traj, const RenderSpec & spec)
{
  std::vector<PixelPoint> out;
  for (const auto & w : traj.waypoints) {
    out.push_back(to_pixel(w.pose.position(), spec));
  }
  return out;
}

Raster rasterize_bev(const Scene & scene, const Trajectory & traj, const RenderSpec & spec)
{
  spec.validate();
  const auto & pal = spec.palette;
  const Pose2D & frame = scene.ego_pose;
  Canvas canvas(spec);

  for (const auto & poly : scene.map.drivable_area) {
    canvas.fill_polygon(polygon_to_canvas(poly, frame, spec), pal.drivable);
  }
  for (const auto & poly : scene.map.crosswalks) {
    const Rgb stripe = pal.crosswalk;
    canvas.fill_polygon(polygon_to_canvas(poly, frame, spec), [stripe](int c, int r) {
      return ((c + r) / 4) % 2 == 0 ? std::optional<Rgb>(stripe) : std::nullopt;
    });
  }
  for (const auto & lane : scene.map.lanes) {
    draw_lane_edges(canvas, lane, frame, spec);
  }
  for (const auto & agent : scene.agents) {
    const OrientedBox box{relative_to(frame, agent.box.center), agent.box.length, agent.box.width};
    canvas.fill_polygon(box_to_canvas(box, spec), agent_color(agent.category, pal));
    const Vec2 front = transform_point(box.center, {0.5 * box.length, 0.0});
    canvas.line(to_canvas(box.center.position(), spec), to_canvas(front, spec), pal.heading_tick);
  }
  const OrientedBox ego{Pose2D{0.0, 0.0, 0.0}, scene.ego_box_dims.length, scene.ego_box_dims.width};
  canvas.fill_polygon(box_to_canvas(ego, spec), pal.ego);

  long step = 0;
  CanvasPoint prev = to_canvas({0.0, 0.0}, spec);
  for (const auto & w : traj.waypoints) {
    const CanvasPoint next = to_canvas(w.pose.position(), spec);
    canvas.line(prev, next, pal.waypoints, spec.dot_on, spec.dot_off, &step);
    prev = next;
  }
  for (const auto & p : waypoint_pixels(traj, spec)) {
    canvas.disc(p, spec.marker_radius, pal.waypoints);
  }
  return canvas.take();
}

namespace
{

void put_u32(std::string & out, std::uint32_t v)
{
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

void put_chunk(std::string & out, const char * type, const std::string & data)
{
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::string body = std::string(type, 4) + data;
  out += body;
  put_u32(out, static_cast<std::uint32_t>(
    crc32(0L, reinterpret_cast<const Bytef *>(body.data()), static_cast<uInt>(body.size()))));
}

}  // namespace

std::string encode_png(const Raster & raster)
{
  if (raster.width <= 0 || raster.height <= 0 ||
      raster.rgb.size() != 3 * static_cast<std::size_t>(raster.width) * static_cast<std::size_t>(raster.height)) {
    throw PreconditionError("encode_png: raster size mismatch");
  }
  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(raster.width));
  put_u32(ihdr, static_cast<std::uint32_t>(raster.height));
  ihdr += std::string("\x08\x02\x00\x00\x00", 5);
  put_chunk(out, "IHDR", ihdr);

  const std::size_t stride = 3 * static_cast<std::size_t>(raster.width);
  std::string filtered;
  filtered.reserve((stride + 1) * static_cast<std::size_t>(raster.height));
  for (int r = 0; r < raster.height; ++r) {
    filtered.push_back('\0');
    filtered.append(reinterpret_cast<const char *>(raster.rgb.data()) + static_cast<std::size_t>(r) * stride, stride);
  }
  uLongf len = compressBound(static_cast<uLong>(filtered.size()));
  std::string compressed(len, '\0');
  if (compress2(reinterpret_cast<Bytef *>(compressed.data()), &len,
                reinterpret_cast<const Bytef *>(filtered.data()), static_cast<uLong>(filtered.size()), 9) != Z_OK) {
    throw Error("encode_png: zlib compression failed");
  }
  compressed.resize(len);
  put_chunk(out, "IDAT", compressed);
  put_chunk(out, "IEND", "");
  return out;
}

std::string render_bev(const Scene & scene, const Trajectory & traj, const RenderSpec & spec)
{
  return encode_png(rasterize_bev(scene, traj, spec));
}

std::pair<std::string, std::string> render_pair(
  const Scene & scene, const PreferencePair & pair, const RenderSpec & spec)
{
  if (pair.scene_id != scene.scene_id) {
    throw PreconditionError(fmt::format("render_pair: pair {} is not from scene {}", pair.pair_id, scene.scene_id));
  }
  return {render_bev(scene, pair.slot_a.trajectory, spec), render_bev(scene, pair.slot_b.trajectory, spec)};
}

std::string render_file_name(const std::string & pair_id, Slot slot)
{
  std::string name = pair_id;
  for (auto & c : name) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == ':' || c == '-';
    if (!ok) {
      c = '_';
    }
  }
  return fmt::format("{}_{}.png", name, to_string(slot));
}

}  // namespace critic_bench
