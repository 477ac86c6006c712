#include "mgpf/world.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mgpf {

double wrap_angle(double theta) {
  const double two_pi = 2.0 * M_PI;
  double w = theta - two_pi * std::floor((theta + M_PI) / two_pi);
  if (w >= M_PI) w -= two_pi;  // guard against floor rounding at the seam
  return w;
}

WallMap::WallMap(int width, int height, double cell_size_cm, std::vector<std::uint8_t> walls,
                 std::vector<RoomRect> rooms)
    : width_(width),
      height_(height),
      cell_size_(cell_size_cm),
      walls_(std::move(walls)),
      rooms_(std::move(rooms)) {
  if (width_ <= 0 || height_ <= 0 || cell_size_ <= 0.0) throw MapError("WallMap: bad dimensions");
  if (walls_.size() != static_cast<std::size_t>(width_) * height_) {
    throw MapError("WallMap: grid size mismatch");
  }
}

bool WallMap::free_at(double x_cm, double y_cm) const { return !wall_at(cell_x(x_cm), cell_y(y_cm)); }

int WallMap::free_cell_count() const {
  int n = 0;
  for (auto w : walls_) n += (w == 0);
  return n;
}

double WallMap::free_area_m2() const {
  return free_cell_count() * cell_size_ * cell_size_ / 1e4;
}

bool WallMap::fully_connected() const {
  const int total_free = free_cell_count();
  if (total_free == 0) return false;
  std::vector<std::uint8_t> seen(walls_.size(), 0);
  std::deque<std::pair<int, int>> queue;
  for (int cy = 0; cy < height_ && queue.empty(); ++cy) {
    for (int cx = 0; cx < width_ && queue.empty(); ++cx) {
      if (!wall_at(cx, cy)) {
        queue.emplace_back(cx, cy);
        seen[static_cast<std::size_t>(cy) * width_ + cx] = 1;
      }
    }
  }
  int reached = 0;
  while (!queue.empty()) {
    auto [cx, cy] = queue.front();
    queue.pop_front();
    ++reached;
    const int dx[] = {1, -1, 0, 0};
    const int dy[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int nx = cx + dx[k];
      const int ny = cy + dy[k];
      if (wall_at(nx, ny)) continue;
      auto& mark = seen[static_cast<std::size_t>(ny) * width_ + nx];
      if (!mark) {
        mark = 1;
        queue.emplace_back(nx, ny);
      }
    }
  }
  return reached == total_free;
}

void WallMap::save(std::ostream& out) const {
  out << "mgpfmap 1\n";
  out << "cell_size_cm " << std::setprecision(17) << cell_size_ << "\n";
  out << "width " << width_ << "\n";
  out << "height " << height_ << "\n";
  out << "rooms " << rooms_.size() << "\n";
  for (const auto& r : rooms_) {
    out << "room " << r.x0 << " " << r.y0 << " " << r.x1 << " " << r.y1 << "\n";
  }
  for (int cy = 0; cy < height_; ++cy) {
    for (int cx = 0; cx < width_; ++cx) out << (wall_at(cx, cy) ? '#' : '.');
    out << "\n";
  }
}

void WallMap::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw MapError("cannot open map file for writing: " + path);
  save(out);
}

WallMap WallMap::load(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "mgpfmap" || version != 1) throw MapError("not a map file");
  std::string key;
  double cell = 0.0;
  int width = 0, height = 0, n_rooms = 0;
  in >> key >> cell >> key >> width >> key >> height >> key >> n_rooms;
  std::vector<RoomRect> rooms(static_cast<std::size_t>(n_rooms));
  for (auto& r : rooms) in >> key >> r.x0 >> r.y0 >> r.x1 >> r.y1;
  std::vector<std::uint8_t> walls(static_cast<std::size_t>(width) * height, 1);
  std::string row;
  for (int cy = 0; cy < height; ++cy) {
    in >> row;
    if (static_cast<int>(row.size()) != width) throw MapError("map row length mismatch");
    for (int cx = 0; cx < width; ++cx) {
      walls[static_cast<std::size_t>(cy) * width + cx] = row[static_cast<std::size_t>(cx)] == '#';
    }
  }
  return WallMap(width, height, cell, std::move(walls), std::move(rooms));
}

WallMap WallMap::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MapError("cannot open map file: " + path);
  return load(in);
}

namespace {

struct Splitter {
  std::vector<std::uint8_t>& walls;
  int gw;

  void set_wall(int cx, int cy, bool wall) {
    walls[static_cast<std::size_t>(cy) * gw + cx] = wall ? 1 : 0;
  }
};

}  // namespace

WallMap generate_map(const MapSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const double cs = spec.cell_size_cm;
  const int min_side = std::max(2, static_cast<int>(std::lround(spec.min_room_side_cm / cs)));

  const double width_cm = rng.uniform(spec.width_min_cm, spec.width_max_cm);
  const double area_cm2 = rng.uniform(spec.area_min_m2, spec.area_max_m2) * 1e4;
  const double height_cm = area_cm2 / width_cm;
  const int iw = static_cast<int>(std::lround(width_cm / cs));   // interior cells
  const int ih = static_cast<int>(std::lround(height_cm / cs));
  if (iw < min_side || ih < min_side) throw MapError("generate_map: rooms do not fit the spec");

  const int gw = iw + 2;
  const int gh = ih + 2;
  std::vector<std::uint8_t> walls(static_cast<std::size_t>(gw) * gh, 0);
  Splitter grid{walls, gw};
  for (int cx = 0; cx < gw; ++cx) {
    grid.set_wall(cx, 0, true);
    grid.set_wall(cx, gh - 1, true);
  }
  for (int cy = 0; cy < gh; ++cy) {
    grid.set_wall(0, cy, true);
    grid.set_wall(gw - 1, cy, true);
  }

  const int target_rooms =
      spec.rooms_min + (spec.rooms_max > spec.rooms_min
                            ? rng.uniform_int(spec.rooms_max - spec.rooms_min + 1)
                            : 0);

  std::vector<RoomRect> leaves = {RoomRect{1, 1, gw - 1, gh - 1}};
  while (static_cast<int>(leaves.size()) < target_rooms) {
    // Split the largest leaf that still has room for two min-sized children.
    int best = -1;
    double best_area = 0.0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const auto& leaf = leaves[i];
      const bool splittable =
          (leaf.x1 - leaf.x0 >= 2 * min_side + 1) || (leaf.y1 - leaf.y0 >= 2 * min_side + 1);
      if (splittable && leaf.area_cells() > best_area) {
        best = static_cast<int>(i);
        best_area = leaf.area_cells();
      }
    }
    if (best < 0) break;

    RoomRect leaf = leaves[static_cast<std::size_t>(best)];
    const int w = leaf.x1 - leaf.x0;
    const int h = leaf.y1 - leaf.y0;
    const bool can_v = w >= 2 * min_side + 1;
    const bool can_h = h >= 2 * min_side + 1;
    const bool vertical = can_v && (!can_h || w >= h);

    if (vertical) {
      const int xs = leaf.x0 + min_side + rng.uniform_int(w - 2 * min_side);
      for (int cy = leaf.y0; cy < leaf.y1; ++cy) grid.set_wall(xs, cy, true);
      const int door_len = std::min(spec.door_cells, h);
      const int dy0 = leaf.y0 + rng.uniform_int(h - door_len + 1);
      for (int cy = dy0; cy < dy0 + door_len; ++cy) grid.set_wall(xs, cy, false);
      leaves[static_cast<std::size_t>(best)] = RoomRect{leaf.x0, leaf.y0, xs, leaf.y1};
      leaves.push_back(RoomRect{xs + 1, leaf.y0, leaf.x1, leaf.y1});
    } else {
      const int ys = leaf.y0 + min_side + rng.uniform_int(h - 2 * min_side);
      for (int cx = leaf.x0; cx < leaf.x1; ++cx) grid.set_wall(cx, ys, true);
      const int door_len = std::min(spec.door_cells, w);
      const int dx0 = leaf.x0 + rng.uniform_int(w - door_len + 1);
      for (int cx = dx0; cx < dx0 + door_len; ++cx) grid.set_wall(cx, ys, false);
      leaves[static_cast<std::size_t>(best)] = RoomRect{leaf.x0, leaf.y0, leaf.x1, ys};
      leaves.push_back(RoomRect{leaf.x0, ys + 1, leaf.x1, leaf.y1});
    }
  }

  if (static_cast<int>(leaves.size()) < spec.rooms_min && target_rooms > 1) {
    throw MapError("generate_map: rooms do not fit the spec");
  }

  WallMap map(gw, gh, cs, std::move(walls), std::move(leaves));
  if (!map.fully_connected()) throw MapError("generate_map: produced a disconnected map");
  return map;
}

namespace {

bool segment_free(const WallMap& map, double x0, double y0, double x1, double y1) {
  const double length = std::hypot(x1 - x0, y1 - y0);
  const int samples = std::max(1, static_cast<int>(std::ceil(length / (map.cell_size() * 0.25))));
  for (int s = 0; s <= samples; ++s) {
    const double t = static_cast<double>(s) / samples;
    if (!map.free_at(x0 + t * (x1 - x0), y0 + t * (y1 - y0))) return false;
  }
  return true;
}

Pose sample_free_pose(const WallMap& map, Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const int cx = rng.uniform_int(map.width());
    const int cy = rng.uniform_int(map.height());
    // keep one cell of clearance so scans and first moves are well posed
    bool clear = true;
    for (int oy = -1; oy <= 1 && clear; ++oy) {
      for (int ox = -1; ox <= 1 && clear; ++ox) clear = !map.wall_at(cx + ox, cy + oy);
    }
    if (!clear) continue;
    Pose p;
    p.x = (cx + rng.uniform()) * map.cell_size();
    p.y = (cy + rng.uniform()) * map.cell_size();
    p.theta = rng.uniform(-M_PI, M_PI);
    return p;
  }
  throw MapError("generate_trajectory: no free start pose found");
}

}  // namespace

Trajectory generate_trajectory(const WallMap& map, int steps, std::uint64_t seed) {
  Rng rng(seed);
  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(steps) + 1);
  traj.steps.push_back(TrajectoryStep{sample_free_pose(map, rng), Odometry{}});

  constexpr double kTurnMin = 15.0 * M_PI / 180.0;
  constexpr double kTurnMax = 60.0 * M_PI / 180.0;

  for (int t = 1; t <= steps; ++t) {
    const Pose& prev = traj.steps.back().pose;
    bool forward = rng.uniform() < 0.8;
    if (forward) {
      ++traj.forward_selected;
    } else {
      ++traj.turn_selected;
    }

    if (forward) {
      const double dist = rng.uniform(20.0, 80.0);
      const double nx = prev.x + dist * std::cos(prev.theta);
      const double ny = prev.y + dist * std::sin(prev.theta);
      if (segment_free(map, prev.x, prev.y, nx, ny)) {
        Pose next{nx, ny, prev.theta};
        traj.steps.push_back(TrajectoryStep{next, Odometry{nx - prev.x, ny - prev.y, 0.0}});
        continue;
      }
      ++traj.forward_blocked;  // blocked moves become turns
    }

    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double dtheta = sign * rng.uniform(kTurnMin, kTurnMax);
    Pose next{prev.x, prev.y, wrap_angle(prev.theta + dtheta)};
    traj.steps.push_back(TrajectoryStep{next, Odometry{0.0, 0.0, dtheta}});
  }
  return traj;
}

void save_trajectory_csv(const Trajectory& traj, std::uint64_t seed, std::ostream& out) {
  out << "step,true_x_cm,true_y_cm,true_theta_rad,odo_dx,odo_dy,odo_dtheta,seed\n";
  out << std::setprecision(17);
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const auto& s = traj.steps[t];
    out << t << "," << s.pose.x << "," << s.pose.y << "," << s.pose.theta << "," << s.odo.dx << ","
        << s.odo.dy << "," << s.odo.dtheta << "," << seed << "\n";
  }
}

Trajectory load_trajectory_csv(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    TrajectoryStep step;
    std::getline(row, field, ',');  // step index
    std::getline(row, field, ',');
    step.pose.x = std::stod(field);
    std::getline(row, field, ',');
    step.pose.y = std::stod(field);
    std::getline(row, field, ',');
    step.pose.theta = std::stod(field);
    std::getline(row, field, ',');
    step.odo.dx = std::stod(field);
    std::getline(row, field, ',');
    step.odo.dy = std::stod(field);
    std::getline(row, field, ',');
    step.odo.dtheta = std::stod(field);
    traj.steps.push_back(step);
  }
  return traj;
}

Odometry noisy_odometry(const Odometry& true_u, const std::array<double, 3>& sigma, Rng& rng) {
  Odometry out = true_u;
  out.dx += sigma[0] * rng.normal();
  out.dy += sigma[1] * rng.normal();
  out.dtheta += sigma[2] * rng.normal();
  return out;
}

double DepthScan::beam_angle(int beam) {
  return -0.5 * kScanFov + kScanFov * static_cast<double>(beam) / (kScanBeams - 1);
}

bool DepthScan::all_out_of_range() const {
  for (double r : ranges) {
    if (r < max_range) return false;
  }
  return true;
}

DepthScan simulate_scan(const WallMap& map, const Pose& pose) {
  const int start_cx = map.cell_x(pose.x);
  const int start_cy = map.cell_y(pose.y);
  if (map.wall_at(start_cx, start_cy)) throw MapError("simulate_scan: pose inside a wall");

  const double cs = map.cell_size();
  DepthScan scan;
  for (int beam = 0; beam < kScanBeams; ++beam) {
    const double ang = pose.theta + DepthScan::beam_angle(beam);
    const double dx = std::cos(ang);
    const double dy = std::sin(ang);

    // Amanatides-Woo grid traversal; the hit distance is the parameter at
    // which the ray enters the first wall cell.
    int cx = start_cx;
    int cy = start_cy;
    const int step_x = dx > 0.0 ? 1 : -1;
    const int step_y = dy > 0.0 ? 1 : -1;
    const double inv_dx = dx != 0.0 ? 1.0 / dx : std::numeric_limits<double>::infinity();
    const double inv_dy = dy != 0.0 ? 1.0 / dy : std::numeric_limits<double>::infinity();
    double t_max_x = dx != 0.0
                         ? ((cx + (step_x > 0 ? 1 : 0)) * cs - pose.x) * inv_dx
                         : std::numeric_limits<double>::infinity();
    double t_max_y = dy != 0.0
                         ? ((cy + (step_y > 0 ? 1 : 0)) * cs - pose.y) * inv_dy
                         : std::numeric_limits<double>::infinity();
    const double t_delta_x = dx != 0.0 ? cs * std::abs(inv_dx) : std::numeric_limits<double>::infinity();
    const double t_delta_y = dy != 0.0 ? cs * std::abs(inv_dy) : std::numeric_limits<double>::infinity();

    double range = scan.max_range;
    while (true) {
      double t;
      if (t_max_x < t_max_y) {
        t = t_max_x;
        t_max_x += t_delta_x;
        cx += step_x;
      } else {
        t = t_max_y;
        t_max_y += t_delta_y;
        cy += step_y;
      }
      if (t > scan.max_range) break;
      if (map.wall_at(cx, cy)) {
        range = t;
        break;
      }
    }
    scan.ranges[static_cast<std::size_t>(beam)] = range;
  }
  return scan;
}

}  // namespace mgpf
