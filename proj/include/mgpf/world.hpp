#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mgpf/errors.hpp"
#include "mgpf/rng.hpp"

namespace mgpf {

constexpr int kScanBeams = 56;
constexpr double kScanFov = M_PI / 3.0;  // 60 degrees, centered on heading
constexpr double kScanMaxRange = 1000.0;  // cm; also the no-hit sentinel

/// Wrap to [-pi, pi).
double wrap_angle(double theta);

/// Planar robot state. Positions in cm, theta wrapped to [-pi, pi).
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// Relative motion in the global frame (additive model).
struct Odometry {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
};

/// Axis-aligned room rectangle in cell coordinates, half-open [x0,x1)x[y0,y1).
struct RoomRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double area_cells() const { return double(x1 - x0) * double(y1 - y0); }
  bool contains_cell(int cx, int cy) const { return cx >= x0 && cx < x1 && cy >= y0 && cy < y1; }
};

/// Boolean occupancy grid (true = wall) with a room index. Cell (cx, cy)
/// covers [cx*cell, (cx+1)*cell) x [cy*cell, (cy+1)*cell) in cm; out-of-range
/// queries read as wall.
class WallMap {
 public:
  WallMap(int width, int height, double cell_size_cm, std::vector<std::uint8_t> walls,
          std::vector<RoomRect> rooms);

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  const std::vector<RoomRect>& rooms() const { return rooms_; }
  const std::vector<std::uint8_t>& walls() const { return walls_; }

  bool wall_at(int cx, int cy) const {
    if (cx < 0 || cy < 0 || cx >= width_ || cy >= height_) return true;
    return walls_[static_cast<std::size_t>(cy) * width_ + cx] != 0;
  }
  bool free_at(double x_cm, double y_cm) const;

  int cell_x(double x_cm) const { return static_cast<int>(std::floor(x_cm / cell_size_)); }
  int cell_y(double y_cm) const { return static_cast<int>(std::floor(y_cm / cell_size_)); }

  double free_area_m2() const;
  int free_cell_count() const;

  /// Every free cell reachable from every other free cell (4-connectivity).
  bool fully_connected() const;

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static WallMap load(std::istream& in);
  static WallMap load_file(const std::string& path);

 private:
  int width_;
  int height_;
  double cell_size_;
  std::vector<std::uint8_t> walls_;
  std::vector<RoomRect> rooms_;
};

/// Generation knobs. Defaults target the benchmark environment: buildings of
/// 4-7 rooms totalling roughly 200 m^2 at 37 m^2 per room.
struct MapSpec {
  int rooms_min = 4;
  int rooms_max = 7;
  double width_min_cm = 1200.0;
  double width_max_cm = 1800.0;
  double area_min_m2 = 170.0;
  double area_max_m2 = 240.0;
  double cell_size_cm = 10.0;
  int door_cells = 8;           // 80 cm doors at the default resolution
  double min_room_side_cm = 250.0;
};

WallMap generate_map(const MapSpec& spec, std::uint64_t seed);

struct TrajectoryStep {
  Pose pose;       // true pose after applying odo
  Odometry odo;    // global-frame motion into this pose; zero at step 0
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;  // steps.size() == requested steps + 1
  // action selection counts before collision fallback
  int forward_selected = 0;
  int turn_selected = 0;
  int forward_blocked = 0;
};

/// Random walk: forward (p=0.8) by U[20,80] cm or turn (p=0.2) by
/// +-U[15,60] degrees; blocked forward moves fall back to a turn.
Trajectory generate_trajectory(const WallMap& map, int steps, std::uint64_t seed);

void save_trajectory_csv(const Trajectory& traj, std::uint64_t seed, std::ostream& out);
Trajectory load_trajectory_csv(std::istream& in);

/// true_u plus a zero-mean draw with the given per-axis standard deviations.
Odometry noisy_odometry(const Odometry& true_u, const std::array<double, 3>& sigma, Rng& rng);

struct DepthScan {
  std::array<double, kScanBeams> ranges{};  // cm, in (0, max_range]
  double max_range = kScanMaxRange;

  /// Beam angle relative to the heading, in [-fov/2, fov/2].
  static double beam_angle(int beam);
  bool all_out_of_range() const;
};

/// Grid ray march to the first wall cell for each of the 56 beams.
/// Throws MapError when the pose is inside a wall.
DepthScan simulate_scan(const WallMap& map, const Pose& pose);

}  // namespace mgpf
