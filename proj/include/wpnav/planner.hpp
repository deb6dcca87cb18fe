#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "wpnav/common.hpp"
#include "wpnav/goselo.hpp"
#include "wpnav/occupancy.hpp"

namespace wpnav {

inline constexpr int kWaypointCount = 10;
inline constexpr double kLabelSpacing = 0.1;      // meters between label waypoints
inline constexpr double kCollisionSampleStep = 0.02;
inline constexpr double kShortcutSpacing = 0.05;  // replacement vertex spacing

struct GridPath {
    std::vector<std::pair<int, int>> cells;  // (ix, iy), 8-connected
    std::vector<Vec2> world_points;          // cell centers
    double cost = 0.0;                       // straights*res + diagonals*sqrt(2)*res
    int straight_moves = 0;
    int diagonal_moves = 0;
};

struct SmoothPath {
    std::vector<Vec2> vertices;
    double length = 0.0;
};

// Minimum-cost 8-connected path on the inflated grid. Straight moves cost
// resolution, diagonals sqrt(2)*resolution; a diagonal requires both adjacent
// orthogonal cells free (no corner cutting). Euclidean heuristic, ties broken
// lexicographically by (f, h, cell index). Returns nullopt when unreachable.
// Throws std::invalid_argument if start or goal maps to an occupied cell.
std::optional<GridPath> astar(const OccupancyGrid& grid, Vec2 start, Vec2 goal);

// Nearest free cell center within max_ring cells of p, if any.
std::optional<Vec2> nearest_free_cell(const OccupancyGrid& grid, Vec2 p, int max_ring = 3);

// The collision sampler shared by smoothing precondition and output checks:
// samples the segment every kCollisionSampleStep meters (both endpoints
// included) and requires every sample to land in a free cell.
bool segment_collision_free(const OccupancyGrid& grid, Vec2 a, Vec2 b);

// Randomized shortcutting: `iterations` times, pick two vertices and replace
// everything between them by collinear vertices spaced kShortcutSpacing apart
// when the connecting segment passes the collision sampler. Length never
// increases; failed attempts are no-ops.
SmoothPath shortcut_smooth(const GridPath& path, const OccupancyGrid& grid, int iterations,
                           std::uint64_t seed);

double polyline_length(const std::vector<Vec2>& pts);

// Arc-length resampling of the smooth path at kLabelSpacing, starting from
// the point on the path nearest to the agent; short paths are padded by
// repeating the final vertex. Output is in the goal-aligned frame, relative
// to the agent. Throws std::invalid_argument on an empty path.
std::vector<Vec2> make_label(const SmoothPath& path, Vec2 agent, const GoseloFrame& frame,
                             int count = kWaypointCount);

}  // namespace wpnav
