#include "wpnav/planner.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace wpnav {

namespace {

struct QueueEntry {
    double f;
    double h;
    int cell;
    bool operator>(const QueueEntry& o) const {
        if (f != o.f) return f > o.f;
        if (h != o.h) return h > o.h;
        return cell > o.cell;
    }
};

constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

}  // namespace

std::optional<Vec2> nearest_free_cell(const OccupancyGrid& grid, Vec2 p, int max_ring) {
    int ix, iy;
    if (!grid.cell_of(p, ix, iy)) return std::nullopt;
    double best_d = std::numeric_limits<double>::infinity();
    std::optional<Vec2> best;
    for (int dy = -max_ring; dy <= max_ring; ++dy) {
        for (int dx = -max_ring; dx <= max_ring; ++dx) {
            const int cx = ix + dx, cy = iy + dy;
            if (!grid.in_bounds(cx, cy) || grid.is_occupied(cx, cy)) continue;
            const Vec2 c = grid.cell_center(cx, cy);
            const double d = dist_sq(c, p);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
    }
    return best;
}

std::optional<GridPath> astar(const OccupancyGrid& grid, Vec2 start, Vec2 goal) {
    int sx, sy, gx, gy;
    if (!grid.cell_of(start, sx, sy) || !grid.cell_of(goal, gx, gy))
        throw std::invalid_argument("astar: start or goal outside the grid");
    if (grid.is_occupied(sx, sy) || grid.is_occupied(gx, gy))
        throw std::invalid_argument("astar: start or goal cell occupied");

    const int n = grid.nx * grid.ny;
    const double res = grid.resolution;
    const double diag = std::sqrt(2.0) * res;
    const int start_cell = grid.index(sx, sy);
    const int goal_cell = grid.index(gx, gy);

    std::vector<double> g(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    std::vector<std::uint16_t> straights(n, 0), diagonals(n, 0);
    std::vector<std::uint8_t> closed(n, 0);

    auto heuristic = [&](int cell) {
        const int cx = cell % grid.nx, cy = cell / grid.nx;
        const double dx = (cx - gx) * res, dy = (cy - gy) * res;
        return std::sqrt(dx * dx + dy * dy);
    };

    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> open;
    g[start_cell] = 0.0;
    open.push({heuristic(start_cell), heuristic(start_cell), start_cell});

    while (!open.empty()) {
        const QueueEntry top = open.top();
        open.pop();
        if (closed[top.cell]) continue;
        closed[top.cell] = 1;
        if (top.cell == goal_cell) break;

        const int cx = top.cell % grid.nx, cy = top.cell / grid.nx;
        for (int k = 0; k < 8; ++k) {
            const int nx_ = cx + kDx[k], ny_ = cy + kDy[k];
            if (!grid.in_bounds(nx_, ny_) || grid.is_occupied(nx_, ny_)) continue;
            const bool diagonal = k >= 4;
            if (diagonal &&
                (grid.is_occupied(cx + kDx[k], cy) || grid.is_occupied(cx, cy + kDy[k])))
                continue;  // no corner cutting
            const int nc = grid.index(nx_, ny_);
            if (closed[nc]) continue;
            const double ng = g[top.cell] + (diagonal ? diag : res);
            if (ng < g[nc]) {
                g[nc] = ng;
                parent[nc] = top.cell;
                straights[nc] = straights[top.cell] + (diagonal ? 0 : 1);
                diagonals[nc] = diagonals[top.cell] + (diagonal ? 1 : 0);
                const double h = heuristic(nc);
                open.push({ng + h, h, nc});
            }
        }
    }

    if (!closed[goal_cell]) return std::nullopt;

    GridPath path;
    for (int cell = goal_cell; cell != -1; cell = parent[cell])
        path.cells.emplace_back(cell % grid.nx, cell / grid.nx);
    std::reverse(path.cells.begin(), path.cells.end());
    path.world_points.reserve(path.cells.size());
    for (auto [ix, iy] : path.cells) path.world_points.push_back(grid.cell_center(ix, iy));
    path.straight_moves = straights[goal_cell];
    path.diagonal_moves = diagonals[goal_cell];
    path.cost = path.straight_moves * res + path.diagonal_moves * diag;
    return path;
}

bool segment_collision_free(const OccupancyGrid& grid, Vec2 a, Vec2 b) {
    const double len = dist(a, b);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / kCollisionSampleStep)));
    for (int i = 0; i <= steps; ++i) {
        const double t = double(i) / steps;
        if (grid.point_blocked(a + (b - a) * t)) return false;
    }
    return true;
}

double polyline_length(const std::vector<Vec2>& pts) {
    double len = 0.0;
    for (size_t i = 1; i < pts.size(); ++i) len += dist(pts[i - 1], pts[i]);
    return len;
}

SmoothPath shortcut_smooth(const GridPath& path, const OccupancyGrid& grid, int iterations,
                           std::uint64_t seed) {
    if (path.world_points.empty()) throw std::invalid_argument("shortcut_smooth: empty path");
    std::vector<Vec2> verts = path.world_points;
    double length = polyline_length(verts);

    Rng rng(seed);
    for (int it = 0; it < iterations; ++it) {
        if (verts.size() < 3) break;
        size_t i = rng.uniform_int(verts.size());
        size_t j = rng.uniform_int(verts.size());
        if (i > j) std::swap(i, j);
        if (j - i < 2) continue;
        if (!segment_collision_free(grid, verts[i], verts[j])) continue;

        const Vec2 a = verts[i], b = verts[j];
        const double seg = dist(a, b);
        std::vector<Vec2> fill;
        const int fills = static_cast<int>(std::floor(seg / kShortcutSpacing - 1e-12));
        const Vec2 dir = seg > 0.0 ? (b - a) * (1.0 / seg) : Vec2{0.0, 0.0};
        for (int k = 1; k <= fills; ++k) fill.push_back(a + dir * (k * kShortcutSpacing));
        // the output contract is per-segment, so re-check each filled piece
        bool safe = true;
        Vec2 prev = a;
        for (const Vec2& v : fill) {
            safe = safe && segment_collision_free(grid, prev, v);
            prev = v;
        }
        safe = safe && segment_collision_free(grid, prev, b);
        if (!safe) continue;

        std::vector<Vec2> proposal(verts.begin(), verts.begin() + i + 1);
        proposal.insert(proposal.end(), fill.begin(), fill.end());
        proposal.insert(proposal.end(), verts.begin() + j, verts.end());

        const double new_length = polyline_length(proposal);
        if (new_length <= length) {
            verts = std::move(proposal);
            length = new_length;
        }
    }
    return SmoothPath{std::move(verts), length};
}

namespace {

// closest point on segment [a,b] to p
Vec2 project_on_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double den = ab.norm_sq();
    if (den < 1e-18) return a;
    const double t = clamp((p - a).dot(ab) / den, 0.0, 1.0);
    return a + ab * t;
}

}  // namespace

std::vector<Vec2> make_label(const SmoothPath& path, Vec2 agent, const GoseloFrame& frame,
                             int count) {
    if (path.vertices.empty()) throw std::invalid_argument("make_label: empty path");
    if (count <= 0) throw std::invalid_argument("make_label: count must be positive");
    const auto& v = path.vertices;

    // arc-length offset of the path point nearest the agent
    double best_d = std::numeric_limits<double>::infinity();
    double best_arc = 0.0;
    double arc = 0.0;
    if (v.size() == 1) {
        best_arc = 0.0;
    } else {
        for (size_t i = 0; i + 1 < v.size(); ++i) {
            const Vec2 q = project_on_segment(agent, v[i], v[i + 1]);
            const double d = dist_sq(agent, q);
            if (d < best_d) {
                best_d = d;
                best_arc = arc + dist(v[i], q);
            }
            arc += dist(v[i], v[i + 1]);
        }
    }

    // walk the polyline, emitting points at fixed arc offsets past best_arc
    std::vector<Vec2> world;
    world.reserve(count);
    double target = best_arc + kLabelSpacing;
    double acc = 0.0;
    for (size_t i = 0; i + 1 < v.size() && static_cast<int>(world.size()) < count; ++i) {
        const double seg = dist(v[i], v[i + 1]);
        while (static_cast<int>(world.size()) < count && target <= acc + seg) {
            const double t = seg > 0.0 ? (target - acc) / seg : 0.0;
            world.push_back(v[i] + (v[i + 1] - v[i]) * t);
            target += kLabelSpacing;
        }
        acc += seg;
    }
    while (static_cast<int>(world.size()) < count) world.push_back(v.back());

    std::vector<Vec2> label;
    label.reserve(count);
    for (const Vec2& w : world) label.push_back(frame.rotate_to_frame(w - agent));
    return label;
}

}  // namespace wpnav
