#include "wpnav/path_reward.hpp"

#include <limits>
#include <stdexcept>

namespace wpnav {

void AgentTrace::append(Vec2 p) {
    if (positions.empty()) {
        positions.push_back(p);
        return;
    }
    const Vec2 prev = positions.back();
    const double d = dist(prev, p);
    const int mids = static_cast<int>(std::floor(d / interval - 1e-12));
    for (int k = 1; k <= mids; ++k)
        positions.push_back(prev + (p - prev) * (k * interval / d));
    positions.push_back(p);
}

DividedPath divide(std::span<const Vec2> path, double interval) {
    if (path.empty()) throw std::invalid_argument("divide: path must have at least one point");
    if (interval <= 0.0) throw std::invalid_argument("divide: interval must be > 0");

    DividedPath out;
    out.interval = interval;
    out.vertices.push_back(path[0]);
    if (path.size() == 1) return out;

    double target = interval;
    double acc = 0.0;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const double seg = dist(path[i], path[i + 1]);
        while (target <= acc + seg) {
            const double t = seg > 0.0 ? (target - acc) / seg : 0.0;
            out.vertices.push_back(path[i] + (path[i + 1] - path[i]) * t);
            target += interval;
        }
        acc += seg;
    }
    // keep the final endpoint; the closing segment may be shorter
    if (dist_sq(out.vertices.back(), path.back()) > 1e-24) out.vertices.push_back(path.back());
    return out;
}

int nni(Vec2 x, std::span<const Vec2> vertices) {
    if (vertices.empty()) throw std::invalid_argument("nni: empty vertex list");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < vertices.size(); ++i) {
        const double d = dist_sq(x, vertices[i]);
        if (d <= best_d) {  // ties go to the largest index
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

double d_path(const AgentTrace& trace, const DividedPath& divided) {
    if (trace.empty()) throw std::invalid_argument("d_path: empty trace");
    if (divided.vertices.empty()) throw std::invalid_argument("d_path: empty divided path");
    double worst = 0.0;
    for (const Vec2& x : trace.positions) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec2& p : divided.vertices) best = std::min(best, dist_sq(x, p));
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

int n_progress(Vec2 x_prev, Vec2 x_next, const DividedPath& divided) {
    return nni(x_next, divided) - nni(x_prev, divided);
}

double reward(double f, const AgentTrace& trace, const DividedPath& divided, Vec2 x_prev,
              Vec2 x_next) {
    return f + kPathDistWeight * d_path(trace, divided) +
           kProgressWeight * n_progress(x_prev, x_next, divided);
}

double baseline_reward(double f, Vec2 x, Vec2 goal) {
    return f + kGoalDistWeight * dist(x, goal);
}

}  // namespace wpnav
