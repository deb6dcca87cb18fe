#pragma once

#include <span>
#include <vector>

#include "wpnav/common.hpp"

namespace wpnav {

// reward coefficients (Table-V values)
inline constexpr double kPathDistWeight = -0.1;   // w1
inline constexpr double kProgressWeight = 0.5;    // w2
inline constexpr double kGoalDistWeight = -1.0;   // w5
inline constexpr double kDivideInterval = 0.05;   // meters

// Reference path resampled at a regular arc-length interval.
struct DividedPath {
    std::vector<Vec2> vertices;  // spacing = interval, last segment may be shorter
    double interval = kDivideInterval;
};

// Agent positions accumulated since the last waypoint update. append()
// densifies long steps so consecutive stored points stay within `interval`.
struct AgentTrace {
    std::vector<Vec2> positions;
    double interval = kDivideInterval;

    void reset(Vec2 start) { positions.assign(1, start); }
    void append(Vec2 p);
    bool empty() const { return positions.empty(); }
};

// Arc-length resampling at `interval` including both endpoints.
DividedPath divide(std::span<const Vec2> path, double interval = kDivideInterval);

// Index of the vertex nearest to x; ties break to the largest index.
int nni(Vec2 x, std::span<const Vec2> vertices);
inline int nni(Vec2 x, const DividedPath& d) { return nni(x, d.vertices); }

// max over trace points of the min distance to the divided vertices
double d_path(const AgentTrace& trace, const DividedPath& divided);

// NNI(x_next) - NNI(x_prev)
int n_progress(Vec2 x_prev, Vec2 x_next, const DividedPath& divided);

// r = f + w1*d_path + w2*n_progress
double reward(double f, const AgentTrace& trace, const DividedPath& divided, Vec2 x_prev,
              Vec2 x_next);

// r = f + w5*||x - goal||
double baseline_reward(double f, Vec2 x, Vec2 goal);

}  // namespace wpnav
