#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wpnav {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm_sq()); }
};

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }
inline double dist_sq(Vec2 a, Vec2 b) { return (a - b).norm_sq(); }

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

inline Vec2 rotate(Vec2 v, double c, double s) { return {c * v.x - s * v.y, s * v.x + c * v.y}; }

inline double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

struct LayoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainingDivergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Deterministic xoshiro256++ generator. std::random distributions are
// implementation-defined, so all sampling goes through this class.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    // uniform in [0, 1)
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // uniform integer in [0, n), n > 0
    std::uint64_t uniform_int(std::uint64_t n);
    // standard normal via Box-Muller (two uniforms per call, no cached spare)
    double normal();

    // Stable substream derivation, e.g. Rng(Rng::mix(seed, sample_index)).
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b);

private:
    std::array<std::uint64_t, 4> state_;
};

}  // namespace wpnav
