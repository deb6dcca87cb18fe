#pragma once

#include <array>
#include <string>
#include <vector>

#include "wpnav/common.hpp"
#include "wpnav/occupancy.hpp"

namespace wpnav {

inline constexpr int kGoseloSize = 64;
inline constexpr int kGoseloChannels = 6;

// Goal-aligned frame: rotating the world by `rotation` about the midpoint M
// of agent P and goal G maps the segment PG onto the image's vertical axis
// with G above P. The transform is anchored at P with cos/sin taken from the
// unit vector (G-P)/|G-P|, which makes the frame x-coordinate of both P and G
// exactly zero in floating point (they share an image column exactly).
struct GoseloFrame {
    double rotation = 0.0;  // radians
    double cos_r = 1.0;
    double sin_r = 0.0;
    Vec2 translation;            // midpoint M, meters (frame origin)
    Vec2 anchor;                 // agent position P
    double center_offset = 0.0;  // frame-y of G relative to P, halved (= |GP|/2)
    int L = 0;                   // pixels on segment GP (clamped to >= 8)
    double resolution = 0.1;

    // rotate a displacement vector into the goal-aligned frame (y = toward goal)
    Vec2 rotate_to_frame(Vec2 v) const { return rotate(v, cos_r, sin_r); }
    Vec2 rotate_from_frame(Vec2 v) const { return rotate(v, cos_r, -sin_r); }
    // full map: world point -> frame coordinates centered on M
    Vec2 to_frame(Vec2 world) const {
        const Vec2 r = rotate_to_frame(world - anchor);
        return {r.x, r.y - center_offset};
    }
    Vec2 from_frame(Vec2 f) const {
        return anchor + rotate_from_frame({f.x, f.y + center_offset});
    }
};

// Throws std::invalid_argument when agent == goal (degenerate frame).
GoseloFrame build_frame(Vec2 agent, Vec2 goal, double resolution);

// 6 channels, channel-last: obstacle crops at sides (L+4, 2L, 4L) followed by
// history crops at the same sides, each resized to 64x64.
struct GoseloImage {
    std::array<float, kGoseloSize * kGoseloSize * kGoseloChannels> data{};

    float at(int row, int col, int ch) const {
        return data[(row * kGoseloSize + col) * kGoseloChannels + ch];
    }
    float& at(int row, int col, int ch) {
        return data[(row * kGoseloSize + col) * kGoseloChannels + ch];
    }
};

// Full-resolution rotated rasters (side 4L pixels, row 0 at top), sampled
// bilinearly from the source grid with out-of-map reading as 0. History is
// normalized by its maximum visit count before resampling.
struct TransformedRasters {
    int size = 0;
    std::vector<float> obstacle;  // row-major [row*size + col]
    std::vector<float> history;
};

TransformedRasters transform_rasters(const OccupancyGrid& grid, const GoseloFrame& frame);

// Pixel (row, col) of a world point in the transformed raster of side `size`.
std::pair<int, int> raster_pixel(const GoseloFrame& frame, int size, Vec2 world);

GoseloImage encode(const OccupancyGrid& grid, const GoseloFrame& frame);

// Writes one 8-bit grayscale PGM per channel:
// <prefix>_{obs_s1,obs_s2,obs_s4,hist_s1,hist_s2,hist_s4}.pgm
void dump_channels(const GoseloImage& image, const std::string& prefix);

}  // namespace wpnav
