#include "wpnav/goselo.hpp"

#include <algorithm>
#include <fstream>

namespace wpnav {

GoseloFrame build_frame(Vec2 agent, Vec2 goal, double resolution) {
    const Vec2 d = goal - agent;
    const double len = d.norm();
    if (len < 1e-12)
        throw std::invalid_argument("build_frame: agent and goal coincide (degenerate frame)");
    GoseloFrame f;
    f.resolution = resolution;
    f.translation = (agent + goal) * 0.5;
    f.anchor = agent;
    // rotation beta = pi/2 - atan2(dy, dx): cos(beta) = uy, sin(beta) = ux
    const double ux = d.x / len, uy = d.y / len;
    f.cos_r = uy;
    f.sin_r = ux;
    f.center_offset = 0.5 * (ux * d.x + uy * d.y);
    f.rotation = wrap_angle(M_PI / 2.0 - std::atan2(d.y, d.x));
    f.L = std::max(8, static_cast<int>(std::ceil(len / resolution)));
    return f;
}

namespace {

// bilinear sample of a grid-valued field (values at cell centers, 0 outside)
template <class Get>
float bilinear_grid(const OccupancyGrid& grid, Vec2 p, Get get) {
    const double gx = p.x / grid.resolution - 0.5;
    const double gy = p.y / grid.resolution - 0.5;
    const int ix0 = static_cast<int>(std::floor(gx));
    const int iy0 = static_cast<int>(std::floor(gy));
    const double wx = gx - ix0, wy = gy - iy0;
    auto v = [&](int ix, int iy) -> double {
        if (!grid.in_bounds(ix, iy)) return 0.0;
        return get(ix, iy);
    };
    const double v00 = v(ix0, iy0), v10 = v(ix0 + 1, iy0);
    const double v01 = v(ix0, iy0 + 1), v11 = v(ix0 + 1, iy0 + 1);
    return static_cast<float>((1.0 - wy) * ((1.0 - wx) * v00 + wx * v10) +
                              wy * ((1.0 - wx) * v01 + wx * v11));
}

// bilinear sample of a row-major raster at continuous pixel coordinates
// (value of pixel (r,c) sits at (c+0.5, r+0.5)); outside reads 0
float bilinear_raster(const std::vector<float>& img, int size, double x, double y) {
    const double gx = x - 0.5, gy = y - 0.5;
    const int c0 = static_cast<int>(std::floor(gx));
    const int r0 = static_cast<int>(std::floor(gy));
    const double wx = gx - c0, wy = gy - r0;
    auto v = [&](int r, int c) -> double {
        if (r < 0 || r >= size || c < 0 || c >= size) return 0.0;
        return img[r * size + c];
    };
    return static_cast<float>((1.0 - wy) * ((1.0 - wx) * v(r0, c0) + wx * v(r0, c0 + 1)) +
                              wy * ((1.0 - wx) * v(r0 + 1, c0) + wx * v(r0 + 1, c0 + 1)));
}

}  // namespace

std::pair<int, int> raster_pixel(const GoseloFrame& frame, int size, Vec2 world) {
    const Vec2 f = frame.to_frame(world);
    const double half = size / 2.0;
    const double col = half + f.x / frame.resolution;
    const double row = half - f.y / frame.resolution;
    return {static_cast<int>(std::floor(row)), static_cast<int>(std::floor(col))};
}

TransformedRasters transform_rasters(const OccupancyGrid& grid, const GoseloFrame& frame) {
    TransformedRasters out;
    out.size = 4 * frame.L;
    out.obstacle.resize(static_cast<size_t>(out.size) * out.size);
    out.history.resize(static_cast<size_t>(out.size) * out.size);

    float max_visit = 0.0f;
    for (float v : grid.visits) max_visit = std::max(max_visit, v);
    const float vis_scale = max_visit > 0.0f ? 1.0f / max_visit : 0.0f;

    const double half = out.size / 2.0;
    const double res = frame.resolution;
    for (int r = 0; r < out.size; ++r) {
        for (int c = 0; c < out.size; ++c) {
            const Vec2 fcoord{(c + 0.5 - half) * res, (half - (r + 0.5)) * res};
            const Vec2 world = frame.from_frame(fcoord);
            out.obstacle[r * out.size + c] = bilinear_grid(
                grid, world, [&](int ix, int iy) { return double(grid.occupied[grid.index(ix, iy)]); });
            out.history[r * out.size + c] = bilinear_grid(grid, world, [&](int ix, int iy) {
                return double(grid.visits[grid.index(ix, iy)]) * vis_scale;
            });
        }
    }
    return out;
}

GoseloImage encode(const OccupancyGrid& grid, const GoseloFrame& frame) {
    const TransformedRasters rasters = transform_rasters(grid, frame);
    const double center = rasters.size / 2.0;
    const double sides[3] = {double(frame.L + 4), double(2 * frame.L), double(4 * frame.L)};

    GoseloImage img;
    for (int s = 0; s < 3; ++s) {
        const double side = sides[s];
        for (int r = 0; r < kGoseloSize; ++r) {
            for (int c = 0; c < kGoseloSize; ++c) {
                const double x = center - side / 2.0 + (c + 0.5) * side / kGoseloSize;
                const double y = center - side / 2.0 + (r + 0.5) * side / kGoseloSize;
                img.at(r, c, s) = bilinear_raster(rasters.obstacle, rasters.size, x, y);
                img.at(r, c, 3 + s) = bilinear_raster(rasters.history, rasters.size, x, y);
            }
        }
    }
    return img;
}

void dump_channels(const GoseloImage& image, const std::string& prefix) {
    static const char* names[kGoseloChannels] = {"obs_s1",  "obs_s2",  "obs_s4",
                                                 "hist_s1", "hist_s2", "hist_s4"};
    for (int ch = 0; ch < kGoseloChannels; ++ch) {
        std::ofstream out(prefix + "_" + names[ch] + ".pgm", std::ios::binary);
        if (!out) throw std::runtime_error("dump_channels: cannot write " + prefix);
        out << "P5\n" << kGoseloSize << " " << kGoseloSize << "\n255\n";
        for (int r = 0; r < kGoseloSize; ++r) {
            for (int c = 0; c < kGoseloSize; ++c) {
                const float v = clamp(image.at(r, c, ch), 0.0, 1.0);
                out.put(static_cast<char>(std::lround(v * 255.0f)));
            }
        }
    }
}

}  // namespace wpnav
