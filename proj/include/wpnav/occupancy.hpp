#pragma once

#include <cstdint>
#include <vector>

#include "wpnav/common.hpp"

namespace wpnav {

// Binary obstacle raster plus the per-episode visit-count raster.
// Cell (ix, iy) covers [ix*res, (ix+1)*res) x [iy*res, (iy+1)*res); its
// center is at ((ix+0.5)*res, (iy+0.5)*res).
struct OccupancyGrid {
    int nx = 0;
    int ny = 0;
    double resolution = 0.1;
    std::vector<std::uint8_t> occupied;  // row-major [iy*nx + ix]
    std::vector<float> visits;

    int index(int ix, int iy) const { return iy * nx + ix; }
    bool in_bounds(int ix, int iy) const { return ix >= 0 && ix < nx && iy >= 0 && iy < ny; }
    bool is_occupied(int ix, int iy) const { return occupied[index(ix, iy)] != 0; }
    Vec2 cell_center(int ix, int iy) const {
        return {(ix + 0.5) * resolution, (iy + 0.5) * resolution};
    }
    // false if p lies outside the gridded region
    bool cell_of(Vec2 p, int& ix, int& iy) const {
        ix = static_cast<int>(std::floor(p.x / resolution));
        iy = static_cast<int>(std::floor(p.y / resolution));
        return in_bounds(ix, iy);
    }
    // Occupied lookup treating out-of-map points as blocked.
    bool point_blocked(Vec2 p) const {
        int ix, iy;
        if (!cell_of(p, ix, iy)) return true;
        return is_occupied(ix, iy);
    }
};

}  // namespace wpnav
