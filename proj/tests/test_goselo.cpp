#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "wpnav/goselo.hpp"

using namespace wpnav;

namespace {

struct Disk {
    Vec2 center;
    double radius;
};

// analytic scene rasterizer (no robot inflation, cell center in disk)
OccupancyGrid rasterize_scene(const std::vector<Disk>& disks, double w, double h, double res) {
    OccupancyGrid g;
    g.resolution = res;
    g.nx = int(std::lround(w / res));
    g.ny = int(std::lround(h / res));
    g.occupied.assign(std::size_t(g.nx) * g.ny, 0);
    g.visits.assign(std::size_t(g.nx) * g.ny, 0.0f);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const Vec2 c = g.cell_center(ix, iy);
            for (const auto& d : disks)
                if (dist(c, d.center) <= d.radius) {
                    g.occupied[g.index(ix, iy)] = 1;
                    break;
                }
        }
    return g;
}

double channel_mad(const GoseloImage& a, const GoseloImage& b, int ch) {
    double sum = 0;
    for (int r = 0; r < kGoseloSize; ++r)
        for (int c = 0; c < kGoseloSize; ++c) sum += std::abs(a.at(r, c, ch) - b.at(r, c, ch));
    return sum / (kGoseloSize * kGoseloSize);
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = double(xs.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0 || syy <= 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST(Frame, NorthGoalIsIdentityRotation) {
    const auto f = build_frame({0, 0}, {0, 1}, 0.1);
    EXPECT_NEAR(f.rotation, 0.0, 1e-12);
    EXPECT_EQ(f.L, 10);
    EXPECT_NEAR(f.translation.x, 0.0, 1e-12);
    EXPECT_NEAR(f.translation.y, 0.5, 1e-12);
}

TEST(Frame, EastGoalMapsToQuarterTurn) {
    const auto f = build_frame({0, 0}, {1, 0}, 0.1);
    EXPECT_NEAR(f.rotation, M_PI / 2.0, 1e-12);
    EXPECT_EQ(f.L, 10);
    // the goal must land above the agent in frame coordinates
    const Vec2 fg = f.to_frame({1, 0});
    const Vec2 fp = f.to_frame({0, 0});
    EXPECT_NEAR(fg.x, 0.0, 1e-12);
    EXPECT_GT(fg.y, fp.y);
}

TEST(Frame, DegenerateThrows) {
    EXPECT_THROW(build_frame({0.3, 0.4}, {0.3, 0.4}, 0.1), std::invalid_argument);
}

TEST(Frame, MinimumLClamp) {
    const auto f = build_frame({0, 0}, {0, 0.05}, 0.1);
    EXPECT_EQ(f.L, 8);
}

TEST(Frame, GoalAboveAgentExactOnRandomFrames) {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const Vec2 p{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        Vec2 g{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        if (dist(p, g) < 1e-6) g.x += 0.5;
        const auto f = build_frame(p, g, 0.1);
        const int size = 4 * f.L;
        const auto [pr, pc] = raster_pixel(f, size, p);
        const auto [gr, gc] = raster_pixel(f, size, g);
        ASSERT_EQ(pc, gc) << "trial " << trial;
        ASSERT_LT(gr, pr) << "trial " << trial;
    }
}

TEST(Encode, EmptySceneIsAllZero) {
    const auto grid = rasterize_scene({}, 2.0, 2.0, 0.1);
    const auto frame = build_frame({0.5, 0.5}, {1.5, 1.5}, 0.1);
    const auto img = encode(grid, frame);
    for (float v : img.data) EXPECT_EQ(v, 0.0f);
}

TEST(Encode, RotationEquivariance) {
    Rng rng(32);
    const double W = 6.0;
    const Vec2 pivot{3.0, 3.0};
    for (int pair = 0; pair < 10; ++pair) {
        // scene within 1.5 m of the pivot so rotations never clip; disks keep
        // the same clearance from agent and goal that placement enforces
        const double gang = rng.uniform(0, 2 * M_PI);
        const Vec2 goal = pivot + Vec2{std::cos(gang), std::sin(gang)} * rng.uniform(0.6, 1.4);
        std::vector<Disk> disks;
        const int nd = 3 + int(rng.uniform_int(4));
        while (int(disks.size()) < nd) {
            const double ang = rng.uniform(0, 2 * M_PI);
            const double rad = rng.uniform(0.2, 1.4);
            const Disk d{pivot + Vec2{std::cos(ang), std::sin(ang)} * rad,
                         rng.uniform(0.10, 0.20)};
            if (dist(d.center, pivot) < d.radius + 0.20) continue;
            if (dist(d.center, goal) < d.radius + 0.20) continue;
            disks.push_back(d);
        }

        const auto grid = rasterize_scene(disks, W, W, 0.1);
        const auto img = encode(grid, build_frame(pivot, goal, 0.1));

        const double phi = rng.uniform(0, 2 * M_PI);
        const double c = std::cos(phi), s = std::sin(phi);
        auto rot = [&](Vec2 q) { return pivot + rotate(q - pivot, c, s); };
        std::vector<Disk> rdisks;
        for (const auto& d : disks) rdisks.push_back({rot(d.center), d.radius});
        const auto rgrid = rasterize_scene(rdisks, W, W, 0.1);
        const auto rimg = encode(rgrid, build_frame(pivot, rot(goal), 0.1));

        for (int ch = 0; ch < kGoseloChannels; ++ch)
            EXPECT_LE(channel_mad(img, rimg, ch), 0.05) << "pair " << pair << " ch " << ch;
    }
}

TEST(Encode, ObstacleMidwayIsCentered) {
    const Vec2 p{1.0, 0.4}, g{1.0, 1.6};
    const auto grid = rasterize_scene({{{1.0, 1.0}, 0.15}}, 2.0, 2.0, 0.1);
    const auto img = encode(grid, build_frame(p, g, 0.1));
    for (int ch = 0; ch < 3; ++ch) {
        double mass = 0, col_mass = 0, row_mass = 0;
        for (int r = 0; r < kGoseloSize; ++r)
            for (int c = 0; c < kGoseloSize; ++c) {
                mass += img.at(r, c, ch);
                col_mass += c * img.at(r, c, ch);
                row_mass += r * img.at(r, c, ch);
            }
        ASSERT_GT(mass, 0.0) << "channel " << ch;
        EXPECT_NEAR(col_mass / mass, 31.5, 1.5) << "channel " << ch;
        EXPECT_NEAR(row_mass / mass, 31.5, 1.5) << "channel " << ch;
    }
}

TEST(Encode, ScaleNesting) {
    Rng rng(33);
    int valid = 0;
    for (int trial = 0; trial < 12; ++trial) {
        const Vec2 p{2.0 + rng.uniform(-0.3, 0.3), 1.2};
        const Vec2 g{2.0 + rng.uniform(-0.3, 0.3), 2.8};
        std::vector<Disk> disks;
        for (int i = 0; i < 6; ++i)
            disks.push_back({{rng.uniform(1.2, 2.8), rng.uniform(1.0, 3.0)},
                             rng.uniform(0.08, 0.18)});
        const auto grid = rasterize_scene(disks, 4.0, 4.0, 0.1);
        const auto frame = build_frame(p, g, 0.1);
        ASSERT_GE(frame.L, 8);
        const auto img = encode(grid, frame);

        // reconstruct the (L+4) window from the 2L channel's central region
        const double ratio = double(frame.L + 4) / double(2 * frame.L);
        std::vector<double> ch0, ch1c;
        auto sample_ch = [&](int ch, double x, double y) -> double {
            const double gx = x - 0.5, gy = y - 0.5;
            const int c0 = int(std::floor(gx)), r0 = int(std::floor(gy));
            const double wx = gx - c0, wy = gy - r0;
            auto v = [&](int r, int c) -> double {
                if (r < 0 || r >= kGoseloSize || c < 0 || c >= kGoseloSize) return 0.0;
                return img.at(r, c, ch);
            };
            return (1 - wy) * ((1 - wx) * v(r0, c0) + wx * v(r0, c0 + 1)) +
                   wy * ((1 - wx) * v(r0 + 1, c0) + wx * v(r0 + 1, c0 + 1));
        };
        for (int r = 0; r < kGoseloSize; ++r)
            for (int c = 0; c < kGoseloSize; ++c) {
                ch0.push_back(img.at(r, c, 0));
                const double x = 32.0 + ((c + 0.5) - 32.0) * ratio;
                const double y = 32.0 + ((r + 0.5) - 32.0) * ratio;
                ch1c.push_back(sample_ch(1, x, y));
            }
        const double corr = pearson(ch0, ch1c);
        if (corr == 0.0) continue;  // no obstacle content in the window
        EXPECT_GT(corr, 0.8) << "trial " << trial;
        ++valid;
    }
    EXPECT_GE(valid, 6);
}

TEST(Encode, HistoryMonotoneAtRevisitedCell) {
    // axis-aligned frame whose transformed pixels sample exactly at cell
    // centers: P=(0.6,0.2), G=(0.6,1.8) -> L=16, raster 64x64
    auto grid = rasterize_scene({}, 2.0, 2.0, 0.1);
    const auto frame = build_frame({0.6, 0.2}, {0.6, 1.8}, 0.1);
    ASSERT_EQ(frame.L, 16);

    const Vec2 a{0.45, 0.45};
    int aix, aiy;
    ASSERT_TRUE(grid.cell_of(a, aix, aiy));
    int bix, biy;
    ASSERT_TRUE(grid.cell_of({1.25, 1.25}, bix, biy));
    grid.visits[grid.index(bix, biy)] = 2.0f;  // reference maximum elsewhere
    grid.visits[grid.index(aix, aiy)] = 1.0f;

    const auto [ar, ac] = raster_pixel(frame, 4 * frame.L, a);
    float prev = -1.0f;
    for (int visit = 1; visit <= 5; ++visit) {
        grid.visits[grid.index(aix, aiy)] = float(visit);
        const auto rasters = transform_rasters(grid, frame);
        const float v = rasters.history[ar * rasters.size + ac];
        EXPECT_GE(v, prev) << "visit " << visit;
        prev = v;
    }
}

TEST(Encode, HistoryNormalizedByMaximum) {
    auto grid = rasterize_scene({}, 2.0, 2.0, 0.1);
    int ix, iy;
    ASSERT_TRUE(grid.cell_of({0.45, 0.45}, ix, iy));
    grid.visits[grid.index(ix, iy)] = 7.0f;
    const auto frame = build_frame({0.6, 0.2}, {0.6, 1.8}, 0.1);
    const auto rasters = transform_rasters(grid, frame);
    float maxv = 0.0f;
    for (float v : rasters.history) maxv = std::max(maxv, v);
    EXPECT_NEAR(maxv, 1.0f, 1e-6);
}

TEST(Encode, DumpChannelsWritesSixPgms) {
    const auto grid = rasterize_scene({{{1.0, 1.0}, 0.2}}, 2.0, 2.0, 0.1);
    const auto img = encode(grid, build_frame({0.5, 0.5}, {1.5, 1.5}, 0.1));
    const auto dir = std::filesystem::temp_directory_path() / "wpnav_goselo_dump";
    std::filesystem::create_directories(dir);
    dump_channels(img, (dir / "frame0").string());
    const char* names[] = {"obs_s1", "obs_s2", "obs_s4", "hist_s1", "hist_s2", "hist_s4"};
    for (const char* n : names) {
        const auto path = dir / ("frame0_" + std::string(n) + ".pgm");
        ASSERT_TRUE(std::filesystem::exists(path)) << path;
        std::ifstream in(path, std::ios::binary);
        std::string magic;
        in >> magic;
        EXPECT_EQ(magic, "P5");
    }
    std::filesystem::remove_all(dir);
}
