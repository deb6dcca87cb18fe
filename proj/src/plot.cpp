#include "wpnav/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wpnav/png_io.hpp"

namespace wpnav {

namespace {

constexpr std::uint32_t kPalette[] = {0x1f77b4, 0xd62728, 0x2ca02c, 0xff7f0e,
                                      0x9467bd, 0x8c564b, 0x17becf, 0x7f7f7f};
constexpr int kWidth = 900, kHeight = 560;
constexpr int kLeft = 80, kRight = 40, kTop = 50, kBottom = 60;

std::string format_tick(double v) {
    char buf[32];
    if (v != 0.0 && (std::abs(v) >= 1e5 || std::abs(v) < 1e-3)) {
        std::snprintf(buf, sizeof(buf), "%.1e", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%g", v);
    }
    return buf;
}

struct Range {
    double lo = 0.0, hi = 1.0;
    void expand(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi <= lo) hi = lo + 1.0;
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

}  // namespace

void plot_lines(const std::vector<Series>& series, const std::string& title,
                const std::string& x_label, const std::string& y_label, const std::string& path) {
    Canvas c(kWidth, kHeight);
    Range rx, ry;
    rx.lo = ry.lo = std::numeric_limits<double>::infinity();
    rx.hi = ry.hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : series) {
        for (double v : s.x) rx.expand(v);
        for (double v : s.y) ry.expand(v);
    }
    if (!std::isfinite(rx.lo)) {
        rx = {0, 1};
        ry = {0, 1};
    }
    rx.pad();
    ry.pad();

    const int px0 = kLeft, px1 = kWidth - kRight, py0 = kHeight - kBottom, py1 = kTop;
    auto X = [&](double v) { return int(px0 + (v - rx.lo) / (rx.hi - rx.lo) * (px1 - px0)); };
    auto Y = [&](double v) { return int(py0 - (v - ry.lo) / (ry.hi - ry.lo) * (py0 - py1)); };

    // frame + ticks
    c.line(px0, py0, px1, py0, 0x000000);
    c.line(px0, py0, px0, py1, 0x000000);
    for (int i = 0; i <= 5; ++i) {
        const double tv = rx.lo + i * (rx.hi - rx.lo) / 5;
        const int x = X(tv);
        c.line(x, py0, x, py0 + 4, 0x000000);
        const std::string t = format_tick(tv);
        c.text(x - Canvas::text_width(t) / 2, py0 + 8, t, 0x000000);
        if (i > 0) c.line(x, py0, x, py1, 0xe8e8e8);
    }
    for (int i = 0; i <= 5; ++i) {
        const double tv = ry.lo + i * (ry.hi - ry.lo) / 5;
        const int y = Y(tv);
        c.line(px0 - 4, y, px0, y, 0x000000);
        const std::string t = format_tick(tv);
        c.text(px0 - 8 - Canvas::text_width(t), y - 3, t, 0x000000);
        if (i > 0) c.line(px0, y, px1, y, 0xe8e8e8);
    }
    c.text((px0 + px1) / 2 - Canvas::text_width(title, 2) / 2, 14, title, 0x000000, 2);
    c.text((px0 + px1) / 2 - Canvas::text_width(x_label) / 2, kHeight - 24, x_label, 0x000000);
    c.text(8, py1 - 18, y_label, 0x000000);

    for (size_t k = 0; k < series.size(); ++k) {
        const std::uint32_t col = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
        const auto& s = series[k];
        for (size_t i = 1; i < s.x.size() && i < s.y.size(); ++i)
            c.line(X(s.x[i - 1]), Y(s.y[i - 1]), X(s.x[i]), Y(s.y[i]), col);
        // legend
        const int ly = py1 + 12 + int(k) * 14;
        c.line(px1 - 150, ly + 3, px1 - 125, ly + 3, col);
        c.text(px1 - 118, ly, s.label, 0x000000);
    }
    write_png(c, path);
}

void plot_bars(const std::vector<BarGroup>& groups, const std::vector<std::string>& categories,
               const std::string& title, const std::string& y_label, const std::string& path) {
    Canvas c(kWidth, kHeight);
    Range ry;
    ry.lo = 0.0;
    ry.hi = 0.0;
    for (const auto& g : groups)
        for (double v : g.values) ry.expand(v);
    if (ry.hi <= 0.0) ry.hi = 1.0;
    ry.hi *= 1.1;

    const int px0 = kLeft, px1 = kWidth - kRight, py0 = kHeight - kBottom, py1 = kTop;
    auto Y = [&](double v) { return int(py0 - (v - ry.lo) / (ry.hi - ry.lo) * (py0 - py1)); };
    c.line(px0, py0, px1, py0, 0x000000);
    c.line(px0, py0, px0, py1, 0x000000);
    for (int i = 0; i <= 5; ++i) {
        const double tv = ry.lo + i * (ry.hi - ry.lo) / 5;
        const int y = Y(tv);
        c.line(px0 - 4, y, px0, y, 0x000000);
        const std::string t = format_tick(tv);
        c.text(px0 - 8 - Canvas::text_width(t), y - 3, t, 0x000000);
        if (i > 0) c.line(px0, y, px1, y, 0xe8e8e8);
    }
    c.text((px0 + px1) / 2 - Canvas::text_width(title, 2) / 2, 14, title, 0x000000, 2);
    c.text(8, py1 - 18, y_label, 0x000000);

    const int ngroups = int(groups.size());
    const int ncat = int(categories.size());
    if (ngroups > 0 && ncat > 0) {
        const double group_w = double(px1 - px0) / ngroups;
        const double bar_w = group_w / (ncat + 1);
        for (int g = 0; g < ngroups; ++g) {
            for (int k = 0; k < ncat && k < int(groups[g].values.size()); ++k) {
                const std::uint32_t col = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
                const int x0 = int(px0 + g * group_w + (k + 0.5) * bar_w);
                const int x1 = int(x0 + bar_w) - 2;
                c.fill_rect(x0, Y(groups[g].values[k]), x1, py0 - 1, col);
            }
            const std::string& lab = groups[g].label;
            c.text(int(px0 + g * group_w + group_w / 2) - Canvas::text_width(lab) / 2, py0 + 8,
                   lab, 0x000000);
        }
        for (int k = 0; k < ncat; ++k) {
            const std::uint32_t col = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
            const int ly = py1 + 12 + k * 14;
            c.fill_rect(px1 - 150, ly, px1 - 138, ly + 8, col);
            c.text(px1 - 130, ly, categories[k], 0x000000);
        }
    }
    write_png(c, path);
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_csv: cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> csv_column(const std::vector<std::vector<std::string>>& rows,
                               const std::string& name) {
    if (rows.empty()) throw std::runtime_error("csv_column: empty csv");
    const auto& header = rows.front();
    size_t col = header.size();
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) col = i;
    if (col == header.size()) throw std::runtime_error("csv_column: no column " + name);
    std::vector<double> out;
    for (size_t r = 1; r < rows.size(); ++r)
        if (col < rows[r].size()) out.push_back(std::stod(rows[r][col]));
    return out;
}

}  // namespace wpnav
