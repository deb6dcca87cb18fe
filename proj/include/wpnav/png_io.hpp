#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wpnav {

// 8-bit RGB canvas with the minimum drawing ops the plot module needs.
struct Canvas {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    Canvas(int w, int h, std::uint32_t fill = 0xffffff);
    void set(int x, int y, std::uint32_t color);
    void fill_rect(int x0, int y0, int x1, int y1, std::uint32_t color);
    void line(int x0, int y0, int x1, int y1, std::uint32_t color);
    // 5x7 bitmap font (digits, uppercase letters, basic punctuation);
    // lowercase input is rendered uppercase
    void text(int x, int y, const std::string& s, std::uint32_t color, int scale = 1);
    static int text_width(const std::string& s, int scale = 1);
};

void write_png(const Canvas& canvas, const std::string& path);

}  // namespace wpnav
