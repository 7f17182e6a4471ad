#include "vmatch/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace vmatch {

const std::array<Rgb, 6> kOverlayPalette = {{
    {230, 60, 60},   // red
    {60, 200, 80},   // green
    {70, 120, 230},  // blue
    {230, 200, 50},  // yellow
    {200, 70, 200},  // magenta
    {60, 200, 200},  // cyan
}};

namespace {

// 3x5 digit glyphs, one row per byte, MSB-left in the low 3 bits.
constexpr std::uint8_t kDigits[10][5] = {
    {0b111, 0b101, 0b101, 0b101, 0b111}, // 0
    {0b010, 0b110, 0b010, 0b010, 0b111}, // 1
    {0b111, 0b001, 0b111, 0b100, 0b111}, // 2
    {0b111, 0b001, 0b111, 0b001, 0b111}, // 3
    {0b101, 0b101, 0b111, 0b001, 0b001}, // 4
    {0b111, 0b100, 0b111, 0b001, 0b111}, // 5
    {0b111, 0b100, 0b111, 0b101, 0b111}, // 6
    {0b111, 0b001, 0b010, 0b010, 0b010}, // 7
    {0b111, 0b101, 0b111, 0b101, 0b111}, // 8
    {0b111, 0b101, 0b111, 0b001, 0b111}, // 9
};

constexpr int kScale = 3;  // glyph pixel → kScale×kScale block
constexpr int kMargin = 4; // badge padding on every side

void fill_rect(RgbImage& img, int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            img.put(x, y, c.r, c.g, c.b);
}

} // namespace

void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, Rgb color) {
    // Bresenham with per-pixel clipping, so off-canvas endpoints are safe.
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        img.put(x0, y0, color.r, color.g, color.b);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

std::pair<int, int> stamp_count(RgbImage& img, long long value) {
    const std::string text = std::to_string(value);
    const int glyph_w = 3 * kScale;
    const int glyph_h = 5 * kScale;
    const int spacing = kScale;
    const int text_w =
        static_cast<int>(text.size()) * glyph_w + (static_cast<int>(text.size()) - 1) * spacing;

    const int badge_w = text_w + 2 * kMargin;
    const int badge_h = glyph_h + 2 * kMargin;
    fill_rect(img, 0, 0, badge_w, badge_h, {0, 0, 0});

    int pen_x = kMargin;
    for (char ch : text) {
        const auto& glyph = kDigits[ch - '0'];
        for (int gy = 0; gy < 5; ++gy)
            for (int gx = 0; gx < 3; ++gx)
                if (glyph[gy] >> (2 - gx) & 1)
                    fill_rect(img, pen_x + gx * kScale, kMargin + gy * kScale,
                              pen_x + (gx + 1) * kScale, kMargin + (gy + 1) * kScale,
                              {255, 255, 255});
        pen_x += glyph_w + spacing;
    }
    return {badge_w, badge_h};
}

RgbImage render_overlay(const Frame& a, const Frame& b,
                        const std::vector<OverlayMatch>& matches, int max_lines) {
    RgbImage img(a.width + b.width, std::max(a.height, b.height));
    for (int y = 0; y < a.height; ++y)
        for (int x = 0; x < a.width; ++x) {
            const std::uint8_t v = a.at(x, y);
            img.put(x, y, v, v, v);
        }
    for (int y = 0; y < b.height; ++y)
        for (int x = 0; x < b.width; ++x) {
            const std::uint8_t v = b.at(x, y);
            img.put(a.width + x, y, v, v, v);
        }

    std::size_t n_lines = matches.size();
    if (max_lines >= 0) n_lines = std::min(n_lines, static_cast<std::size_t>(max_lines));
    for (std::size_t i = 0; i < n_lines; ++i) {
        const auto& m = matches[i];
        draw_line(img, static_cast<int>(std::lround(m.ax)), static_cast<int>(std::lround(m.ay)),
                  a.width + static_cast<int>(std::lround(m.bx)),
                  static_cast<int>(std::lround(m.by)),
                  kOverlayPalette[i % kOverlayPalette.size()]);
    }

    stamp_count(img, static_cast<long long>(matches.size()));
    return img;
}

} // namespace vmatch
