#pragma once

#include <array>
#include <vector>

#include "vmatch/frame.hpp"

namespace vmatch {

// One line segment of the overlay, in pixel coordinates of each frame.
struct OverlayMatch {
    double ax = 0, ay = 0; // endpoint in frame A
    double bx = 0, by = 0; // endpoint in frame B (before the side-by-side shift)
};

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

// Colors cycled across match lines, in drawing order.
extern const std::array<Rgb, 6> kOverlayPalette;

// Side-by-side canvas: A left, B right, match lines between centers, and the
// total match count stamped in the top-left corner.  max_lines < 0 draws all
// lines; the stamped count is always matches.size().
RgbImage render_overlay(const Frame& a, const Frame& b,
                        const std::vector<OverlayMatch>& matches,
                        int max_lines = -1);

// Exposed for tests: plot a 1-px line with bounds clipping.
void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, Rgb color);

// Exposed for tests: render `value` top-left as scaled 3x5 digits on a black
// badge; returns the badge's exclusive right/bottom pixel bounds.
std::pair<int, int> stamp_count(RgbImage& img, long long value);

} // namespace vmatch
