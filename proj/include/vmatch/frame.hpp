#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace vmatch {

// One grayscale frame: row-major 8-bit luminance.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // width * height bytes

    Frame() = default;
    Frame(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h),
          data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    std::uint8_t at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return data[static_cast<std::size_t>(y) * width + x];
    }
};

// Rec.601 luma, rounded to nearest.  Feeding an already-gray pixel through
// (r == g == b) returns the same value, so converting twice is harmless.
inline std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    const int v = static_cast<int>(y + 0.5);
    return static_cast<std::uint8_t>(v > 255 ? 255 : v);
}

// Simple RGB image used for overlay rendering and PNG output.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // width * height * 3, RGB interleaved

    RgbImage() = default;
    RgbImage(int w, int h)
        : width(w), height(h),
          data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0) {}

    void put(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        if (x < 0 || y < 0 || x >= width || y >= height) return;
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        data[i] = r;
        data[i + 1] = g;
        data[i + 2] = b;
    }
};

} // namespace vmatch
