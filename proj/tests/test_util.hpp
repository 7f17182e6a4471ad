#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "vmatch/motion_state.hpp"
#include "vmatch/video_io.hpp"

namespace testutil {

// In-memory frame list exposed through the FrameSource interface.
struct MemorySource final : vmatch::FrameSource {
    std::vector<vmatch::Frame> frames;
    double fps_value = 30.0;

    MemorySource() = default;
    explicit MemorySource(std::vector<vmatch::Frame> f) : frames(std::move(f)) {}

    int frame_count() const override { return static_cast<int>(frames.size()); }
    int width() const override { return frames.empty() ? 0 : frames[0].width; }
    int height() const override { return frames.empty() ? 0 : frames[0].height; }
    double fps() const override { return fps_value; }
    vmatch::Frame frame(int index) const override { return frames[index]; }
};

// Frame with one filled axis-aligned rectangle [x0,x0+w) × [y0,y0+h).
inline vmatch::Frame block_frame(int width, int height, int x0, int y0, int w, int h,
                                 std::uint8_t fg = 255, std::uint8_t bg = 0) {
    vmatch::Frame f(width, height, bg);
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x)
            if (x >= 0 && y >= 0 && x < width && y < height) f.at(x, y) = fg;
    return f;
}

// Video where every quadtree node (every patch at every level, enumerated
// level-major then row-major) flashes its full pixel rectangle white on frame
// 2·i+1 and nothing else ever moves.  State i is then active exactly for the
// patches covering node i's rectangle, which gives every patch at every
// level a distinct signature: itself, its ancestors, and (at coarse levels)
// the descendants large enough to trip the area threshold.
inline MemorySource quadtree_flash_video(int image_size,
                                         const std::vector<vmatch::LevelSpec>& levels) {
    std::vector<std::array<int, 3>> rects; // x0, y0, size
    for (const auto& lv : levels) {
        const int per_side = image_size / lv.patch_size;
        for (int r = 0; r < per_side; ++r)
            for (int c = 0; c < per_side; ++c)
                rects.push_back({c * lv.patch_size, r * lv.patch_size, lv.patch_size});
    }
    MemorySource src;
    const int n_frames = 2 * static_cast<int>(rects.size()) + 1;
    for (int k = 0; k < n_frames; ++k) {
        if (k % 2 == 1) {
            const auto& rc = rects[(k - 1) / 2];
            src.frames.push_back(
                block_frame(image_size, image_size, rc[0], rc[1], rc[2], rc[2]));
        } else {
            src.frames.emplace_back(image_size, image_size, 0);
        }
    }
    return src;
}

// Hand-built state sequence from a '0'/'1' string, with the popcount caches
// a builder would produce.
inline vmatch::StateSequence seq_of(const std::string& bits01, int seg_len,
                                    int row = 0, int col = 0) {
    vmatch::StateSequence s;
    s.row = row;
    s.col = col;
    s.bits = vmatch::BitSeq(bits01.size());
    for (std::size_t i = 0; i < bits01.size(); ++i) s.bits.set(i, bits01[i] == '1');
    const int len = static_cast<int>(bits01.size());
    for (int b = 0; b < len; b += seg_len)
        s.ones_per_segment.push_back(static_cast<std::uint32_t>(
            s.bits.popcount_range(b, std::min(b + seg_len, len))));
    s.total_ones = s.bits.popcount();
    return s;
}

// Hand-built single level; cells is row-major, all strings the same length.
inline vmatch::LevelSequences make_level(int rows, int cols, int seg_len,
                                         vmatch::LevelSpec spec,
                                         const std::vector<std::string>& cells,
                                         int level = 0) {
    vmatch::LevelSequences lv;
    lv.spec = spec;
    lv.level = level;
    lv.rows = rows;
    lv.cols = cols;
    lv.length = static_cast<int>(cells.at(0).size());
    lv.seg_len = seg_len;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            lv.seqs.push_back(seq_of(cells.at(static_cast<std::size_t>(r) * cols + c),
                                     seg_len, r, c));
    return lv;
}

} // namespace testutil
