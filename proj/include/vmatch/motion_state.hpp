#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vmatch/bitseq.hpp"
#include "vmatch/video_io.hpp"

namespace vmatch {

// Thresholds governing mask construction and state decisions.
struct Thresholds {
    int t1 = 4;                         // per-pixel |difference| cutoff, gray levels
    double t2_frac = 1.0 / 6.0;         // finest level: motion fraction of patch area
    double t3_frac = 1.0 / 6.0;         // aggregated (coarser) levels: same rule
    int seg_len = 500;                  // states per segment
    double min_motion_frac = 1.0 / 30.0; // candidate filter vs. sequence length
};

// Binary motion flags for one state, row-major.
struct MotionMask {
    int state_index = 0;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // width*height, values 0/1
};

// Summed-area table over a mask; rectangle sums in O(1).
struct IntegralImage {
    int width = 0;  // of the underlying mask
    int height = 0;
    std::vector<std::uint32_t> sum; // (width+1) * (height+1)

    // Sum over the half-open rectangle [x0,x1) × [y0,y1).
    std::uint32_t rect(int x0, int y0, int x1, int y1) const {
        const std::size_t w = width + 1;
        return sum[static_cast<std::size_t>(y1) * w + x1] -
               sum[static_cast<std::size_t>(y0) * w + x1] -
               sum[static_cast<std::size_t>(y1) * w + x0] +
               sum[static_cast<std::size_t>(y0) * w + x0];
    }
};

// One hierarchy level: square patches of patch_size pixels laid out on a
// regular grid with the given stride (stride == patch_size tiles exactly;
// stride < patch_size overlaps).
struct LevelSpec {
    int patch_size = 8;
    int stride = 8;

    bool operator==(const LevelSpec&) const = default;
};

// Per-patch motion-pixel counts for one state at one level.
struct CountGrid {
    int state_index = 0;
    int level = 0;
    int patch_size = 0;
    int stride = 0;
    int rows = 0;
    int cols = 0;
    std::vector<int> counts; // rows*cols, row-major
};

// Bit-packed motion-state sequence of one patch, with per-segment popcounts
// cached so segment distances never rescan the words.
struct StateSequence {
    int row = 0;
    int col = 0;
    BitSeq bits;
    std::vector<std::uint32_t> ones_per_segment;
    std::uint64_t total_ones = 0;
};

// All sequences of one hierarchy level, grid row-major.
struct LevelSequences {
    LevelSpec spec;
    int level = 0;   // index within the plan, 0 = coarsest
    int rows = 0;
    int cols = 0;
    int length = 0;  // states per sequence (L)
    int seg_len = 500;
    std::vector<StateSequence> seqs; // rows*cols

    const StateSequence& at(int r, int c) const {
        return seqs[static_cast<std::size_t>(r) * cols + c];
    }
    int segment_count() const {
        return length == 0 ? 0 : (length + seg_len - 1) / seg_len;
    }
};

// Three-frame differencing: bit(x,y) = 1 iff |mid−prev| > t1 AND
// |next−mid| > t1 at that pixel.  All three frames must share dimensions.
MotionMask motion_mask(const Frame& prev, const Frame& mid, const Frame& next,
                       int t1);

IntegralImage integrate(const MotionMask& mask);

// Motion-pixel count per patch rectangle (O(1) each via the integral image).
CountGrid count_patches(const MotionMask& mask, int patch_size, int stride);

// State rule: 1 iff count > frac × patch_area (strict).
inline bool patch_state(int count, int patch_area, double frac) {
    return count > frac * patch_area;
}

// Grid geometry after cropping the frame to a multiple of the coarsest
// patch size (bottom/right crop).
struct GridGeometry {
    int usable_width = 0;
    int usable_height = 0;
    std::vector<std::pair<int, int>> dims; // per level: rows, cols
};
GridGeometry grid_geometry(int width, int height,
                           const std::vector<LevelSpec>& levels);

// Builds every level's sequences in one streaming pass: state t consumes
// frames 2t, 2t+1, 2t+2, so L = min(max_states, (frame_count−1)/2).  Levels
// must be ordered coarse→fine; all counts at every level come from one
// integral image per state (a parent's count equals the sum of its children
// when the grids tile exactly).
std::vector<LevelSequences> build_sequences(const FrameSource& src,
                                            const std::vector<LevelSpec>& levels,
                                            const Thresholds& th, int max_states,
                                            int threads = 1);

// Binary cache for built sequences (magic "FLSQ").  The cache stores grid
// shapes and packed bits only; callers are responsible for using it with the
// same video and thresholds it was built from.
void write_states_cache(const std::filesystem::path& file,
                        const std::vector<LevelSequences>& levels);
std::vector<LevelSequences> read_states_cache(const std::filesystem::path& file);

} // namespace vmatch
