#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "test_util.hpp"
#include "vmatch/errors.hpp"
#include "vmatch/motion_state.hpp"
#include "vmatch/rng.hpp"

using namespace vmatch;
using testutil::block_frame;
using testutil::MemorySource;

TEST_CASE("luminance conversion") {
    CHECK(luminance(100, 200, 50) == 153);
    CHECK(luminance(0, 0, 0) == 0);
    CHECK(luminance(255, 255, 255) == 255);
    // Already-gray pixels are fixed points, so double conversion is safe.
    for (int v : {0, 1, 77, 128, 254, 255}) {
        const auto g = luminance(static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v),
                                 static_cast<std::uint8_t>(v));
        CHECK(g == v);
    }
}

TEST_CASE("motion mask needs both frame differences to exceed t1") {
    Frame prev(4, 1, 100), mid(4, 1, 100), next(4, 1, 100);
    // pixel 0: both diffs 5 (> 4) → moving
    mid.at(0, 0) = 105;
    next.at(0, 0) = 110;
    // pixel 1: first diff 5, second diff 0 → static
    mid.at(1, 0) = 105;
    next.at(1, 0) = 105;
    // pixel 2: both diffs exactly 4 → not strictly greater → static
    mid.at(2, 0) = 104;
    next.at(2, 0) = 108;
    // pixel 3: untouched → static
    const MotionMask m = motion_mask(prev, mid, next, 4);
    CHECK(m.bits == std::vector<std::uint8_t>{1, 0, 0, 0});
}

TEST_CASE("motion mask rejects mismatched dimensions") {
    Frame a(4, 4), b(4, 4), c(5, 4);
    CHECK_THROWS_AS(motion_mask(a, b, c, 4), input_error);
}

TEST_CASE("count_patches equals a brute-force rectangle scan") {
    MotionMask mask;
    mask.width = 37;
    mask.height = 29;
    mask.bits.resize(static_cast<std::size_t>(37) * 29);
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
        mask.bits[i] = unit_double(hash2(42, i)) < 0.3 ? 1 : 0;

    for (const auto& [patch, stride] : {std::pair{8, 8}, {8, 4}, {5, 2}, {3, 3}}) {
        const CountGrid g = count_patches(mask, patch, stride);
        CHECK(g.rows == (mask.height - patch) / stride + 1);
        CHECK(g.cols == (mask.width - patch) / stride + 1);
        for (int r = 0; r < g.rows; ++r)
            for (int c = 0; c < g.cols; ++c) {
                int want = 0;
                for (int y = r * stride; y < r * stride + patch; ++y)
                    for (int x = c * stride; x < c * stride + patch; ++x)
                        want += mask.bits[static_cast<std::size_t>(y) * mask.width + x];
                CHECK(g.counts[static_cast<std::size_t>(r) * g.cols + c] == want);
            }
    }
}

TEST_CASE("a single motion pixel is counted by exactly its covering patches") {
    MotionMask mask;
    mask.width = 16;
    mask.height = 16;
    mask.bits.assign(256, 0);
    mask.bits[9 * 16 + 5] = 1; // (x=5, y=9)
    const CountGrid g = count_patches(mask, 8, 8);
    CHECK(g.counts == std::vector<int>{0, 0, 1, 0}); // only the lower-left tile
}

TEST_CASE("patch state threshold is strict") {
    CHECK(patch_state(11, 64, 1.0 / 6.0));       // 11 > 10.67
    CHECK_FALSE(patch_state(10, 64, 1.0 / 6.0)); // 10 < 10.67
    CHECK_FALSE(patch_state(0, 64, 1.0 / 6.0));
    // Exact equality does not trip the strict comparison.
    CHECK_FALSE(patch_state(32, 64, 0.5));
    CHECK(patch_state(33, 64, 0.5));
}

TEST_CASE("integral image: parent rectangle equals the sum of its children") {
    MotionMask mask;
    mask.width = 64;
    mask.height = 64;
    mask.bits.resize(4096);
    for (std::size_t i = 0; i < mask.bits.size(); ++i)
        mask.bits[i] = unit_double(hash2(7, i)) < 0.5 ? 1 : 0;
    const IntegralImage ii = integrate(mask);
    const auto parent = ii.rect(0, 0, 64, 64);
    const auto childs = ii.rect(0, 0, 32, 32) + ii.rect(32, 0, 64, 32) +
                        ii.rect(0, 32, 32, 64) + ii.rect(32, 32, 64, 64);
    CHECK(parent == childs);
    CHECK(parent == static_cast<std::uint32_t>(
                        std::count(mask.bits.begin(), mask.bits.end(), 1)));
}

TEST_CASE("grid geometry crops to the coarsest patch multiple") {
    const auto g = grid_geometry(160, 100, {{64, 64}, {32, 32}, {16, 16}, {8, 8}});
    CHECK(g.usable_width == 128);  // 160 → 2 coarse patches
    CHECK(g.usable_height == 64);  // 100 → 1 coarse patch
    CHECK(g.dims[0] == std::pair{1, 2});
    CHECK(g.dims[1] == std::pair{2, 4});
    CHECK(g.dims[2] == std::pair{4, 8});
    CHECK(g.dims[3] == std::pair{8, 16});
    CHECK_THROWS_AS(grid_geometry(50, 128, {{64, 64}}), input_error);
}

namespace {

// Frames where a fixed 8×8 block flashes white on every odd frame.  State t
// reads frames 2t, 2t+1, 2t+2 = (black, white, black), so both differences
// exceed any t1 < 255 inside the block and the block patch is always moving.
MemorySource flashing_block_video(int frames) {
    MemorySource src;
    for (int k = 0; k < frames; ++k)
        src.frames.push_back(k % 2 == 1 ? block_frame(16, 16, 0, 0, 8, 8)
                                        : vmatch::Frame(16, 16, 0));
    return src;
}

} // namespace

TEST_CASE("build_sequences: flashing block gives all-ones vs all-zeros signatures") {
    const MemorySource src = flashing_block_video(21); // L = 10
    const auto levels = build_sequences(src, {{8, 8}}, Thresholds{}, 1499);
    REQUIRE(levels.size() == 1);
    const LevelSequences& L = levels[0];
    CHECK(L.rows == 2);
    CHECK(L.cols == 2);
    CHECK(L.length == 10);
    CHECK(L.at(0, 0).bits.popcount() == 10); // the flashing patch
    CHECK(L.at(0, 1).bits.popcount() == 0);
    CHECK(L.at(1, 0).bits.popcount() == 0);
    CHECK(L.at(1, 1).bits.popcount() == 0);
    CHECK(L.at(0, 0).total_ones == 10);
    CHECK(L.at(0, 0).ones_per_segment == std::vector<std::uint32_t>{10});
}

TEST_CASE("state count: 3000 frames give 1499 states, capped by max_states") {
    MemorySource src;
    for (int k = 0; k < 3000; ++k) src.frames.emplace_back(8, 8, 0);
    const auto levels = build_sequences(src, {{8, 8}}, Thresholds{}, 1499);
    CHECK(levels[0].length == 1499);

    const auto capped = build_sequences(src, {{8, 8}}, Thresholds{}, 100);
    CHECK(capped[0].length == 100);

    // Even frame counts round down: 8 frames → 3 states (frames 0..6 used).
    MemorySource even;
    for (int k = 0; k < 8; ++k) even.frames.emplace_back(8, 8, 0);
    CHECK(build_sequences(even, {{8, 8}}, Thresholds{}, 1499)[0].length == 3);
}

TEST_CASE("build_sequences validates the level ordering") {
    const MemorySource src = flashing_block_video(9);
    CHECK_THROWS_AS(build_sequences(src, {{8, 8}, {16, 16}}, Thresholds{}, 10),
                    input_error);
    CHECK_THROWS_AS(build_sequences(src, {{8, 12}}, Thresholds{}, 10), input_error);
}

TEST_CASE("segment popcount caches agree with the packed bits") {
    const MemorySource src = flashing_block_video(41); // L = 20
    Thresholds th;
    th.seg_len = 7; // segments: 7, 7, 6
    const auto levels = build_sequences(src, {{8, 8}}, th, 1499);
    const StateSequence& s = levels[0].at(0, 0);
    REQUIRE(s.ones_per_segment.size() == 3);
    CHECK(s.ones_per_segment[0] == s.bits.popcount_range(0, 7));
    CHECK(s.ones_per_segment[1] == s.bits.popcount_range(7, 14));
    CHECK(s.ones_per_segment[2] == s.bits.popcount_range(14, 20));
    CHECK(s.total_ones == s.bits.popcount());
}

TEST_CASE("coarse level states derive from the same mask (two-level block video)") {
    // 32×32 frames, flashing 16×16 block: the block fills a quarter of the
    // 32-patch (256 px > 1024/6) and all of one 16-patch.
    MemorySource src;
    for (int k = 0; k < 9; ++k)
        src.frames.push_back(k % 2 == 1 ? block_frame(32, 32, 0, 0, 16, 16)
                                        : vmatch::Frame(32, 32, 0));
    const auto levels = build_sequences(src, {{32, 32}, {16, 16}}, Thresholds{}, 1499);
    const LevelSequences& coarse = levels[0];
    const LevelSequences& fine = levels[1];
    CHECK(coarse.at(0, 0).bits.popcount() == 4); // 256 > 170.67 every state
    CHECK(fine.at(0, 0).bits.popcount() == 4);   // 256 > 42.67
    CHECK(fine.at(0, 1).bits.popcount() == 0);
    CHECK(fine.at(1, 0).bits.popcount() == 0);
    CHECK(fine.at(1, 1).bits.popcount() == 0);
}

TEST_CASE("build_sequences is thread-count invariant") {
    MemorySource src;
    for (int k = 0; k < 25; ++k) {
        // Two blocks moving in different patterns plus noise-free background.
        vmatch::Frame f(32, 32, 0);
        if (k % 2 == 1) f = block_frame(32, 32, (k / 2) % 8, 0, 12, 12);
        if (k % 3 == 1)
            for (int y = 20; y < 30; ++y)
                for (int x = 20; x < 30; ++x) f.at(x, y) = 200;
        src.frames.push_back(std::move(f));
    }
    const auto serial = build_sequences(src, {{16, 16}, {8, 8}}, Thresholds{}, 1499, 1);
    const auto parallel = build_sequences(src, {{16, 16}, {8, 8}}, Thresholds{}, 1499, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t lv = 0; lv < serial.size(); ++lv) {
        REQUIRE(serial[lv].seqs.size() == parallel[lv].seqs.size());
        for (std::size_t i = 0; i < serial[lv].seqs.size(); ++i)
            CHECK(serial[lv].seqs[i].bits.words() == parallel[lv].seqs[i].bits.words());
    }
}

TEST_CASE("states cache round-trips exactly") {
    const MemorySource src = flashing_block_video(21);
    Thresholds th;
    th.seg_len = 4;
    const auto built = build_sequences(src, {{16, 16}, {8, 8}}, th, 1499);

    const auto file = std::filesystem::temp_directory_path() / "vmatch_states_test.bin";
    write_states_cache(file, built);
    const auto loaded = read_states_cache(file);
    std::filesystem::remove(file);

    REQUIRE(loaded.size() == built.size());
    for (std::size_t lv = 0; lv < built.size(); ++lv) {
        CHECK(loaded[lv].spec == built[lv].spec);
        CHECK(loaded[lv].rows == built[lv].rows);
        CHECK(loaded[lv].cols == built[lv].cols);
        CHECK(loaded[lv].length == built[lv].length);
        CHECK(loaded[lv].seg_len == built[lv].seg_len);
        REQUIRE(loaded[lv].seqs.size() == built[lv].seqs.size());
        for (std::size_t i = 0; i < built[lv].seqs.size(); ++i) {
            CHECK(loaded[lv].seqs[i].bits.words() == built[lv].seqs[i].bits.words());
            CHECK(loaded[lv].seqs[i].ones_per_segment ==
                  built[lv].seqs[i].ones_per_segment);
            CHECK(loaded[lv].seqs[i].total_ones == built[lv].seqs[i].total_ones);
        }
    }
}

TEST_CASE("reading a corrupt states cache is an input error") {
    const auto file = std::filesystem::temp_directory_path() / "vmatch_states_bad.bin";
    {
        std::FILE* f = std::fopen(file.string().c_str(), "wb");
        REQUIRE(f);
        std::fputs("not a cache", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(read_states_cache(file), input_error);
    std::filesystem::remove(file);
}
