#include "vmatch/motion_state.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>

#include "vmatch/errors.hpp"
#include "vmatch/parallel.hpp"

namespace vmatch {

MotionMask motion_mask(const Frame& prev, const Frame& mid, const Frame& next,
                       int t1) {
    if (prev.width != mid.width || prev.height != mid.height ||
        next.width != mid.width || next.height != mid.height)
        throw input_error("motion_mask: frame dimensions differ");

    MotionMask m;
    m.width = mid.width;
    m.height = mid.height;
    m.bits.resize(static_cast<std::size_t>(m.width) * m.height);
    const std::size_t n = m.bits.size();
    for (std::size_t i = 0; i < n; ++i) {
        const int d1 = std::abs(int(mid.data[i]) - int(prev.data[i]));
        const int d2 = std::abs(int(next.data[i]) - int(mid.data[i]));
        m.bits[i] = (d1 > t1 && d2 > t1) ? 1 : 0;
    }
    return m;
}

IntegralImage integrate(const MotionMask& mask) {
    IntegralImage ii;
    ii.width = mask.width;
    ii.height = mask.height;
    const std::size_t w1 = mask.width + 1;
    ii.sum.assign(w1 * (mask.height + 1), 0);
    for (int y = 0; y < mask.height; ++y) {
        std::uint32_t row = 0;
        const std::uint8_t* src = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
        const std::uint32_t* above = ii.sum.data() + static_cast<std::size_t>(y) * w1;
        std::uint32_t* out = ii.sum.data() + static_cast<std::size_t>(y + 1) * w1;
        for (int x = 0; x < mask.width; ++x) {
            row += src[x];
            out[x + 1] = above[x + 1] + row;
        }
    }
    return ii;
}

namespace {

std::pair<int, int> level_dims(int usable_w, int usable_h, const LevelSpec& s) {
    const int rows = (usable_h - s.patch_size) / s.stride + 1;
    const int cols = (usable_w - s.patch_size) / s.stride + 1;
    return {rows, cols};
}

} // namespace

CountGrid count_patches(const MotionMask& mask, int patch_size, int stride) {
    if (patch_size < 1 || patch_size > mask.width || patch_size > mask.height)
        throw input_error("count_patches: patch_size out of range");
    if (stride < 1 || stride > patch_size)
        throw input_error("count_patches: stride must be in [1, patch_size]");

    const IntegralImage ii = integrate(mask);
    CountGrid g;
    g.state_index = mask.state_index;
    g.patch_size = patch_size;
    g.stride = stride;
    g.rows = (mask.height - patch_size) / stride + 1;
    g.cols = (mask.width - patch_size) / stride + 1;
    g.counts.resize(static_cast<std::size_t>(g.rows) * g.cols);
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c) {
            const int x0 = c * stride, y0 = r * stride;
            g.counts[static_cast<std::size_t>(r) * g.cols + c] =
                static_cast<int>(ii.rect(x0, y0, x0 + patch_size, y0 + patch_size));
        }
    return g;
}

GridGeometry grid_geometry(int width, int height,
                           const std::vector<LevelSpec>& levels) {
    if (levels.empty()) throw input_error("no hierarchy levels given");
    int coarsest = 0;
    for (const auto& s : levels) coarsest = std::max(coarsest, s.patch_size);

    GridGeometry geo;
    geo.usable_width = (width / coarsest) * coarsest;
    geo.usable_height = (height / coarsest) * coarsest;
    if (geo.usable_width < coarsest || geo.usable_height < coarsest)
        throw input_error("frame " + std::to_string(width) + "x" + std::to_string(height) +
                          " smaller than one " + std::to_string(coarsest) + "px patch");
    for (const auto& s : levels)
        geo.dims.push_back(level_dims(geo.usable_width, geo.usable_height, s));
    return geo;
}

std::vector<LevelSequences> build_sequences(const FrameSource& src,
                                            const std::vector<LevelSpec>& levels,
                                            const Thresholds& th, int max_states,
                                            int threads) {
    if (max_states < 1) throw input_error("max_states must be ≥ 1");
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        if (levels[i].patch_size < levels[i + 1].patch_size)
            throw input_error("hierarchy levels must be ordered coarse to fine");
    for (const auto& s : levels)
        if (s.stride < 1 || s.stride > s.patch_size)
            throw input_error("level stride must be in [1, patch_size]");

    const int frames = src.frame_count();
    if (frames < 3)
        throw input_error("need at least 3 frames, have " + std::to_string(frames));
    const int length = std::min(max_states, (frames - 1) / 2);

    const GridGeometry geo = grid_geometry(src.width(), src.height(), levels);
    int finest_patch = levels[0].patch_size;
    for (const auto& s : levels) finest_patch = std::min(finest_patch, s.patch_size);

    std::vector<LevelSequences> out(levels.size());
    for (std::size_t li = 0; li < levels.size(); ++li) {
        auto& lv = out[li];
        lv.spec = levels[li];
        lv.level = static_cast<int>(li);
        lv.rows = geo.dims[li].first;
        lv.cols = geo.dims[li].second;
        lv.length = length;
        lv.seg_len = th.seg_len;
        lv.seqs.resize(static_cast<std::size_t>(lv.rows) * lv.cols);
        for (int r = 0; r < lv.rows; ++r)
            for (int c = 0; c < lv.cols; ++c) {
                auto& sq = lv.seqs[static_cast<std::size_t>(r) * lv.cols + c];
                sq.row = r;
                sq.col = c;
                sq.bits = BitSeq(static_cast<std::size_t>(length));
            }
    }

    // Streaming pass: keep a 3-frame window, advancing 2 frames per state.
    Frame a = src.frame(0);
    Frame b, c;
    MotionMask mask;
    mask.width = a.width;
    mask.height = a.height;
    mask.bits.resize(static_cast<std::size_t>(a.width) * a.height);

    for (int t = 0; t < length; ++t) {
        b = src.frame(2 * t + 1);
        c = src.frame(2 * t + 2);
        if (b.width != a.width || b.height != a.height ||
            c.width != a.width || c.height != a.height)
            throw input_error("frame dimensions changed mid-video");

        mask.state_index = t;
        const int t1 = th.t1;
        const Frame &fa = a, &fb = b, &fc = c;
        parallel_for(static_cast<std::size_t>(mask.height), threads, [&](std::size_t y) {
            const std::size_t off = y * mask.width;
            for (int x = 0; x < mask.width; ++x) {
                const std::size_t i = off + x;
                const int d1 = std::abs(int(fb.data[i]) - int(fa.data[i]));
                const int d2 = std::abs(int(fc.data[i]) - int(fb.data[i]));
                mask.bits[i] = (d1 > t1 && d2 > t1) ? 1 : 0;
            }
        });

        const IntegralImage ii = integrate(mask);

        for (auto& lv : out) {
            const int ps = lv.spec.patch_size;
            const int stride = lv.spec.stride;
            const double frac = (ps == finest_patch) ? th.t2_frac : th.t3_frac;
            const double cutoff = frac * ps * ps;
            parallel_for(lv.seqs.size(), threads, [&](std::size_t i) {
                auto& sq = lv.seqs[i];
                const int x0 = sq.col * stride, y0 = sq.row * stride;
                const std::uint32_t count = ii.rect(x0, y0, x0 + ps, y0 + ps);
                if (count > cutoff) sq.bits.set(static_cast<std::size_t>(t), true);
            });
        }

        a = std::move(c);
    }

    // Popcount caches.
    for (auto& lv : out) {
        const int segs = lv.segment_count();
        parallel_for(lv.seqs.size(), threads, [&](std::size_t i) {
            auto& sq = lv.seqs[i];
            sq.ones_per_segment.resize(segs);
            sq.total_ones = 0;
            for (int k = 0; k < segs; ++k) {
                const std::size_t lo = static_cast<std::size_t>(k) * lv.seg_len;
                const std::size_t hi =
                    std::min<std::size_t>(lo + lv.seg_len, static_cast<std::size_t>(lv.length));
                sq.ones_per_segment[k] = static_cast<std::uint32_t>(sq.bits.popcount_range(lo, hi));
                sq.total_ones += sq.ones_per_segment[k];
            }
        });
    }
    return out;
}

// ------------------------------------------------------------- cache ----

namespace {

constexpr char kMagic[4] = {'F', 'L', 'S', 'Q'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void put_le(std::ofstream& out, T v) {
    std::uint8_t buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<std::uint8_t>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::ifstream& in, const std::filesystem::path& file) {
    std::uint8_t buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (in.gcount() != sizeof(T))
        throw input_error("truncated states cache: " + file.string());
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return static_cast<T>(v);
}

} // namespace

void write_states_cache(const std::filesystem::path& file,
                        const std::vector<LevelSequences>& levels) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw input_error("cannot write " + file.string());
    out.write(kMagic, 4);
    put_le<std::uint16_t>(out, kVersion);
    put_le<std::uint16_t>(out, static_cast<std::uint16_t>(levels.size()));
    for (const auto& lv : levels) {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(lv.spec.patch_size));
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(lv.spec.stride));
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(lv.rows));
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(lv.cols));
    }
    if (levels.empty()) throw input_error("refusing to cache zero levels");
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(levels[0].length));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(levels[0].seg_len));

    for (const auto& lv : levels)
        for (const auto& sq : lv.seqs)
            for (const std::uint64_t w : sq.bits.words())
                put_le<std::uint64_t>(out, w);
    if (!out) throw input_error("short write: " + file.string());
}

std::vector<LevelSequences> read_states_cache(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw input_error("cannot open " + file.string());
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
        throw input_error("not a states cache: " + file.string());
    if (get_le<std::uint16_t>(in, file) != kVersion)
        throw input_error("unsupported states cache version: " + file.string());

    const std::uint16_t n_levels = get_le<std::uint16_t>(in, file);
    if (n_levels == 0) throw input_error("states cache has no levels: " + file.string());

    std::vector<LevelSequences> out(n_levels);
    for (auto& lv : out) {
        lv.spec.patch_size = static_cast<int>(get_le<std::uint32_t>(in, file));
        lv.spec.stride = static_cast<int>(get_le<std::uint32_t>(in, file));
        lv.rows = static_cast<int>(get_le<std::uint32_t>(in, file));
        lv.cols = static_cast<int>(get_le<std::uint32_t>(in, file));
    }
    const int length = static_cast<int>(get_le<std::uint32_t>(in, file));
    const int seg_len = static_cast<int>(get_le<std::uint32_t>(in, file));
    if (length < 0 || seg_len < 1)
        throw input_error("corrupt states cache header: " + file.string());

    for (std::size_t li = 0; li < out.size(); ++li) {
        auto& lv = out[li];
        lv.level = static_cast<int>(li);
        lv.length = length;
        lv.seg_len = seg_len;
        lv.seqs.resize(static_cast<std::size_t>(lv.rows) * lv.cols);
        const int segs = lv.segment_count();
        for (int r = 0; r < lv.rows; ++r)
            for (int c = 0; c < lv.cols; ++c) {
                auto& sq = lv.seqs[static_cast<std::size_t>(r) * lv.cols + c];
                sq.row = r;
                sq.col = c;
                sq.bits = BitSeq(static_cast<std::size_t>(length));
                for (auto& w : sq.bits.words()) w = get_le<std::uint64_t>(in, file);
                sq.ones_per_segment.resize(segs);
                sq.total_ones = 0;
                for (int k = 0; k < segs; ++k) {
                    const std::size_t lo = static_cast<std::size_t>(k) * seg_len;
                    const std::size_t hi =
                        std::min<std::size_t>(lo + seg_len, static_cast<std::size_t>(length));
                    sq.ones_per_segment[k] =
                        static_cast<std::uint32_t>(sq.bits.popcount_range(lo, hi));
                    sq.total_ones += sq.ones_per_segment[k];
                }
            }
    }
    return out;
}

} // namespace vmatch
