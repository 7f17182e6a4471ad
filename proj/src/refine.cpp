#include "vmatch/refine.hpp"

#include <algorithm>
#include <cmath>

#include "vmatch/errors.hpp"
#include "vmatch/parallel.hpp"
#include "vmatch/rng.hpp"

namespace vmatch {

std::size_t MatchMap::valid_count() const {
    std::size_t n = 0;
    for (const auto& e : entries)
        if (e.valid) ++n;
    return n;
}

MatchMap seed_match_map(const std::vector<MatchTriplet>& triplets, int rows, int cols) {
    MatchMap mm;
    mm.rows = rows;
    mm.cols = cols;
    mm.entries.assign(static_cast<std::size_t>(rows) * cols, {});
    for (const auto& t : triplets) {
        MatchEntry& e = mm.at(t.a.row, t.a.col);
        const bool better =
            !e.valid || t.dist < e.dist ||
            (t.dist == e.dist &&
             (t.b.row < e.b.row || (t.b.row == e.b.row && t.b.col < e.b.col)));
        if (better) e = {t.b, t.dist, true};
    }
    return mm;
}

MatchMap random_search(const MatchMap& mm, const LevelSequences& A,
                       const LevelSequences& B, const std::vector<std::uint8_t>& cand_b,
                       int length, const RefineParams& params) {
    if (!(params.alpha > 0.0 && params.alpha < 1.0))
        throw input_error("search alpha must lie in (0, 1)");
    const double w0 =
        params.w0 > 0 ? params.w0 : static_cast<double>(std::max(B.rows, B.cols));
    MatchMap out = mm;

    parallel_for(out.entries.size(), params.threads, [&](std::size_t i) {
        MatchEntry& e = out.entries[i];
        if (!e.valid) return;
        const auto& sa = A.seqs[i];

        int step = 0;
        for (double radius = w0; radius >= 1.0; radius *= params.alpha, ++step) {
            for (int trial = 0; trial < params.trials_per_level; ++trial) {
                const std::uint64_t h =
                    hash4(params.seed, static_cast<std::uint64_t>(i),
                          static_cast<std::uint64_t>(step),
                          static_cast<std::uint64_t>(trial));
                const int dr = static_cast<int>(std::lround(radius * signed_unit(h)));
                const int dc = static_cast<int>(std::lround(radius * signed_unit(mix64(h))));
                const int br = e.b.row + dr, bc = e.b.col + dc;
                if ((dr == 0 && dc == 0) || br < 0 || bc < 0 || br >= B.rows || bc >= B.cols)
                    continue;
                const std::size_t j = static_cast<std::size_t>(br) * B.cols + bc;
                if (!cand_b[j]) continue;
                const double d = sequence_distance(sa, B.seqs[j], length);
                if (d < e.dist) e = {{br, bc}, d, true};
            }
        }
    });
    return out;
}

MatchMap propagate(const MatchMap& mm, const LevelSequences& A,
                   const LevelSequences& B, const std::vector<std::uint8_t>& cand_a,
                   const std::vector<std::uint8_t>& cand_b, int length,
                   double accept_threshold, const RefineParams& params) {
    static constexpr int kNeighbors[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    MatchMap out = mm;

    parallel_for(mm.entries.size(), params.threads, [&](std::size_t i) {
        if (!cand_a[i]) return;
        const int r = static_cast<int>(i) / mm.cols;
        const int c = static_cast<int>(i) % mm.cols;
        const MatchEntry& cur = mm.entries[i]; // round-start snapshot
        const auto& sa = A.seqs[i];

        MatchEntry best = cur;
        for (const auto& [dr, dc] : kNeighbors) {
            const int nr = r + dr, nc = c + dc;
            if (nr < 0 || nc < 0 || nr >= mm.rows || nc >= mm.cols) continue;
            const MatchEntry& ne = mm.at(nr, nc);
            if (!ne.valid) continue;
            // The neighbor (r+dr, c+dc) maps to ne.b, so this patch should
            // map to ne.b shifted back by the same grid offset.
            const int br = ne.b.row - dr, bc = ne.b.col - dc;
            if (br < 0 || bc < 0 || br >= B.rows || bc >= B.cols) continue;
            const std::size_t j = static_cast<std::size_t>(br) * B.cols + bc;
            if (!cand_b[j]) continue;
            if (best.valid && best.b.row == br && best.b.col == bc) continue;
            const double d = sequence_distance(sa, B.seqs[j], length);
            if (d > accept_threshold) continue;
            if (!best.valid || d < best.dist) best = {{br, bc}, d, true};
        }
        out.entries[i] = best;
    });
    return out;
}

std::vector<MatchTriplet> refine_level(const std::vector<MatchTriplet>& triplets,
                                       const LevelSequences& A, const LevelSequences& B,
                                       const std::vector<std::uint8_t>& cand_a,
                                       const std::vector<std::uint8_t>& cand_b,
                                       int length, double accept_threshold,
                                       const RefineParams& params) {
    MatchMap mm = seed_match_map(triplets, A.rows, A.cols);
    mm = random_search(mm, A, B, cand_b, length, params);
    for (int round = 0; round < params.iterations; ++round)
        mm = propagate(mm, A, B, cand_a, cand_b, length, accept_threshold, params);

    std::vector<MatchTriplet> out;
    out.reserve(mm.valid_count());
    for (int r = 0; r < mm.rows; ++r)
        for (int c = 0; c < mm.cols; ++c) {
            const MatchEntry& e = mm.at(r, c);
            if (e.valid) out.push_back({{r, c}, e.b, e.dist});
        }
    std::sort(out.begin(), out.end(), [](const MatchTriplet& x, const MatchTriplet& y) {
        if (x.dist != y.dist) return x.dist < y.dist;
        if (x.a.row != y.a.row) return x.a.row < y.a.row;
        if (x.a.col != y.a.col) return x.a.col < y.a.col;
        if (x.b.row != y.b.row) return x.b.row < y.b.row;
        return x.b.col < y.b.col;
    });
    return out;
}

} // namespace vmatch
