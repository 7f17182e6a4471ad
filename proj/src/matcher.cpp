#include "vmatch/matcher.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "vmatch/errors.hpp"
#include "vmatch/parallel.hpp"

namespace vmatch {

namespace {

// Popcount of s over [lo, hi), using the per-segment cache when the range
// is exactly a cached full segment.
std::uint64_t range_pop(const StateSequence& s, int seg_index, std::size_t lo,
                        std::size_t hi, int seg_len) {
    if (hi - lo == static_cast<std::size_t>(seg_len) &&
        seg_index < static_cast<int>(s.ones_per_segment.size()))
        return s.ones_per_segment[seg_index];
    return s.bits.popcount_range(lo, hi);
}

int ceil_div(int a, int b) { // b > 0
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}
int floor_div(int a, int b) { // b > 0
    return a >= 0 ? a / b : -((-a + b - 1) / b);
}

} // namespace

DistanceTerms distance_terms_range(const StateSequence& s1, const StateSequence& s2,
                                   int begin, int end) {
    if (begin < 0 || end < begin ||
        static_cast<std::size_t>(end) > s1.bits.size() ||
        static_cast<std::size_t>(end) > s2.bits.size())
        throw internal_error("distance range exceeds sequence length");
    DistanceTerms t;
    const auto lo = static_cast<std::size_t>(begin);
    const auto hi = static_cast<std::size_t>(end);
    t.overlap = BitSeq::and_popcount_range(s1.bits, s2.bits, lo, hi);
    t.pop1 = s1.bits.popcount_range(lo, hi);
    t.pop2 = s2.bits.popcount_range(lo, hi);
    return t;
}

SegmentedOutcome segmented_distance(const StateSequence& s1, const StateSequence& s2,
                                    int length, int seg_len,
                                    double per_seg_threshold, int max_bad) {
    if (seg_len < 1) throw input_error("seg_len must be ≥ 1");
    if (length < 0 || static_cast<std::size_t>(length) > s1.bits.size() ||
        static_cast<std::size_t>(length) > s2.bits.size())
        throw internal_error("segmented_distance: length exceeds sequences");

    SegmentedOutcome out;
    int bad = 0;
    for (int k = 0; static_cast<std::int64_t>(k) * seg_len < length; ++k) {
        const std::size_t lo = static_cast<std::size_t>(k) * seg_len;
        const std::size_t hi =
            std::min<std::size_t>(lo + seg_len, static_cast<std::size_t>(length));

        DistanceTerms seg;
        seg.pop1 = range_pop(s1, k, lo, hi, seg_len);
        seg.pop2 = range_pop(s2, k, lo, hi, seg_len);
        // Both silent: nothing to compare, the segment is neutral.
        if (seg.pop1 + seg.pop2 == 0) continue;
        seg.overlap = BitSeq::and_popcount_range(s1.bits, s2.bits, lo, hi);
        out.terms += seg;

        if (seg.value() > per_seg_threshold) {
            if (++bad >= max_bad) {
                out.aborted = true;
                out.dist = out.terms.value();
                return out;
            }
        }
    }
    out.dist = out.terms.value();
    return out;
}

std::vector<std::uint8_t> candidate_set(const LevelSequences& seqs, int length,
                                        double min_motion_frac) {
    std::vector<std::uint8_t> keep(seqs.seqs.size(), 0);
    const double cutoff = static_cast<double>(length) * min_motion_frac;
    for (std::size_t i = 0; i < seqs.seqs.size(); ++i) {
        const auto& sq = seqs.seqs[i];
        const std::uint64_t pop =
            (static_cast<std::size_t>(length) == sq.bits.size() && !sq.ones_per_segment.empty())
                ? sq.total_ones
                : sq.bits.popcount_range(0, static_cast<std::size_t>(length));
        keep[i] = (static_cast<double>(pop) >= cutoff) ? 1 : 0;
    }
    return keep;
}

double select_threshold(std::vector<double> first_segment_distances, double lambda) {
    if (first_segment_distances.empty())
        throw input_error("cannot select a threshold from zero comparable pairs");
    if (lambda < 1.0) throw input_error("lambda must be ≥ 1");
    const std::size_t m = first_segment_distances.size();
    auto rank = static_cast<std::size_t>(
        std::ceil(static_cast<double>(m) / lambda)); // 1-based nearest rank
    rank = std::min(std::max<std::size_t>(rank, 1), m);
    std::nth_element(first_segment_distances.begin(),
                     first_segment_distances.begin() + (rank - 1),
                     first_segment_distances.end());
    return first_segment_distances[rank - 1];
}

namespace {

// B-candidate indices inside an A-patch's scope, deduplicated, ascending.
std::vector<int> scope_indices(const ScopeMap& scope, std::size_t a_index,
                               const LevelSequences& B,
                               const std::vector<std::uint8_t>& cand_b) {
    std::vector<int> out;
    if (scope.global) {
        for (std::size_t j = 0; j < cand_b.size(); ++j)
            if (cand_b[j]) out.push_back(static_cast<int>(j));
        return out;
    }
    const auto& rects = scope.per_patch[a_index];
    for (const auto& r : rects) {
        const int r0 = std::max(r.r0, 0), r1 = std::min(r.r1, B.rows - 1);
        const int c0 = std::max(r.c0, 0), c1 = std::min(r.c1, B.cols - 1);
        for (int rr = r0; rr <= r1; ++rr)
            for (int cc = c0; cc <= c1; ++cc) {
                const int j = rr * B.cols + cc;
                if (cand_b[j]) out.push_back(j);
            }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

LevelMatchResult match_level(const LevelSequences& A, const LevelSequences& B,
                             const ScopeMap& scope, const MatchParams& params,
                             int length) {
    LevelMatchResult res;
    res.level = A.level;
    if (length > std::min(A.length, B.length))
        throw internal_error("match_level: length exceeds built sequences");
    if (!scope.global && scope.per_patch.size() != A.seqs.size())
        throw internal_error("match_level: scope map does not cover the A grid");
    const int seg_len = A.seg_len;

    const std::vector<std::uint8_t> cand_a =
        candidate_set(A, length, params.min_motion_frac);
    const std::vector<std::uint8_t> cand_b =
        candidate_set(B, length, params.min_motion_frac);

    std::vector<std::size_t> a_indices;
    for (std::size_t i = 0; i < cand_a.size(); ++i)
        if (cand_a[i] && (scope.global || !scope.per_patch[i].empty()))
            a_indices.push_back(i);

    // Pass 1: first-segment distances of every in-scope pair → τ.
    const int first_hi = std::min(seg_len, length);
    std::vector<std::vector<double>> firsts(a_indices.size());
    std::vector<std::uint64_t> eval_counts(a_indices.size(), 0);
    parallel_for(a_indices.size(), params.threads, [&](std::size_t slot) {
        const auto& sa = A.seqs[a_indices[slot]];
        const auto bs = scope_indices(scope, a_indices[slot], B, cand_b);
        eval_counts[slot] = bs.size();
        auto& local = firsts[slot];
        for (const int j : bs) {
            const DistanceTerms t = distance_terms_range(sa, B.seqs[j], 0, first_hi);
            if (t.pop1 + t.pop2 > 0) local.push_back(t.value());
        }
    });

    std::vector<double> multiset;
    for (const auto& v : firsts) multiset.insert(multiset.end(), v.begin(), v.end());
    for (const auto n : eval_counts) res.pair_evaluations += n;
    if (multiset.empty()) return res; // nothing comparable anywhere

    const double tau = select_threshold(std::move(multiset), params.lambda);
    res.threshold = tau;

    // Pass 2: full segmented walk; retain pairs with dist ≤ τ.
    std::vector<std::vector<MatchTriplet>> kept(a_indices.size());
    parallel_for(a_indices.size(), params.threads, [&](std::size_t slot) {
        const std::size_t ai = a_indices[slot];
        const auto& sa = A.seqs[ai];
        const auto bs = scope_indices(scope, ai, B, cand_b);
        for (const int j : bs) {
            const auto& sb = B.seqs[j];
            const SegmentedOutcome so = segmented_distance(
                sa, sb, length, seg_len, tau, params.max_bad_segments);
            if (!so.aborted && so.dist <= tau)
                kept[slot].push_back({{sa.row, sa.col}, {sb.row, sb.col}, so.dist});
        }
    });

    for (auto& v : kept)
        res.matches.insert(res.matches.end(), v.begin(), v.end());
    std::sort(res.matches.begin(), res.matches.end(),
              [](const MatchTriplet& x, const MatchTriplet& y) {
                  if (x.dist != y.dist) return x.dist < y.dist;
                  if (x.a.row != y.a.row) return x.a.row < y.a.row;
                  if (x.a.col != y.a.col) return x.a.col < y.a.col;
                  if (x.b.row != y.b.row) return x.b.row < y.b.row;
                  return x.b.col < y.b.col;
              });

    if (!params.keep_one_to_many) {
        // First appearance per A in (dist, a, b) order is that patch's best.
        std::vector<std::uint8_t> seen(A.seqs.size(), 0);
        std::vector<MatchTriplet> best;
        for (const auto& m : res.matches) {
            const std::size_t i = static_cast<std::size_t>(m.a.row) * A.cols + m.a.col;
            if (!seen[i]) {
                seen[i] = 1;
                best.push_back(m);
            }
        }
        res.matches = std::move(best);
    }
    return res;
}

ScopeMap derive_scopes(const std::vector<MatchTriplet>& parent_matches,
                       const LevelSequences& parent_a, const LevelSequences& child_a,
                       const LevelSequences& parent_b, const LevelSequences& child_b) {
    ScopeMap sm;
    sm.global = false;
    sm.per_patch.assign(child_a.seqs.size(), {});

    const int SA = parent_a.spec.stride, PA = parent_a.spec.patch_size;
    const int sa = child_a.spec.stride, pa = child_a.spec.patch_size;
    const int SB = parent_b.spec.stride, PB = parent_b.spec.patch_size;
    const int sb = child_b.spec.stride, pb = child_b.spec.patch_size;
    // Overlapping child grids get one extra stride of slack per side;
    // exact tilings inherit the parent rectangle as-is.
    const int dil = (sb < pb) ? sb : 0;

    for (const auto& m : parent_matches) {
        const int ax0 = m.a.col * SA, ay0 = m.a.row * SA;
        int ca0 = std::max(ceil_div(ax0, sa), 0);
        int ca1 = std::min(floor_div(ax0 + PA - pa, sa), child_a.cols - 1);
        int ra0 = std::max(ceil_div(ay0, sa), 0);
        int ra1 = std::min(floor_div(ay0 + PA - pa, sa), child_a.rows - 1);
        if (ca1 < ca0 || ra1 < ra0) continue;

        const int bx0 = m.b.col * SB - dil, by0 = m.b.row * SB - dil;
        const int bx1 = m.b.col * SB + PB + dil, by1 = m.b.row * SB + PB + dil;
        GridRect rect;
        rect.c0 = std::max(ceil_div(bx0, sb), 0);
        rect.c1 = std::min(floor_div(bx1 - pb, sb), child_b.cols - 1);
        rect.r0 = std::max(ceil_div(by0, sb), 0);
        rect.r1 = std::min(floor_div(by1 - pb, sb), child_b.rows - 1);
        if (rect.empty()) continue;

        for (int r = ra0; r <= ra1; ++r)
            for (int c = ca0; c <= ca1; ++c)
                sm.per_patch[static_cast<std::size_t>(r) * child_a.cols + c].push_back(rect);
    }
    return sm;
}

HierarchyResult run_hierarchy(const std::vector<LevelSequences>& A,
                              const std::vector<LevelSequences>& B,
                              const HierarchyPlan& plan, const MatchParams& params,
                              const LevelHook& hook) {
    if (A.size() != plan.levels.size() || B.size() != plan.levels.size())
        throw internal_error("run_hierarchy: sequence levels do not match the plan");
    for (std::size_t i = 0; i < plan.levels.size(); ++i)
        if (!(A[i].spec == plan.levels[i]) || !(B[i].spec == plan.levels[i]))
            throw internal_error("run_hierarchy: level specs disagree with the plan");

    HierarchyResult out;
    int length = std::min(A[0].length, B[0].length);
    for (std::size_t i = 0; i < A.size(); ++i)
        length = std::min({length, A[i].length, B[i].length});
    out.length = length;

    ScopeMap scope; // level 0: whole grid
    using clock = std::chrono::steady_clock;

    for (std::size_t li = 0; li < plan.levels.size(); ++li) {
        HierarchyLevelOutput lv;

        const auto t0 = clock::now();
        lv.raw = match_level(A[li], B[li], scope, params, length);
        const auto t1 = clock::now();
        lv.matches = lv.raw.matches;

        if (hook) {
            const std::vector<std::uint8_t> cand_a =
                candidate_set(A[li], length, params.min_motion_frac);
            const std::vector<std::uint8_t> cand_b =
                candidate_set(B[li], length, params.min_motion_frac);
            LevelContext ctx{static_cast<int>(li), A[li],   B[li],
                             cand_a,               cand_b,  length,
                             lv.raw.threshold.value_or(0.0)};
            lv.matches = hook(ctx, std::move(lv.matches));
        }
        const auto t2 = clock::now();
        lv.match_seconds = std::chrono::duration<double>(t1 - t0).count();
        lv.hook_seconds = std::chrono::duration<double>(t2 - t1).count();

        out.levels.push_back(std::move(lv));
        if (li + 1 < plan.levels.size())
            scope = derive_scopes(out.levels.back().matches, A[li], A[li + 1],
                                  B[li], B[li + 1]);
    }
    return out;
}

} // namespace vmatch
