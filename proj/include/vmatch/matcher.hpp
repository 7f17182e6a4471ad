#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "vmatch/motion_state.hpp"

namespace vmatch {

struct GridPos {
    int row = 0;
    int col = 0;
    bool operator==(const GridPos&) const = default;
};

// One retained correspondence at a single hierarchy level.
struct MatchTriplet {
    GridPos a;
    GridPos b;
    double dist = 1.0;
};

struct MatchParams {
    double lambda = 6.0;        // threshold = 1/lambda quantile of first-segment distances
    int max_bad_segments = 1;   // early abort after this many over-threshold segments
    double min_motion_frac = 1.0 / 30.0;
    bool keep_one_to_many = true; // false: best B per A only
    int threads = 1;
};

struct HierarchyPlan {
    std::vector<LevelSpec> levels; // coarse → fine
    int branching = 2;             // children per side when subdividing
};

// Integer pieces of the support distance: value = 1 − 2·overlap/(pop1+pop2),
// or 1.0 when both popcounts are zero.  Keeping the integers around lets
// callers compare distances exactly (no float accumulation).
struct DistanceTerms {
    std::uint64_t overlap = 0;
    std::uint64_t pop1 = 0;
    std::uint64_t pop2 = 0;

    double value() const {
        const std::uint64_t d = pop1 + pop2;
        return d == 0 ? 1.0 : 1.0 - 2.0 * static_cast<double>(overlap) / static_cast<double>(d);
    }
    DistanceTerms& operator+=(const DistanceTerms& o) {
        overlap += o.overlap;
        pop1 += o.pop1;
        pop2 += o.pop2;
        return *this;
    }
};

// Terms over states [begin, end) of two sequences.
DistanceTerms distance_terms_range(const StateSequence& s1, const StateSequence& s2,
                                   int begin, int end);

inline DistanceTerms sequence_distance_terms(const StateSequence& s1,
                                             const StateSequence& s2, int length) {
    return distance_terms_range(s1, s2, 0, length);
}

// Whole-sequence distance over the first `length` states.
inline double sequence_distance(const StateSequence& s1, const StateSequence& s2,
                                int length) {
    return sequence_distance_terms(s1, s2, length).value();
}

struct SegmentedOutcome {
    double dist = 1.0;
    bool aborted = false;
    DistanceTerms terms; // accumulated up to the abort point (or the whole sequence)
};

// Walks the sequence segment by segment (seg_len states each).  A segment
// where both sides are silent carries no evidence and is skipped; otherwise
// its distance is compared against per_seg_threshold, and once max_bad
// segments exceed it the walk aborts.  Without an abort the returned dist
// equals sequence_distance exactly (same integer accumulation).
SegmentedOutcome segmented_distance(const StateSequence& s1, const StateSequence& s2,
                                    int length, int seg_len,
                                    double per_seg_threshold, int max_bad);

// Patches whose motion support is ≥ length × min_motion_frac.  Returned as a
// row-major 0/1 bitmap over the level's grid.
std::vector<std::uint8_t> candidate_set(const LevelSequences& seqs, int length,
                                        double min_motion_frac);

// Nearest-rank 1/lambda quantile: the ⌈m/λ⌉-th smallest of m distances.
// Throws input_error when the multiset is empty.
double select_threshold(std::vector<double> first_segment_distances, double lambda);

// Inclusive rectangle of B-grid indices.
struct GridRect {
    int r0 = 0, c0 = 0, r1 = -1, c1 = -1;
    bool empty() const { return r1 < r0 || c1 < c0; }
};

// Search scope per A-patch: either the whole B grid (coarsest level) or a
// list of rectangles inherited from matched parents.
struct ScopeMap {
    bool global = true;
    std::vector<std::vector<GridRect>> per_patch; // indexed by A row-major patch index
};

struct LevelMatchResult {
    int level = 0;
    std::optional<double> threshold;    // selected τ; empty when nothing was comparable
    std::uint64_t pair_evaluations = 0; // (A,B) pairs whose distance was evaluated
    std::vector<MatchTriplet> matches;  // sorted by (dist, a.row, a.col, b.row, b.col)
};

// Matches one level: every A-candidate against every B-candidate in its
// scope.  First-segment distances select τ (globally for the level); pairs
// are then completed with early abort and retained when full dist ≤ τ.
LevelMatchResult match_level(const LevelSequences& A, const LevelSequences& B,
                             const ScopeMap& scope, const MatchParams& params,
                             int length);

// Everything a per-level post-processing hook might need.
struct LevelContext {
    int level = 0;
    const LevelSequences& A;
    const LevelSequences& B;
    const std::vector<std::uint8_t>& cand_a;
    const std::vector<std::uint8_t>& cand_b;
    int length = 0;
    double threshold = 0.0; // τ of this level (0 when none selected)
};

// Hook invoked after each level's matching; its return value replaces the
// level's matches and seeds the next level's scopes.
using LevelHook =
    std::function<std::vector<MatchTriplet>(const LevelContext&, std::vector<MatchTriplet>)>;

struct HierarchyLevelOutput {
    LevelMatchResult raw;               // matcher output before the hook
    std::vector<MatchTriplet> matches;  // after the hook (== raw.matches without one)
    double match_seconds = 0.0;
    double hook_seconds = 0.0;
};

struct HierarchyResult {
    int length = 0; // truncated common sequence length
    std::vector<HierarchyLevelOutput> levels;
};

// Scope inheritance: B-children fully inside a matched parent's B rectangle
// (dilated by one child stride per side when the child grid overlaps,
// i.e. stride < patch_size) become the search scope of the A-children fully
// inside the parent's A rectangle.
ScopeMap derive_scopes(const std::vector<MatchTriplet>& parent_matches,
                       const LevelSequences& parent_a, const LevelSequences& child_a,
                       const LevelSequences& parent_b, const LevelSequences& child_b);

// Coarse-to-fine driver.  Level 0 searches the whole B grid; each finer
// level searches only scopes derived from the previous level's (hooked)
// matches.  Sequences of unequal length are truncated to the shorter.
HierarchyResult run_hierarchy(const std::vector<LevelSequences>& A,
                              const std::vector<LevelSequences>& B,
                              const HierarchyPlan& plan, const MatchParams& params,
                              const LevelHook& hook = {});

} // namespace vmatch
