#pragma once

#include <cstdint>
#include <vector>

#include "vmatch/matcher.hpp"

namespace vmatch {

// Best-known correspondence per A-patch; invalid slots are unmatched.
struct MatchEntry {
    GridPos b;
    double dist = 1.0;
    bool valid = false;
};

struct MatchMap {
    int rows = 0;
    int cols = 0;
    std::vector<MatchEntry> entries; // rows*cols over the A grid

    MatchEntry& at(int r, int c) { return entries[static_cast<std::size_t>(r) * cols + c]; }
    const MatchEntry& at(int r, int c) const {
        return entries[static_cast<std::size_t>(r) * cols + c];
    }
    std::size_t valid_count() const;
};

struct RefineParams {
    int iterations = 3;      // propagation rounds
    double alpha = 0.5;      // search radius decay
    double w0 = 0;           // initial radius in patches; 0 = max B-grid dimension
    int trials_per_level = 1; // samples per radius step
    std::uint64_t seed = 0;
    int threads = 1;
};

// Best entry per A-patch from a (possibly one-to-many) triplet list.
MatchMap seed_match_map(const std::vector<MatchTriplet>& triplets, int rows, int cols);

// For every matched entry, samples B-patches at random offsets around the
// current best with radii w0, w0·α, w0·α², … (while ≥ 1), keeping a sample
// only on strict full-distance improvement.  Counter-based RNG: the result
// depends on (seed, patch, step, trial) alone, never on thread schedule.
MatchMap random_search(const MatchMap& mm, const LevelSequences& A,
                       const LevelSequences& B, const std::vector<std::uint8_t>& cand_b,
                       int length, const RefineParams& params);

// One Jacobi round: every candidate A-patch looks at its 4-neighbors'
// round-start matches, shifts each by the inverse grid offset, and adopts
// the best strictly-improving shifted B-patch that stays within
// accept_threshold.  Unmatched patches can gain entries this way.
MatchMap propagate(const MatchMap& mm, const LevelSequences& A,
                   const LevelSequences& B, const std::vector<std::uint8_t>& cand_a,
                   const std::vector<std::uint8_t>& cand_b, int length,
                   double accept_threshold, const RefineParams& params);

// random_search once, then `iterations` propagation rounds; emits the final
// map as triplets sorted by (dist, a, b).
std::vector<MatchTriplet> refine_level(const std::vector<MatchTriplet>& triplets,
                                       const LevelSequences& A, const LevelSequences& B,
                                       const std::vector<std::uint8_t>& cand_a,
                                       const std::vector<std::uint8_t>& cand_b,
                                       int length, double accept_threshold,
                                       const RefineParams& params);

} // namespace vmatch
