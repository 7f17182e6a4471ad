#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vmatch/config.hpp"
#include "vmatch/matcher.hpp"
#include "vmatch/motion_state.hpp"
#include "vmatch/video_io.hpp"

namespace vmatch {

struct PipelineOptions {
    Config cfg;
    int threads = 1;
};

// Everything the driver needs to report about one hierarchy level.
struct PipelineLevel {
    int level = 0;
    LevelSpec spec;
    std::optional<double> threshold;
    long long pair_evaluations = 0;
    double match_seconds = 0.0;
    double refine_seconds = 0.0;
    std::vector<MatchTriplet> matches;
    bool refined = false;
};

struct PipelineResult {
    std::vector<PipelineLevel> levels;
    int state_count = 0;
    double build_seconds = 0.0;
};

// Build motion-state sequences for both videos, match level by level, and
// (optionally) refine each level's matches before they seed the next one.
PipelineResult run_pipeline(FrameSource& video_a, FrameSource& video_b,
                            const PipelineOptions& opts);

// Same, but starting from prebuilt sequences (useful for tests and cached
// state files).
PipelineResult run_pipeline(const std::vector<LevelSequences>& a,
                            const std::vector<LevelSequences>& b,
                            const PipelineOptions& opts);

// Serialized form of one level's matches, written to matches_L<level>.json.
nlohmann::json matches_json(const PipelineLevel& lv);

} // namespace vmatch
