#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vmatch/matcher.hpp"
#include "vmatch/refine.hpp"

namespace vmatch {

// Every runtime knob in one place.  Defaults are the reference operating
// point: T1=4, T2=T3=1/6 of patch area, 500-state segments, 1/30 candidate
// cutoff, λ=6, 1 bad segment, 64→8 quadtree with stride = patch size,
// 3 propagation rounds, 1499 states (3000 frames).
struct Config {
    Thresholds th;

    double lambda = 6.0;
    int max_bad_segments = 1;
    bool keep_one_to_many = true;

    std::vector<LevelSpec> levels = {{64, 64}, {32, 32}, {16, 16}, {8, 8}};
    int branching = 2;

    int propagation_iters = 3;
    double search_alpha = 0.5;
    double search_w0 = 0; // 0 = auto
    int search_trials = 1;

    int max_states = 1499;
    std::uint64_t seed = 0;
    bool refine = true;
};

// Flat key=value file; '#' comments and blank lines allowed; unknown keys
// are errors.  Keys absent from the file keep their defaults and are listed
// in *defaulted (for the run manifest).
Config load_config(const std::filesystem::path& file,
                   std::vector<std::string>* defaulted = nullptr);

// Parses config text (same rules as load_config).
Config parse_config(const std::string& text, std::vector<std::string>* defaulted = nullptr);

void validate_config(const Config& cfg);

nlohmann::json config_to_json(const Config& cfg);

} // namespace vmatch
