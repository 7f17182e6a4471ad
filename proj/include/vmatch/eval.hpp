#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "vmatch/motion_state.hpp"

namespace vmatch {

struct Vec2 {
    double x = 0;
    double y = 0;
};

// 3×3 projective transform, row-major, normalized so h[8] == 1.
struct Homography {
    std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Homography identity() { return {}; }
    static Homography translation(double tx, double ty) {
        Homography H;
        H.h = {1, 0, tx, 0, 1, ty, 0, 0, 1};
        return H;
    }
    double det() const;
    Homography normalized() const;
    Homography inverse() const;
};

// Plain-text format: 9 whitespace-separated reals, row-major.
Homography load_hom(const std::filesystem::path& file);
void save_hom(const std::filesystem::path& file, const Homography& H);

Vec2 apply_homography(const Homography& H, Vec2 p);

// Continuous center of the patch at grid (row, col): half-pixel convention
// keeps exactly aligned grids at distance zero.
inline Vec2 patch_center(const LevelSpec& spec, int row, int col) {
    return {col * static_cast<double>(spec.stride) + spec.patch_size / 2.0 - 0.5,
            row * static_cast<double>(spec.stride) + spec.patch_size / 2.0 - 0.5};
}

// Euclidean gap between where H sends the A-center and the matched B-center.
double pixel_distance(Vec2 a_px, Vec2 b_px, const Homography& H);

// Patch-level distance: ⌈2·max(|Δx|,|Δy|)/P⌉.  0 means the centers
// coincide; 1 means within the same patch-sized square.
int patch_distance(Vec2 c1, Vec2 c2, int patch_size);

// A match reduced to what scoring needs.
struct ScoredMatch {
    Vec2 a_px;
    Vec2 b_px;
    double dist = 0; // sequence distance (confidence; lower is better)
};

struct RankedRow {
    double cum_fraction = 0; // prefix of the confidence ranking
    double threshold = 0;    // pixel threshold
    double accuracy = 0;
};

struct EvalReport {
    std::size_t n_matches = 0;
    double mean_px_dist = 0;
    std::vector<std::pair<double, double>> acc_at;    // (px threshold, fraction ≤)
    std::vector<std::pair<int, double>> patch_acc_at; // (patch threshold, fraction ≤)
    std::vector<RankedRow> ranked_surface;            // 10% prefix steps × px thresholds
};

// Scores matches against ground truth H.  Empty input yields n_matches = 0
// with every requested threshold reported at zero accuracy.
EvalReport score(const std::vector<ScoredMatch>& matches, const Homography& H,
                 const std::vector<double>& px_thresholds,
                 const std::vector<int>& patch_thresholds, int patch_size);

} // namespace vmatch
