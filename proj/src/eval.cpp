#include "vmatch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "vmatch/errors.hpp"

namespace vmatch {

double Homography::det() const {
    return h[0] * (h[4] * h[8] - h[5] * h[7]) -
           h[1] * (h[3] * h[8] - h[5] * h[6]) +
           h[2] * (h[3] * h[7] - h[4] * h[6]);
}

Homography Homography::normalized() const {
    if (std::abs(h[8]) < 1e-12)
        throw input_error("homography cannot be normalized: h[2][2] ≈ 0");
    Homography out;
    for (int i = 0; i < 9; ++i) out.h[i] = h[i] / h[8];
    return out;
}

Homography Homography::inverse() const {
    const double d = det();
    if (std::abs(d) < 1e-9) throw input_error("homography is not invertible");
    Homography inv;
    inv.h[0] = (h[4] * h[8] - h[5] * h[7]) / d;
    inv.h[1] = (h[2] * h[7] - h[1] * h[8]) / d;
    inv.h[2] = (h[1] * h[5] - h[2] * h[4]) / d;
    inv.h[3] = (h[5] * h[6] - h[3] * h[8]) / d;
    inv.h[4] = (h[0] * h[8] - h[2] * h[6]) / d;
    inv.h[5] = (h[2] * h[3] - h[0] * h[5]) / d;
    inv.h[6] = (h[3] * h[7] - h[4] * h[6]) / d;
    inv.h[7] = (h[1] * h[6] - h[0] * h[7]) / d;
    inv.h[8] = (h[0] * h[4] - h[1] * h[3]) / d;
    return inv.normalized();
}

Homography load_hom(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw input_error("cannot open " + file.string());
    Homography H;
    for (int i = 0; i < 9; ++i)
        if (!(in >> H.h[i]))
            throw input_error("expected 9 reals in " + file.string());
    std::string extra;
    if (in >> extra) throw input_error("trailing content in " + file.string());
    if (std::abs(H.det()) < 1e-9)
        throw input_error("homography in " + file.string() + " is singular");
    return H.normalized();
}

void save_hom(const std::filesystem::path& file, const Homography& H) {
    std::ofstream out(file);
    if (!out) throw input_error("cannot write " + file.string());
    out.precision(17);
    for (int r = 0; r < 3; ++r)
        out << H.h[3 * r] << " " << H.h[3 * r + 1] << " " << H.h[3 * r + 2] << "\n";
}

Vec2 apply_homography(const Homography& H, Vec2 p) {
    const double den = H.h[6] * p.x + H.h[7] * p.y + H.h[8];
    if (std::abs(den) < 1e-9)
        throw input_error("point maps to infinity under homography");
    return {(H.h[0] * p.x + H.h[1] * p.y + H.h[2]) / den,
            (H.h[3] * p.x + H.h[4] * p.y + H.h[5]) / den};
}

double pixel_distance(Vec2 a_px, Vec2 b_px, const Homography& H) {
    const Vec2 m = apply_homography(H, a_px);
    return std::hypot(m.x - b_px.x, m.y - b_px.y);
}

int patch_distance(Vec2 c1, Vec2 c2, int patch_size) {
    if (patch_size < 1) throw input_error("patch_size must be ≥ 1");
    const double m = std::max(std::abs(c1.x - c2.x), std::abs(c1.y - c2.y));
    return static_cast<int>(std::ceil(2.0 * m / patch_size));
}

EvalReport score(const std::vector<ScoredMatch>& matches, const Homography& H,
                 const std::vector<double>& px_thresholds,
                 const std::vector<int>& patch_thresholds, int patch_size) {
    EvalReport rep;
    rep.n_matches = matches.size();
    if (matches.empty()) {
        // Keep the report schema stable: thresholds appear with zero accuracy.
        for (const double t : px_thresholds) rep.acc_at.emplace_back(t, 0.0);
        for (const int t : patch_thresholds) rep.patch_acc_at.emplace_back(t, 0.0);
        return rep;
    }

    const std::size_t n = matches.size();
    std::vector<double> px(n);
    std::vector<int> pd(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 gt = apply_homography(H, matches[i].a_px);
        px[i] = std::hypot(gt.x - matches[i].b_px.x, gt.y - matches[i].b_px.y);
        pd[i] = patch_distance(matches[i].b_px, gt, patch_size);
    }
    rep.mean_px_dist = std::accumulate(px.begin(), px.end(), 0.0) / static_cast<double>(n);

    for (const double t : px_thresholds) {
        std::size_t ok = 0;
        for (const double d : px)
            if (d <= t) ++ok;
        rep.acc_at.emplace_back(t, static_cast<double>(ok) / static_cast<double>(n));
    }
    for (const int t : patch_thresholds) {
        std::size_t ok = 0;
        for (const int d : pd)
            if (d <= t) ++ok;
        rep.patch_acc_at.emplace_back(t, static_cast<double>(ok) / static_cast<double>(n));
    }

    // Confidence ranking: ascending sequence distance, stable so equal
    // confidences keep their input order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return matches[i].dist < matches[j].dist;
    });
    for (int step = 1; step <= 10; ++step) {
        const std::size_t take = (n * static_cast<std::size_t>(step) + 9) / 10; // ⌈n·step/10⌉
        for (const double t : px_thresholds) {
            std::size_t ok = 0;
            for (std::size_t k = 0; k < take; ++k)
                if (px[order[k]] <= t) ++ok;
            rep.ranked_surface.push_back(
                {static_cast<double>(step) / 10.0, t,
                 static_cast<double>(ok) / static_cast<double>(take)});
        }
    }
    return rep;
}

} // namespace vmatch
