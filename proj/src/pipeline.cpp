#include "vmatch/pipeline.hpp"

#include <chrono>

#include "vmatch/eval.hpp"
#include "vmatch/refine.hpp"
#include "vmatch/rng.hpp"

namespace vmatch {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

PipelineResult run_pipeline(const std::vector<LevelSequences>& a,
                            const std::vector<LevelSequences>& b,
                            const PipelineOptions& opts) {
    const Config& cfg = opts.cfg;

    HierarchyPlan plan;
    plan.levels = cfg.levels;
    plan.branching = cfg.branching;

    MatchParams mp;
    mp.lambda = cfg.lambda;
    mp.max_bad_segments = cfg.max_bad_segments;
    mp.min_motion_frac = cfg.th.min_motion_frac;
    mp.keep_one_to_many = cfg.keep_one_to_many;
    mp.threads = opts.threads;

    LevelHook hook;
    if (cfg.refine) {
        hook = [&](const LevelContext& ctx, std::vector<MatchTriplet> matches) {
            RefineParams rp;
            rp.iterations = cfg.propagation_iters;
            rp.alpha = cfg.search_alpha;
            rp.w0 = cfg.search_w0;
            rp.trials_per_level = cfg.search_trials;
            rp.seed = hash2(cfg.seed, static_cast<std::uint64_t>(ctx.level));
            rp.threads = opts.threads;
            return refine_level(matches, ctx.A, ctx.B, ctx.cand_a, ctx.cand_b,
                                ctx.length, ctx.threshold, rp);
        };
    }

    const HierarchyResult hr = run_hierarchy(a, b, plan, mp, hook);

    PipelineResult out;
    out.state_count = hr.length;
    for (std::size_t i = 0; i < hr.levels.size(); ++i) {
        const auto& lv = hr.levels[i];
        PipelineLevel pl;
        pl.level = lv.raw.level;
        pl.spec = cfg.levels[i];
        pl.threshold = lv.raw.threshold;
        pl.pair_evaluations = static_cast<long long>(lv.raw.pair_evaluations);
        pl.match_seconds = lv.match_seconds;
        pl.refine_seconds = cfg.refine ? lv.hook_seconds : 0.0;
        pl.matches = lv.matches;
        pl.refined = cfg.refine;
        out.levels.push_back(std::move(pl));
    }
    return out;
}

PipelineResult run_pipeline(FrameSource& video_a, FrameSource& video_b,
                            const PipelineOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto a = build_sequences(video_a, opts.cfg.levels, opts.cfg.th,
                                   opts.cfg.max_states, opts.threads);
    const auto b = build_sequences(video_b, opts.cfg.levels, opts.cfg.th,
                                   opts.cfg.max_states, opts.threads);
    const double build_s = seconds_since(t0);

    PipelineResult out = run_pipeline(a, b, opts);
    out.build_seconds = build_s;
    return out;
}

nlohmann::json matches_json(const PipelineLevel& lv) {
    nlohmann::json j;
    j["level"] = lv.level;
    j["patch_size"] = lv.spec.patch_size;
    j["stride"] = lv.spec.stride;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& m : lv.matches) {
        const Vec2 a_px = patch_center(lv.spec, m.a.row, m.a.col);
        const Vec2 b_px = patch_center(lv.spec, m.b.row, m.b.col);
        nlohmann::json e;
        e["a"] = {m.a.row, m.a.col};
        e["b"] = {m.b.row, m.b.col};
        e["a_px"] = {a_px.x, a_px.y};
        e["b_px"] = {b_px.x, b_px.y};
        e["dist"] = m.dist;
        e["refined"] = lv.refined;
        arr.push_back(std::move(e));
    }
    j["matches"] = std::move(arr);
    return j;
}

} // namespace vmatch
