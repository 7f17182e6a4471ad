// vmatch: video feature matching from motion-state sequences.
//
//   vmatch match <video_a> <video_b> --out DIR [--config FILE] [--threads N]
//   vmatch eval --matches FILE --hom FILE --out DIR
//   vmatch synth --spec FILE --out DIR
//   vmatch overlay --frame-a IMG --frame-b IMG --matches FILE --out IMG
//
// Exit codes: 0 success, 1 bad input, 2 internal error.

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vmatch/config.hpp"
#include "vmatch/errors.hpp"
#include "vmatch/eval.hpp"
#include "vmatch/overlay.hpp"
#include "vmatch/pipeline.hpp"
#include "vmatch/rng.hpp"
#include "vmatch/synth.hpp"
#include "vmatch/video_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw vmatch::input_error("cannot write " + file.string());
    out << text;
    if (!out) throw vmatch::input_error("short write to " + file.string());
}

void write_json(const fs::path& file, const json& j) {
    write_text(file, j.dump(2) + "\n");
}

json read_json(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw vmatch::input_error("cannot open " + file.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw vmatch::input_error(file.string() + ": " + e.what());
    }
}

struct MatchesFile {
    int level = 0;
    int patch_size = 8;
    int stride = 8;
    std::vector<vmatch::ScoredMatch> matches;
};

MatchesFile load_matches_file(const fs::path& file) {
    const json j = read_json(file);
    MatchesFile mf;
    try {
        mf.level = j.at("level").get<int>();
        mf.patch_size = j.at("patch_size").get<int>();
        mf.stride = j.at("stride").get<int>();
        for (const auto& e : j.at("matches")) {
            vmatch::ScoredMatch m;
            m.a_px = {e.at("a_px")[0].get<double>(), e.at("a_px")[1].get<double>()};
            m.b_px = {e.at("b_px")[0].get<double>(), e.at("b_px")[1].get<double>()};
            m.dist = e.at("dist").get<double>();
            mf.matches.push_back(m);
        }
    } catch (const json::exception& e) {
        throw vmatch::input_error(file.string() + ": " + e.what());
    }
    return mf;
}

// Cache key covering everything the packed states depend on.
std::uint64_t states_cache_key(const fs::path& video_dir, const vmatch::FrameSource& src,
                               const vmatch::Config& cfg) {
    std::uint64_t h = 0x464c5351; // "FLSQ"
    for (char c : fs::weakly_canonical(video_dir).string())
        h = vmatch::hash2(h, static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    h = vmatch::hash3(h, static_cast<std::uint64_t>(src.width()),
                      static_cast<std::uint64_t>(src.height()));
    h = vmatch::hash2(h, static_cast<std::uint64_t>(src.frame_count()));
    h = vmatch::hash2(h, static_cast<std::uint64_t>(cfg.th.t1));
    h = vmatch::hash2(h, std::bit_cast<std::uint64_t>(cfg.th.t2_frac));
    h = vmatch::hash2(h, std::bit_cast<std::uint64_t>(cfg.th.t3_frac));
    h = vmatch::hash2(h, static_cast<std::uint64_t>(cfg.th.seg_len));
    h = vmatch::hash2(h, static_cast<std::uint64_t>(cfg.max_states));
    for (const auto& lv : cfg.levels)
        h = vmatch::hash3(h, static_cast<std::uint64_t>(lv.patch_size),
                          static_cast<std::uint64_t>(lv.stride));
    return h;
}

std::vector<vmatch::LevelSequences> sequences_for(const fs::path& video_dir,
                                                  const vmatch::FrameSource& src,
                                                  const vmatch::Config& cfg, int threads,
                                                  const std::string& cache_dir) {
    const int expected_len = std::min<long long>(
        cfg.max_states, (static_cast<long long>(src.frame_count()) - 1) / 2);

    fs::path cache_file;
    if (!cache_dir.empty()) {
        char name[64];
        std::snprintf(name, sizeof(name), "states_%016llx.bin",
                      static_cast<unsigned long long>(states_cache_key(video_dir, src, cfg)));
        cache_file = fs::path(cache_dir) / name;
        if (fs::exists(cache_file)) {
            try {
                auto seqs = vmatch::read_states_cache(cache_file);
                bool ok = seqs.size() == cfg.levels.size();
                for (std::size_t i = 0; ok && i < seqs.size(); ++i)
                    ok = seqs[i].spec == cfg.levels[i] && seqs[i].seg_len == cfg.th.seg_len &&
                         seqs[i].length == expected_len;
                if (ok) return seqs;
                std::cerr << "warning: ignoring stale states cache " << cache_file << "\n";
            } catch (const std::exception& e) {
                std::cerr << "warning: ignoring unreadable states cache " << cache_file
                          << " (" << e.what() << ")\n";
            }
        }
    }

    auto seqs = vmatch::build_sequences(src, cfg.levels, cfg.th, cfg.max_states, threads);
    if (!cache_file.empty()) {
        fs::create_directories(cache_file.parent_path());
        vmatch::write_states_cache(cache_file, seqs);
    }
    return seqs;
}

json video_info(const std::string& path, const vmatch::FrameSource& src) {
    json j;
    j["path"] = path;
    j["frames"] = src.frame_count();
    j["width"] = src.width();
    j["height"] = src.height();
    j["fps"] = src.fps();
    return j;
}

int cmd_match(const std::string& video_a, const std::string& video_b,
              const std::string& config_path, const std::string& out_dir, int threads,
              const std::string& cache_dir) {
    std::vector<std::string> defaulted;
    vmatch::Config cfg;
    if (config_path.empty())
        cfg = vmatch::parse_config("", &defaulted);
    else
        cfg = vmatch::load_config(config_path, &defaulted);

    auto src_a = vmatch::VideoSource::open(video_a);
    auto src_b = vmatch::VideoSource::open(video_b);

    const auto t0 = std::chrono::steady_clock::now();
    const auto seqs_a = sequences_for(video_a, src_a, cfg, threads, cache_dir);
    const auto seqs_b = sequences_for(video_b, src_b, cfg, threads, cache_dir);
    const double build_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    vmatch::PipelineOptions opts;
    opts.cfg = cfg;
    opts.threads = threads;
    vmatch::PipelineResult res = vmatch::run_pipeline(seqs_a, seqs_b, opts);
    res.build_seconds = build_seconds;

    fs::create_directories(out_dir);
    std::size_t total_matches = 0;
    json level_stats = json::array();
    for (const auto& lv : res.levels) {
        write_json(fs::path(out_dir) / ("matches_L" + std::to_string(lv.level) + ".json"),
                   vmatch::matches_json(lv));
        total_matches += lv.matches.size();

        json s;
        s["level"] = lv.level;
        s["patch_size"] = lv.spec.patch_size;
        s["stride"] = lv.spec.stride;
        if (lv.threshold)
            s["threshold"] = *lv.threshold;
        else
            s["threshold"] = nullptr;
        s["pair_evaluations"] = lv.pair_evaluations;
        s["matches"] = lv.matches.size();
        s["match_seconds"] = lv.match_seconds;
        s["refine_seconds"] = lv.refine_seconds;
        s["refined"] = lv.refined;
        level_stats.push_back(std::move(s));
    }

    // Overlay of the finest level over the first frames.
    {
        const auto& fine = res.levels.back();
        std::vector<vmatch::OverlayMatch> lines;
        for (const auto& m : fine.matches) {
            const auto a_px = vmatch::patch_center(fine.spec, m.a.row, m.a.col);
            const auto b_px = vmatch::patch_center(fine.spec, m.b.row, m.b.col);
            lines.push_back({a_px.x, a_px.y, b_px.x, b_px.y});
        }
        const vmatch::Frame fa = src_a.frame(0);
        const vmatch::Frame fb = src_b.frame(0);
        vmatch::save_png_rgb(fs::path(out_dir) / "overlay.png",
                             vmatch::render_overlay(fa, fb, lines));
    }

    json manifest;
    manifest["inputs"]["video_a"] = video_info(video_a, src_a);
    manifest["inputs"]["video_b"] = video_info(video_b, src_b);
    manifest["config"] = vmatch::config_to_json(cfg);
    manifest["defaults_applied"] = defaulted;
    manifest["threads"] = threads;
    manifest["states"] = res.state_count;
    manifest["build_seconds"] = res.build_seconds;
    manifest["levels"] = std::move(level_stats);
    manifest["total_matches"] = total_matches;
    write_json(fs::path(out_dir) / "manifest.json", manifest);

    if (total_matches == 0)
        std::cerr << "warning: no matches retained at any level\n";
    std::cout << "Matched " << res.state_count << " states across " << res.levels.size()
              << " levels; " << total_matches << " matches total.\n";
    return 0;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

int cmd_eval(const std::string& matches_path, const std::string& hom_path,
             const std::string& out_dir, std::vector<double> px_thresholds,
             std::vector<int> patch_thresholds) {
    const MatchesFile mf = load_matches_file(matches_path);
    const vmatch::Homography H = vmatch::load_hom(hom_path);
    const vmatch::EvalReport rep =
        vmatch::score(mf.matches, H, px_thresholds, patch_thresholds, mf.patch_size);

    fs::create_directories(out_dir);

    json j;
    j["n_matches"] = rep.n_matches;
    j["mean_px_dist"] = rep.mean_px_dist;
    j["patch_size"] = mf.patch_size;
    j["acc_at"] = json::array();
    for (const auto& [t, a] : rep.acc_at) j["acc_at"].push_back({t, a});
    j["patch_acc_at"] = json::array();
    for (const auto& [t, a] : rep.patch_acc_at) j["patch_acc_at"].push_back({t, a});
    j["ranked_surface"] = json::array();
    for (const auto& r : rep.ranked_surface)
        j["ranked_surface"].push_back(
            {{"cum_fraction", r.cum_fraction}, {"threshold", r.threshold},
             {"accuracy", r.accuracy}});
    write_json(fs::path(out_dir) / "report.json", j);

    std::string csv = "curve,threshold,fraction,accuracy\n";
    for (const auto& [t, a] : rep.acc_at)
        csv += "acc," + fmt_double(t) + ",1," + fmt_double(a) + "\n";
    for (const auto& [t, a] : rep.patch_acc_at)
        csv += "patch_acc," + std::to_string(t) + ",1," + fmt_double(a) + "\n";
    for (const auto& r : rep.ranked_surface)
        csv += "ranked," + fmt_double(r.threshold) + "," + fmt_double(r.cum_fraction) + "," +
               fmt_double(r.accuracy) + "\n";
    write_text(fs::path(out_dir) / "curves.csv", csv);

    std::printf("Matches: %zu, Dist(px): %.2f\n", rep.n_matches, rep.mean_px_dist);
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    const vmatch::PairSpec spec = vmatch::load_pair_spec(spec_path);
    vmatch::write_pair(spec, out_dir);
    std::cout << "Wrote " << spec.scene.n_frames << " frames per view under " << out_dir
              << "\n";
    return 0;
}

int cmd_overlay(const std::string& frame_a, const std::string& frame_b,
                const std::string& matches_path, const std::string& out_image,
                int max_lines) {
    const vmatch::Frame fa = vmatch::load_image(frame_a);
    const vmatch::Frame fb = vmatch::load_image(frame_b);
    const MatchesFile mf = load_matches_file(matches_path);
    std::vector<vmatch::OverlayMatch> lines;
    for (const auto& m : mf.matches)
        lines.push_back({m.a_px.x, m.a_px.y, m.b_px.x, m.b_px.y});
    vmatch::save_png_rgb(out_image, vmatch::render_overlay(fa, fb, lines, max_lines));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Training-free video feature matching from motion-state sequences"};
    app.require_subcommand(1);

    // match
    std::string m_video_a, m_video_b, m_config, m_out, m_cache;
    int m_threads = 1;
    auto* match = app.add_subcommand("match", "Match two videos and write per-level results");
    match->add_option("video_a", m_video_a, "Directory of frames for video A")->required();
    match->add_option("video_b", m_video_b, "Directory of frames for video B")->required();
    match->add_option("--config", m_config, "key=value config file (defaults used if omitted)");
    match->add_option("--out", m_out, "Output directory")->required();
    match->add_option("--threads", m_threads, "Worker threads (1 = serial)")
        ->check(CLI::PositiveNumber);
    match->add_option("--states-cache", m_cache, "Directory for cached state sequences");

    // eval
    std::string e_matches, e_hom, e_out;
    std::vector<double> e_px = {1, 2, 3, 5, 10};
    std::vector<int> e_patch = {1, 2};
    auto* eval = app.add_subcommand("eval", "Score a match file against a ground-truth homography");
    eval->add_option("--matches", e_matches, "matches_L*.json file")->required();
    eval->add_option("--hom", e_hom, "Ground-truth homography (9 reals)")->required();
    eval->add_option("--out", e_out, "Output directory")->required();
    eval->add_option("--px-thresholds", e_px, "Pixel accuracy thresholds");
    eval->add_option("--patch-thresholds", e_patch, "Patch-level accuracy thresholds");

    // synth
    std::string s_spec, s_out;
    auto* synth = app.add_subcommand("synth", "Render a synthetic video pair from a JSON spec");
    synth->add_option("--spec", s_spec, "Pair spec JSON")->required();
    synth->add_option("--out", s_out, "Output directory")->required();

    // overlay
    std::string o_fa, o_fb, o_matches, o_out;
    int o_max_lines = -1;
    auto* overlay = app.add_subcommand("overlay", "Render side-by-side frames with match lines");
    overlay->add_option("--frame-a", o_fa, "Image from video A")->required();
    overlay->add_option("--frame-b", o_fb, "Image from video B")->required();
    overlay->add_option("--matches", o_matches, "matches_L*.json file")->required();
    overlay->add_option("--out", o_out, "Output PNG path")->required();
    overlay->add_option("--max-lines", o_max_lines, "Cap on drawn lines (-1 = all)");

    try {
        app.parse(argc, argv);
        if (match->parsed())
            return cmd_match(m_video_a, m_video_b, m_config, m_out, m_threads, m_cache);
        if (eval->parsed()) return cmd_eval(e_matches, e_hom, e_out, e_px, e_patch);
        if (synth->parsed()) return cmd_synth(s_spec, s_out);
        if (overlay->parsed()) return cmd_overlay(o_fa, o_fb, o_matches, o_out, o_max_lines);
        return 2; // unreachable with require_subcommand(1)
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const vmatch::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
