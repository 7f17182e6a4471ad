#include "vmatch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "vmatch/errors.hpp"
#include "vmatch/rng.hpp"

namespace vmatch {

using nlohmann::json;

Vec2 object_position(const ObjectSpec& obj, int t, int n_frames) {
    const int tc = std::clamp(t, 0, n_frames - 1);
    if (obj.waypoints.empty())
        return {obj.x0 + obj.vx * tc, obj.y0 + obj.vy * tc};

    const auto& wp = obj.waypoints;
    if (tc <= wp.front().frame) return {wp.front().x, wp.front().y};
    if (tc >= wp.back().frame) return {wp.back().x, wp.back().y};
    for (std::size_t i = 1; i < wp.size(); ++i) {
        if (tc > wp[i].frame) continue;
        const auto& p = wp[i - 1];
        const auto& q = wp[i];
        const double u = static_cast<double>(tc - p.frame) /
                         static_cast<double>(q.frame - p.frame);
        return {p.x + u * (q.x - p.x), p.y + u * (q.y - p.y)};
    }
    return {wp.back().x, wp.back().y}; // unreachable for sorted waypoints
}

namespace {

constexpr std::uint64_t kTextureTag = 0x74657874; // "text"
constexpr std::uint64_t kNoiseTag = 0x6e6f6973;   // "nois"

// Texture value of an object pixel, anchored to object coordinates so it
// translates with the object.
int texture_offset(std::uint64_t scene_seed, std::size_t obj_index,
                   int dx, int dy, int amp) {
    if (amp == 0) return 0;
    const std::uint64_t h =
        hash4(scene_seed ^ kTextureTag, obj_index,
              static_cast<std::uint64_t>(static_cast<std::uint32_t>(dx)),
              static_cast<std::uint64_t>(static_cast<std::uint32_t>(dy)));
    // Uniform integer in [-amp, amp].
    return static_cast<int>(h % (2 * static_cast<std::uint64_t>(amp) + 1)) - amp;
}

std::uint8_t clamp_u8(int v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

void validate_scene(const SceneSpec& spec) {
    if (spec.width < 1 || spec.height < 1 || spec.n_frames < 1)
        throw input_error("scene dimensions and frame count must be positive");
    if (spec.noise_sigma < 0) throw input_error("noise_sigma must be ≥ 0");
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        const auto& obj = spec.objects[i];
        if (obj.size < 1) throw input_error("object size must be ≥ 1");
        for (std::size_t k = 1; k < obj.waypoints.size(); ++k)
            if (obj.waypoints[k].frame <= obj.waypoints[k - 1].frame)
                throw input_error("waypoints must have strictly increasing frames");
        bool visible = false;
        for (int t = 0; t < spec.n_frames && !visible; ++t) {
            const Vec2 p = object_position(obj, t, spec.n_frames);
            const double rx = std::round(p.x), ry = std::round(p.y);
            visible = rx + obj.size > 0 && ry + obj.size > 0 &&
                      rx < spec.width && ry < spec.height;
        }
        if (!visible)
            throw input_error("object " + std::to_string(i) +
                              " never enters the frame over the whole trajectory");
    }
}

} // namespace

Frame render_clean_frame(const SceneSpec& spec, int index) {
    Frame f(spec.width, spec.height, clamp_u8(spec.background));
    for (std::size_t oi = 0; oi < spec.objects.size(); ++oi) {
        const auto& obj = spec.objects[oi];
        const Vec2 pos = object_position(obj, index, spec.n_frames);
        const int rx = static_cast<int>(std::lround(pos.x));
        const int ry = static_cast<int>(std::lround(pos.y));
        const int n = obj.size;
        const double radius = n / 2.0;
        const int x_lo = std::max(rx, 0), x_hi = std::min(rx + n, spec.width);
        const int y_lo = std::max(ry, 0), y_hi = std::min(ry + n, spec.height);
        for (int y = y_lo; y < y_hi; ++y) {
            for (int x = x_lo; x < x_hi; ++x) {
                const int dx = x - rx, dy = y - ry;
                if (obj.shape == Shape::disk) {
                    const double cx = dx + 0.5 - radius, cy = dy + 0.5 - radius;
                    if (cx * cx + cy * cy > radius * radius) continue;
                }
                f.at(x, y) = clamp_u8(obj.intensity +
                                      texture_offset(spec.seed, oi, dx, dy,
                                                     obj.texture_amp));
            }
        }
    }
    return f;
}

namespace {

// Gaussian noise over a whole frame.  Each hash feeds a Box-Muller pair, so
// adjacent even/odd pixels share one draw (cheap and still i.i.d. enough
// for sensor-noise emulation); everything is keyed on (seed, view, frame).
void add_noise(Frame& f, double sigma, std::uint64_t seed, std::uint64_t view_tag,
               int frame_index) {
    if (sigma <= 0) return;
    const std::size_t n = f.data.size();
    const std::uint64_t base = hash3(seed ^ kNoiseTag, view_tag,
                                     static_cast<std::uint64_t>(frame_index));
    constexpr double two_pi = 6.283185307179586476925286766559;
    for (std::size_t q = 0; q * 2 < n; ++q) {
        const std::uint64_t h = hash2(base, q);
        double u1 = unit_double(h);
        if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
        const double u2 = unit_double(mix64(h ^ 0x9e3779b97f4a7c15ull));
        const double r = std::sqrt(-2.0 * std::log(u1)) * sigma;
        const double ang = two_pi * u2;
        const std::size_t i0 = 2 * q;
        f.data[i0] = clamp_u8(static_cast<int>(
            std::lround(f.data[i0] + r * std::cos(ang))));
        if (i0 + 1 < n)
            f.data[i0 + 1] = clamp_u8(static_cast<int>(
                std::lround(f.data[i0 + 1] + r * std::sin(ang))));
    }
}

constexpr std::uint64_t kViewA = 1;
constexpr std::uint64_t kViewB = 2;

} // namespace

Frame render_frame(const SceneSpec& spec, int index, std::uint64_t view_tag) {
    Frame f = render_clean_frame(spec, index);
    add_noise(f, spec.noise_sigma, spec.seed, view_tag, index);
    return f;
}

std::vector<Frame> render_scene(const SceneSpec& spec) {
    validate_scene(spec);
    std::vector<Frame> out;
    out.reserve(spec.n_frames);
    for (int t = 0; t < spec.n_frames; ++t)
        out.push_back(render_frame(spec, t, kViewA));
    return out;
}

std::uint8_t apply_modality(std::uint8_t v, const Modality& m) {
    switch (m.kind) {
        case ModalityKind::identity:
            return v;
        case ModalityKind::invert:
            return static_cast<std::uint8_t>(255 - v);
        case ModalityKind::gamma: {
            const double g = m.param;
            if (g <= 0) throw input_error("gamma parameter must be positive");
            return clamp_u8(static_cast<int>(
                std::lround(255.0 * std::pow(v / 255.0, g))));
        }
        case ModalityKind::threshold:
            return v > m.param ? 255 : 0;
    }
    throw internal_error("unhandled modality");
}

Frame warp_frame(const Frame& src, const Homography& H, std::uint8_t background) {
    const Homography inv = H.inverse();
    Frame out(src.width, src.height, background);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const Vec2 p = apply_homography(inv, {static_cast<double>(x),
                                                  static_cast<double>(y)});
            const int x0 = static_cast<int>(std::floor(p.x));
            const int y0 = static_cast<int>(std::floor(p.y));
            if (x0 < -1 || y0 < -1 || x0 >= src.width || y0 >= src.height) continue;
            const double fx = p.x - x0, fy = p.y - y0;
            auto sample = [&](int sx, int sy) -> double {
                if (sx < 0 || sy < 0 || sx >= src.width || sy >= src.height)
                    return background;
                return src.at(sx, sy);
            };
            const double v = (1 - fx) * (1 - fy) * sample(x0, y0) +
                             fx * (1 - fy) * sample(x0 + 1, y0) +
                             (1 - fx) * fy * sample(x0, y0 + 1) +
                             fx * fy * sample(x0 + 1, y0 + 1);
            out.at(x, y) = clamp_u8(static_cast<int>(std::lround(v)));
        }
    }
    return out;
}

PairView::PairView(PairSpec spec, Side side)
    : spec_(std::move(spec)), side_(side) {
    spec_.H.inverse(); // reject non-invertible warps up front
    validate_scene(spec_.scene);
    if (2 * std::abs(spec_.temporal_offset_states) >= spec_.scene.n_frames)
        throw input_error("temporal offset exceeds the video length");
}

Frame PairView::frame(int index) const {
    if (index < 0 || index >= frame_count())
        throw input_error("pair frame index out of range");
    if (side_ == Side::a) {
        Frame f = render_clean_frame(spec_.scene, index);
        add_noise(f, spec_.scene.noise_sigma, spec_.scene.seed, kViewA, index);
        return f;
    }
    const int src_index = index - 2 * spec_.temporal_offset_states; // clamped in render
    Frame f = render_clean_frame(spec_.scene, src_index);
    const bool warp_needed = !(spec_.H.h == Homography::identity().h);
    if (warp_needed)
        f = warp_frame(f, spec_.H, clamp_u8(spec_.scene.background));
    for (auto& v : f.data) v = apply_modality(v, spec_.modality);
    add_noise(f, spec_.scene.noise_sigma, spec_.scene.seed, kViewB, index);
    return f;
}

RenderedPair make_pair(const PairSpec& spec) {
    const PairView va(spec, PairView::Side::a);
    const PairView vb(spec, PairView::Side::b);
    RenderedPair out;
    out.H = spec.H.normalized();
    out.a.reserve(spec.scene.n_frames);
    out.b.reserve(spec.scene.n_frames);
    for (int t = 0; t < spec.scene.n_frames; ++t) {
        out.a.push_back(va.frame(t));
        out.b.push_back(vb.frame(t));
    }
    return out;
}

// ------------------------------------------------------------- JSON ----

namespace {

std::string shape_name(Shape s) { return s == Shape::disk ? "disk" : "square"; }
Shape shape_from(const std::string& s) {
    if (s == "disk") return Shape::disk;
    if (s == "square") return Shape::square;
    throw input_error("unknown shape: " + s);
}

std::string modality_name(ModalityKind k) {
    switch (k) {
        case ModalityKind::identity: return "identity";
        case ModalityKind::invert: return "invert";
        case ModalityKind::gamma: return "gamma";
        case ModalityKind::threshold: return "threshold";
    }
    throw internal_error("unhandled modality");
}
ModalityKind modality_from(const std::string& s) {
    if (s == "identity") return ModalityKind::identity;
    if (s == "invert") return ModalityKind::invert;
    if (s == "gamma") return ModalityKind::gamma;
    if (s == "threshold") return ModalityKind::threshold;
    throw input_error("unknown modality: " + s);
}

// Catches typos like "H" for "homography": a silently ignored key in a
// ground-truth spec corrupts every downstream measurement.
void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw input_error(std::string("unknown key '") + item.key() + "' in " + where);
    }
}

} // namespace

std::string pair_spec_to_json(const PairSpec& spec) {
    json j;
    j["scene"]["width"] = spec.scene.width;
    j["scene"]["height"] = spec.scene.height;
    j["scene"]["n_frames"] = spec.scene.n_frames;
    j["scene"]["background"] = spec.scene.background;
    j["scene"]["noise_sigma"] = spec.scene.noise_sigma;
    j["scene"]["seed"] = spec.scene.seed;
    json objs = json::array();
    for (const auto& o : spec.scene.objects) {
        json jo;
        jo["shape"] = shape_name(o.shape);
        jo["size"] = o.size;
        jo["intensity"] = o.intensity;
        jo["texture_amp"] = o.texture_amp;
        jo["x0"] = o.x0;
        jo["y0"] = o.y0;
        jo["vx"] = o.vx;
        jo["vy"] = o.vy;
        json wps = json::array();
        for (const auto& w : o.waypoints)
            wps.push_back({{"frame", w.frame}, {"x", w.x}, {"y", w.y}});
        jo["waypoints"] = wps;
        objs.push_back(jo);
    }
    j["scene"]["objects"] = objs;
    j["homography"] = spec.H.h;
    j["modality"]["kind"] = modality_name(spec.modality.kind);
    j["modality"]["param"] = spec.modality.param;
    j["temporal_offset_states"] = spec.temporal_offset_states;
    return j.dump(2) + "\n";
}

PairSpec pair_spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw input_error(std::string("bad pair spec JSON: ") + e.what());
    }
    try {
        check_keys(j, {"scene", "homography", "modality", "temporal_offset_states"},
                   "pair spec");
        PairSpec spec;
        const json& s = j.at("scene");
        check_keys(s,
                   {"width", "height", "n_frames", "background", "noise_sigma", "seed",
                    "objects"},
                   "scene");
        spec.scene.width = s.at("width").get<int>();
        spec.scene.height = s.at("height").get<int>();
        spec.scene.n_frames = s.at("n_frames").get<int>();
        spec.scene.background = s.value("background", 0);
        spec.scene.noise_sigma = s.value("noise_sigma", 0.0);
        spec.scene.seed = s.value("seed", std::uint64_t{1});
        for (const json& jo : s.value("objects", json::array())) {
            check_keys(jo,
                       {"shape", "size", "intensity", "texture_amp", "x0", "y0", "vx",
                        "vy", "waypoints"},
                       "object");
            ObjectSpec o;
            o.shape = shape_from(jo.value("shape", "square"));
            o.size = jo.at("size").get<int>();
            o.intensity = jo.value("intensity", 200);
            o.texture_amp = jo.value("texture_amp", 0);
            o.x0 = jo.value("x0", 0.0);
            o.y0 = jo.value("y0", 0.0);
            o.vx = jo.value("vx", 0.0);
            o.vy = jo.value("vy", 0.0);
            for (const json& jw : jo.value("waypoints", json::array())) {
                check_keys(jw, {"frame", "x", "y"}, "waypoint");
                o.waypoints.push_back({jw.at("frame").get<int>(),
                                       jw.at("x").get<double>(),
                                       jw.at("y").get<double>()});
            }
            spec.scene.objects.push_back(std::move(o));
        }
        if (j.contains("homography")) {
            const auto arr = j.at("homography").get<std::vector<double>>();
            if (arr.size() != 9)
                throw input_error("homography must have 9 entries");
            std::copy(arr.begin(), arr.end(), spec.H.h.begin());
        }
        if (j.contains("modality")) {
            check_keys(j.at("modality"), {"kind", "param"}, "modality");
            spec.modality.kind =
                modality_from(j.at("modality").value("kind", "identity"));
            spec.modality.param = j.at("modality").value("param", 1.0);
        }
        spec.temporal_offset_states = j.value("temporal_offset_states", 0);
        return spec;
    } catch (const json::exception& e) {
        throw input_error(std::string("bad pair spec JSON: ") + e.what());
    }
}

PairSpec load_pair_spec(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw input_error("cannot open " + file.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return pair_spec_from_json(text);
}

void write_pair(const PairSpec& spec, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    const PairView va(spec, PairView::Side::a);
    const PairView vb(spec, PairView::Side::b);
    fs::create_directories(out_dir / "A");
    fs::create_directories(out_dir / "B");

    char name[16];
    for (int t = 0; t < spec.scene.n_frames; ++t) {
        std::snprintf(name, sizeof name, "%06d.pgm", t);
        save_pgm(out_dir / "A" / name, va.frame(t));
        save_pgm(out_dir / "B" / name, vb.frame(t));
    }
    for (const char* side : {"A", "B"}) {
        std::ofstream meta(out_dir / side / "video.meta");
        meta << "fps=30\nframes=" << spec.scene.n_frames << "\n";
    }
    save_hom(out_dir / "gt.hom", spec.H.normalized());
    std::ofstream pj(out_dir / "pair.json");
    pj << pair_spec_to_json(spec);
}

} // namespace vmatch
