#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "vmatch/eval.hpp"
#include "vmatch/video_io.hpp"

namespace vmatch {

enum class Shape { square, disk };

struct Waypoint {
    int frame = 0;
    double x = 0; // object top-left at this frame
    double y = 0;
};

// One moving object.  Position follows the waypoint polyline when given
// (clamped at both ends), else start + velocity·t.  texture_amp > 0 stamps a
// per-object random texture that travels with the object, so its interior
// pixels change whenever it moves — uniform fills only change at their rims.
struct ObjectSpec {
    Shape shape = Shape::square;
    int size = 32;       // square side / disk diameter, pixels
    int intensity = 200; // base gray level
    int texture_amp = 0; // ± texture amplitude, gray levels
    double x0 = 0, y0 = 0;
    double vx = 0, vy = 0; // pixels per frame
    std::vector<Waypoint> waypoints;
};

struct SceneSpec {
    int width = 320;
    int height = 240;
    int n_frames = 100;
    int background = 0;
    double noise_sigma = 0; // Gaussian, applied last, clamped to [0,255]
    std::uint64_t seed = 1;
    std::vector<ObjectSpec> objects;
};

enum class ModalityKind { identity, invert, gamma, threshold };

struct Modality {
    ModalityKind kind = ModalityKind::identity;
    double param = 1.0; // gamma exponent, or threshold cut level
};

// Recipe for a ground-truthed pair: view A is the scene itself; view B is
// the scene warped by H, re-rendered through a modality transform, and
// optionally shifted in time by whole states (2 frames each).  Noise is
// drawn independently per view, after warping.
struct PairSpec {
    SceneSpec scene;
    Homography H;
    Modality modality;
    int temporal_offset_states = 0;
};

// Object top-left at frame t (t clamped into [0, n_frames−1]).
Vec2 object_position(const ObjectSpec& obj, int t, int n_frames);

// One clean (noise-free) frame.  Deterministic in (spec, index).
Frame render_clean_frame(const SceneSpec& spec, int index);

// Clean frame plus per-view noise; view_tag decouples the two views' draws.
Frame render_frame(const SceneSpec& spec, int index, std::uint64_t view_tag);

// All frames of view A (validates that every object shows up at least once).
std::vector<Frame> render_scene(const SceneSpec& spec);

std::uint8_t apply_modality(std::uint8_t v, const Modality& m);

// Inverse-mapped bilinear warp: out(x) = src(H⁻¹·x), background outside.
Frame warp_frame(const Frame& src, const Homography& H, std::uint8_t background);

// Streaming view of a pair without materializing frames.  view B's frame k
// is modality(warp(clean frame k − 2·offset)) + noise.
class PairView final : public FrameSource {
public:
    enum class Side { a, b };
    PairView(PairSpec spec, Side side);

    int frame_count() const override { return spec_.scene.n_frames; }
    int width() const override { return spec_.scene.width; }
    int height() const override { return spec_.scene.height; }
    Frame frame(int index) const override;

private:
    PairSpec spec_;
    Side side_;
};

// Materialized pair (for tests and small runs).
struct RenderedPair {
    std::vector<Frame> a;
    std::vector<Frame> b;
    Homography H;
};
RenderedPair make_pair(const PairSpec& spec);

// JSON round-trip for pair specs (the `pair.json` manifest).
std::string pair_spec_to_json(const PairSpec& spec);
PairSpec pair_spec_from_json(const std::string& text);
PairSpec load_pair_spec(const std::filesystem::path& file);

// Writes A/ and B/ frame directories (PGM + video.meta), gt.hom, and
// pair.json under out_dir.
void write_pair(const PairSpec& spec, const std::filesystem::path& out_dir);

} // namespace vmatch
