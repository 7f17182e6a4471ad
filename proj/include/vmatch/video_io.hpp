#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vmatch/frame.hpp"

namespace vmatch {

// Stream of grayscale frames.  Implementations must be stateless per call
// (or internally synchronized) so frames can be fetched from several threads
// at once; every returned Frame is an independent copy.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual int frame_count() const = 0;
    virtual int width() const = 0;
    virtual int height() const = 0;
    virtual double fps() const { return 30.0; }
    virtual Frame frame(int index) const = 0;
};

// Directory of numbered raster frames: 000000.pgm, 000001.pgm, ...
// Accepted extensions: .pgm, .ppm, .png.  Indices must be contiguous from 0.
// An optional sidecar `video.meta` may carry `fps=<float>` and
// `frames=<int>` lines; without it fps defaults to 30 and the count comes
// from the directory scan.
class VideoSource final : public FrameSource {
public:
    static VideoSource open(const std::filesystem::path& dir);

    int frame_count() const override { return static_cast<int>(files_.size()); }
    int width() const override { return width_; }
    int height() const override { return height_; }
    double fps() const override { return fps_; }
    Frame frame(int index) const override;

    const std::filesystem::path& dir() const { return dir_; }

private:
    VideoSource() = default;

    std::filesystem::path dir_;
    std::vector<std::string> files_; // index -> filename
    int width_ = 0;
    int height_ = 0;
    double fps_ = 30.0;
};

// Single-image helpers.  load_image decodes PGM/PPM (P2/P3/P5/P6, maxval
// ≤ 255) or 8-bit PNG and converts color to luminance.
Frame load_image(const std::filesystem::path& file);

// Reads just the pixel dimensions (cheap header parse, no full decode).
std::pair<int, int> probe_image_size(const std::filesystem::path& file);

void save_pgm(const std::filesystem::path& file, const Frame& img);
void save_png_gray(const std::filesystem::path& file, const Frame& img);
void save_png_rgb(const std::filesystem::path& file, const RgbImage& img);

} // namespace vmatch
