#include "vmatch/video_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vmatch/errors.hpp"

namespace vmatch {

namespace {

// ---------------------------------------------------------------- PNM ----

// Skips whitespace and '#' comments between PNM header tokens.
int next_pnm_token(std::istream& in) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            return c;
        }
        c = in.get();
    }
    return EOF;
}

int read_pnm_int(std::istream& in, const std::filesystem::path& file) {
    int c = next_pnm_token(in);
    if (c == EOF || !std::isdigit(c))
        throw input_error("malformed PNM header in " + file.string());
    long v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        if (v > 1 << 30) throw input_error("absurd PNM header value in " + file.string());
        c = in.get();
    }
    if (c != EOF) in.unget();
    return static_cast<int>(v);
}

struct PnmHeader {
    int type = 0; // 2, 3, 5, 6
    int width = 0, height = 0, maxval = 0;
};

PnmHeader read_pnm_header(std::istream& in, const std::filesystem::path& file) {
    PnmHeader h;
    if (in.get() != 'P') throw input_error("not a PNM file: " + file.string());
    const int t = in.get();
    if (t != '2' && t != '3' && t != '5' && t != '6')
        throw input_error("unsupported PNM type in " + file.string());
    h.type = t - '0';
    h.width = read_pnm_int(in, file);
    h.height = read_pnm_int(in, file);
    h.maxval = read_pnm_int(in, file);
    if (h.width < 1 || h.height < 1)
        throw input_error("empty image: " + file.string());
    if (h.maxval < 1 || h.maxval > 255)
        throw input_error("only 8-bit PNM supported (maxval ≤ 255): " + file.string());
    return h;
}

Frame load_pnm(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw input_error("cannot open " + file.string());
    const PnmHeader h = read_pnm_header(in, file);
    const bool color = (h.type == 3 || h.type == 6);
    const std::size_t n = static_cast<std::size_t>(h.width) * h.height;

    std::vector<std::uint8_t> raw(n * (color ? 3 : 1));
    if (h.type == 5 || h.type == 6) {
        // Exactly one whitespace byte separates the header from the binary
        // payload; read_pnm_int ungot it, so consume it here.
        in.get();
        in.read(reinterpret_cast<char*>(raw.data()),
                static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            throw input_error("truncated PNM payload: " + file.string());
    } else {
        for (auto& v : raw) {
            const int x = read_pnm_int(in, file);
            if (x > h.maxval) throw input_error("PNM sample exceeds maxval: " + file.string());
            v = static_cast<std::uint8_t>(x);
        }
    }

    Frame f(h.width, h.height);
    if (color) {
        for (std::size_t i = 0; i < n; ++i)
            f.data[i] = luminance(raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]);
    } else {
        f.data = std::move(raw);
    }
    // Rescale if maxval < 255 (rare; keeps values comparable).
    if (h.maxval != 255)
        for (auto& v : f.data)
            v = static_cast<std::uint8_t>((v * 255 + h.maxval / 2) / h.maxval);
    return f;
}

// ---------------------------------------------------------------- PNG ----

struct PngReadCtx {
    std::FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadCtx() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

[[noreturn]] void png_error_fn(png_structp, png_const_charp msg) {
    throw input_error(std::string("PNG error: ") + (msg ? msg : "unknown"));
}
void png_warn_fn(png_structp, png_const_charp) {}

Frame load_png(const std::filesystem::path& file) {
    PngReadCtx ctx;
    ctx.fp = std::fopen(file.string().c_str(), "rb");
    if (!ctx.fp) throw input_error("cannot open " + file.string());

    ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                     png_error_fn, png_warn_fn);
    if (!ctx.png) throw internal_error("png_create_read_struct failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw internal_error("png_create_info_struct failed");

    png_init_io(ctx.png, ctx.fp);
    png_read_info(ctx.png, ctx.info);

    const int w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
    const int h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
    const int color_type = png_get_color_type(ctx.png, ctx.info);
    const int bit_depth = png_get_bit_depth(ctx.png, ctx.info);

    // Normalize every variant to 8-bit gray or RGB.
    if (bit_depth == 16) png_set_strip_16(ctx.png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(ctx.png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(ctx.png);
    if (png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(ctx.png);
    if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(ctx.png, ctx.info, PNG_INFO_tRNS))
        png_set_strip_alpha(ctx.png);
    png_read_update_info(ctx.png, ctx.info);

    const int channels = png_get_channels(ctx.png, ctx.info);
    if (channels != 1 && channels != 3)
        throw input_error("unsupported PNG channel layout in " + file.string());

    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * channels);
    Frame f(w, h);
    for (int y = 0; y < h; ++y) {
        png_read_row(ctx.png, row.data(), nullptr);
        if (channels == 1) {
            std::memcpy(f.data.data() + static_cast<std::size_t>(y) * w, row.data(), w);
        } else {
            for (int x = 0; x < w; ++x)
                f.at(x, y) = luminance(row[3 * x], row[3 * x + 1], row[3 * x + 2]);
        }
    }
    png_read_end(ctx.png, nullptr);
    return f;
}

std::pair<int, int> probe_png_size(const std::filesystem::path& file) {
    // IHDR is always the first chunk: width/height live at byte offset 16.
    std::ifstream in(file, std::ios::binary);
    std::uint8_t buf[24];
    in.read(reinterpret_cast<char*>(buf), 24);
    if (in.gcount() != 24 || std::memcmp(buf + 12, "IHDR", 4) != 0)
        throw input_error("malformed PNG header: " + file.string());
    auto be32 = [&](int off) {
        return (buf[off] << 24) | (buf[off + 1] << 16) | (buf[off + 2] << 8) | buf[off + 3];
    };
    return {be32(16), be32(20)};
}

std::string lower_ext(const std::filesystem::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return e;
}

} // namespace

Frame load_image(const std::filesystem::path& file) {
    const std::string ext = lower_ext(file);
    if (ext == ".pgm" || ext == ".ppm") return load_pnm(file);
    if (ext == ".png") return load_png(file);
    throw input_error("unsupported image extension: " + file.string());
}

std::pair<int, int> probe_image_size(const std::filesystem::path& file) {
    const std::string ext = lower_ext(file);
    if (ext == ".png") return probe_png_size(file);
    std::ifstream in(file, std::ios::binary);
    if (!in) throw input_error("cannot open " + file.string());
    const PnmHeader h = read_pnm_header(in, file);
    return {h.width, h.height};
}

void save_pgm(const std::filesystem::path& file, const Frame& img) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw input_error("cannot write " + file.string());
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size()));
    if (!out) throw input_error("short write: " + file.string());
}

namespace {

struct PngWriteCtx {
    std::FILE* fp = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteCtx() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

void save_png_impl(const std::filesystem::path& file, int width, int height,
                   int color_type, int channels, const std::uint8_t* data) {
    PngWriteCtx ctx;
    ctx.fp = std::fopen(file.string().c_str(), "wb");
    if (!ctx.fp) throw input_error("cannot write " + file.string());
    ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                      png_error_fn, png_warn_fn);
    if (!ctx.png) throw internal_error("png_create_write_struct failed");
    ctx.info = png_create_info_struct(ctx.png);
    if (!ctx.info) throw internal_error("png_create_info_struct failed");

    png_init_io(ctx.png, ctx.fp);
    png_set_IHDR(ctx.png, ctx.info, width, height, 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(ctx.png, ctx.info);
    for (int y = 0; y < height; ++y)
        png_write_row(ctx.png, const_cast<png_bytep>(
                                   data + static_cast<std::size_t>(y) * width * channels));
    png_write_end(ctx.png, nullptr);
}

} // namespace

void save_png_gray(const std::filesystem::path& file, const Frame& img) {
    save_png_impl(file, img.width, img.height, PNG_COLOR_TYPE_GRAY, 1, img.data.data());
}

void save_png_rgb(const std::filesystem::path& file, const RgbImage& img) {
    save_png_impl(file, img.width, img.height, PNG_COLOR_TYPE_RGB, 3, img.data.data());
}

// -------------------------------------------------------- VideoSource ----

VideoSource VideoSource::open(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw input_error("not a directory: " + dir.string());

    // Collect NNNNNN.{pgm,ppm,png} files, keyed by their 6-digit index.
    std::vector<std::pair<int, std::string>> found;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        const std::string ext = lower_ext(entry.path());
        if (ext != ".pgm" && ext != ".ppm" && ext != ".png") continue;
        const std::string stem = entry.path().stem().string();
        if (stem.size() != 6 ||
            !std::all_of(stem.begin(), stem.end(),
                         [](unsigned char c) { return std::isdigit(c); }))
            continue;
        found.emplace_back(std::stoi(stem), name);
    }
    std::sort(found.begin(), found.end());

    if (found.size() < 3)
        throw input_error("video needs at least 3 frames, found " +
                          std::to_string(found.size()) + " in " + dir.string());
    for (std::size_t i = 0; i < found.size(); ++i)
        if (found[i].first != static_cast<int>(i))
            throw input_error("frame index " + std::to_string(i) +
                              " missing or duplicated in " + dir.string());

    VideoSource src;
    src.dir_ = dir;
    src.files_.reserve(found.size());
    for (auto& [idx, name] : found) src.files_.push_back(std::move(name));

    // Cheap header probe of every frame catches mixed resolutions up front.
    auto [w0, h0] = probe_image_size(dir / src.files_[0]);
    for (std::size_t i = 1; i < src.files_.size(); ++i) {
        auto [w, h] = probe_image_size(dir / src.files_[i]);
        if (w != w0 || h != h0)
            throw input_error("frame " + src.files_[i] + " is " + std::to_string(w) +
                              "x" + std::to_string(h) + " but frame 000000 is " +
                              std::to_string(w0) + "x" + std::to_string(h0));
    }
    src.width_ = w0;
    src.height_ = h0;

    const fs::path meta = dir / "video.meta";
    if (fs::exists(meta)) {
        std::ifstream in(meta);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw input_error("malformed video.meta line: " + line);
            const std::string key = line.substr(0, eq);
            const std::string val = line.substr(eq + 1);
            try {
                if (key == "fps") {
                    src.fps_ = std::stod(val);
                    if (!(src.fps_ > 0)) throw input_error("fps must be positive");
                } else if (key == "frames") {
                    if (std::stoul(val) != src.files_.size())
                        throw input_error("video.meta declares " + val + " frames but " +
                                          std::to_string(src.files_.size()) + " were found");
                } else {
                    throw input_error("unknown video.meta key: " + key);
                }
            } catch (const std::invalid_argument&) {
                throw input_error("malformed video.meta value: " + line);
            }
        }
    }
    return src;
}

Frame VideoSource::frame(int index) const {
    if (index < 0 || index >= frame_count())
        throw input_error("frame index " + std::to_string(index) + " out of range [0, " +
                          std::to_string(frame_count()) + ") in " + dir_.string());
    Frame f = load_image(dir_ / files_[index]);
    if (f.width != width_ || f.height != height_)
        throw input_error("frame " + files_[index] + " changed size on disk");
    return f;
}

} // namespace vmatch
