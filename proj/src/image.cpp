#include "iid/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include <png.h>

#include "iid/errors.hpp"

namespace iid::img {
namespace {

struct FileHandle {
    std::FILE* fp = nullptr;
    explicit FileHandle(const std::filesystem::path& p, const char* mode)
        : fp(std::fopen(p.string().c_str(), mode)) {}
    ~FileHandle() {
        if (fp) std::fclose(fp);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

ImageTensor read_png(std::FILE* fp, const std::filesystem::path& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("libpng initialization failed");
    }
    std::vector<png_byte> raw;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("corrupt PNG stream: " + path.string());
    }
    png_init_io(png, fp);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    else if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    depth = png_get_bit_depth(png, info);
    int channels = png_get_channels(png, info);
    if ((channels != 1 && channels != 3) || (depth != 8 && depth != 16)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("unsupported PNG layout (" + std::to_string(channels) + " channels, " +
                        std::to_string(depth) + "-bit): " + path.string());
    }

    size_t rowbytes = png_get_rowbytes(png, info);
    raw.resize(rowbytes * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageTensor out(static_cast<int>(h), static_cast<int>(w), channels);
    size_t values = out.data.size();
    if (depth == 8) {
        for (size_t i = 0; i < values; ++i) out.data[i] = raw[i] / 255.0;
    } else {
        // PNG 16-bit samples are big-endian.
        for (size_t i = 0; i < values; ++i) {
            unsigned v = (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
            out.data[i] = v / 65535.0;
        }
    }
    return out;
}

void skip_pnm_space(std::istream& in) {
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

ImageTensor read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string magic;
    in >> magic;
    int channels = magic == "P6" ? 3 : 1;
    long w = 0, h = 0, maxval = 0;
    skip_pnm_space(in);
    in >> w;
    skip_pnm_space(in);
    in >> h;
    skip_pnm_space(in);
    in >> maxval;
    in.get(); // single whitespace before the raster
    if (!in || w <= 0 || h <= 0 || (maxval != 255 && maxval != 65535))
        throw DataError("corrupt PPM header: " + path.string());

    ImageTensor out(static_cast<int>(h), static_cast<int>(w), channels);
    size_t values = out.data.size();
    size_t bytes = values * (maxval == 255 ? 1 : 2);
    std::vector<unsigned char> raw(bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
    if (static_cast<size_t>(in.gcount()) != bytes)
        throw DataError("corrupt PPM stream (truncated raster): " + path.string());
    if (maxval == 255) {
        for (size_t i = 0; i < values; ++i) out.data[i] = raw[i] / 255.0;
    } else {
        for (size_t i = 0; i < values; ++i) {
            unsigned v = (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
            out.data[i] = v / 65535.0;
        }
    }
    return out;
}

} // namespace

ImageTensor load_image(const std::filesystem::path& path) {
    FileHandle f(path, "rb");
    if (!f.fp) throw DataError("cannot open image (missing file?): " + path.string());

    unsigned char sig[8] = {};
    size_t got = std::fread(sig, 1, 8, f.fp);
    if (got == 8 && png_sig_cmp(sig, 0, 8) == 0) return read_png(f.fp, path);
    if (got >= 2 && sig[0] == 'P' && (sig[1] == '5' || sig[1] == '6')) return read_pnm(path);
    throw DataError("unsupported image format (expected PNG or binary PPM/PGM): " + path.string());
}

void save_image(const ImageTensor& image, const std::filesystem::path& path) {
    if (image.channels != 1 && image.channels != 3)
        throw DataError("save_image expects 1 or 3 channels");
    FileHandle f(path, "wb");
    if (!f.fp) throw DataError("cannot open for writing: " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DataError("PNG write failed: " + path.string());
    }
    png_init_io(png, f.fp);
    png_set_IHDR(png, info, image.width, image.height, 8,
                 image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<size_t>(image.width) * image.channels);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            for (int c = 0; c < image.channels; ++c) {
                double v = image.at(y, x, c);
                int q = static_cast<int>(std::floor(v * 255.0 + 0.5));
                row[static_cast<size_t>(x) * image.channels + c] =
                    static_cast<png_byte>(std::clamp(q, 0, 255));
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

ImageTensor channel_max(const ImageTensor& image) {
    if (image.channels != 3) throw DataError("channel_max expects a 3-channel image");
    ImageTensor out(image.height, image.width, 1);
    for (size_t p = 0; p < image.pixel_count(); ++p) {
        const double* px = &image.data[p * 3];
        out.data[p] = std::max(px[0], std::max(px[1], px[2]));
    }
    return out;
}

ImageTensor extract_patch(const ImageTensor& image, int row, int col, int size) {
    if (row < 0 || col < 0 || row + size > image.height || col + size > image.width)
        throw DataError("patch exceeds image bounds");
    ImageTensor out(size, size, image.channels);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            for (int c = 0; c < image.channels; ++c)
                out.at(y, x, c) = image.at(row + y, col + x, c);
    return out;
}

std::vector<Patch> sample_patches(const ImageTensor& image, int count, int size,
                                  std::uint64_t seed, const std::string& source_id) {
    if (image.height < size || image.width < size)
        throw DataError("image smaller than patch size");
    std::mt19937_64 rng(seed);
    std::vector<Patch> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        int r = static_cast<int>(bounded(rng, image.height - size + 1));
        int c = static_cast<int>(bounded(rng, image.width - size + 1));
        out.push_back({source_id, r, c, extract_patch(image, r, c, size)});
    }
    return out;
}

Patch augment(const Patch& patch, AugmentOp op) {
    const ImageTensor& in = patch.tensor;
    bool rotation = op == AugmentOp::rot90 || op == AugmentOp::rot180 || op == AugmentOp::rot270;
    if (rotation && in.height != in.width)
        throw DataError("rotation requires a square patch");
    if (op == AugmentOp::identity) return patch;

    Patch out = patch;
    ImageTensor& dst = out.tensor;
    int h = in.height, w = in.width;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int sy = y, sx = x;
            switch (op) {
                case AugmentOp::flip_h: sx = w - 1 - x; break;
                case AugmentOp::flip_v: sy = h - 1 - y; break;
                // rot90 is clockwise: out(y,x) = in(n-1-x, y).
                case AugmentOp::rot90: sy = h - 1 - x; sx = y; break;
                case AugmentOp::rot180: sy = h - 1 - y; sx = w - 1 - x; break;
                case AugmentOp::rot270: sy = x; sx = w - 1 - y; break;
                case AugmentOp::identity: break;
            }
            for (int c = 0; c < in.channels; ++c) dst.at(y, x, c) = in.at(sy, sx, c);
        }
    }
    return out;
}

AugmentOp random_augment_op(std::mt19937_64& rng) {
    return kAugmentOps[bounded(rng, 6)];
}

std::vector<std::filesystem::path> discover_images(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw DataError("not a directory: " + root.string());

    std::set<fs::path> found;
    auto collect = [&found](const fs::path& dir) {
        if (!fs::is_directory(dir)) return;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.is_regular_file() && e.path().extension() == ".png") found.insert(e.path());
    };

    for (const char* split : {"our485", "eval15"}) {
        fs::path lol = root / split;
        if (fs::is_directory(lol)) {
            collect(lol / "low");
            collect(lol / "high");
        }
    }
    collect(root);
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory() && e.path().filename() != "our485" && e.path().filename() != "eval15")
            collect(e.path());

    return {found.begin(), found.end()};
}

} // namespace iid::img
