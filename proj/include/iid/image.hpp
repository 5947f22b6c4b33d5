#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace iid::img {

/// H×W×C raster of intensities in [0,1], row-major, interleaved channels.
/// Channels are 1 (grey) or 3 (R,G,B). Treated as immutable once built.
struct ImageTensor {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    ImageTensor() = default;
    ImageTensor(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<size_t>(h) * w * c, fill) {}

    double& at(int y, int x, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    size_t pixel_count() const { return static_cast<size_t>(height) * width; }
    bool same_shape(const ImageTensor& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
};

struct Patch {
    std::string source_id;
    int origin_row = 0;
    int origin_col = 0;
    ImageTensor tensor;
};

enum class AugmentOp { identity, flip_h, flip_v, rot90, rot180, rot270 };
inline constexpr AugmentOp kAugmentOps[] = {
    AugmentOp::identity, AugmentOp::flip_h, AugmentOp::flip_v,
    AugmentOp::rot90, AugmentOp::rot180, AugmentOp::rot270};

/// Reads a PNG (8/16-bit, grey or RGB; palette and alpha are folded away) or
/// a binary PPM/PGM. Values are normalized by 255 or 65535.
/// Throws DataError for a missing file, unsupported format, or corrupt stream.
ImageTensor load_image(const std::filesystem::path& path);

/// Writes an 8-bit PNG (grey for 1 channel, RGB for 3). Quantization is
/// round-half-up on v*255.
void save_image(const ImageTensor& image, const std::filesystem::path& path);

/// Per-pixel max over the three channels.
ImageTensor channel_max(const ImageTensor& image);

/// Uniformly random patch origins, with replacement; deterministic per seed.
std::vector<Patch> sample_patches(const ImageTensor& image, int count, int size,
                                  std::uint64_t seed,
                                  const std::string& source_id = "");

ImageTensor extract_patch(const ImageTensor& image, int row, int col, int size);

/// Pixel permutation only; rotations require a square patch.
Patch augment(const Patch& patch, AugmentOp op);
AugmentOp random_augment_op(std::mt19937_64& rng);

/// Deterministic (sorted) list of dataset images under root. Recognizes the
/// LOL layout (<root>/our485/{low,high}, <root>/eval15/{low,high}) and the
/// generic <root>/<split>/*.png layout, plus loose *.png files in root.
std::vector<std::filesystem::path> discover_images(const std::filesystem::path& root);

/// Stable mapping of a raw 64-bit draw onto [0, n), independent of the
/// standard library's distribution implementations.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;
}

} // namespace iid::img
