#include "iid/physmaps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "iid/errors.hpp"

namespace iid::physmaps {
namespace {

double clamp01_eps(double v, double eps) { return std::clamp(v, eps, 1.0); }

void require_rgb(const ImageTensor& image, const char* who) {
    if (image.channels != 3) throw DataError(std::string(who) + " expects a 3-channel image");
}

} // namespace

ImageTensor log_ratio(const ImageTensor& image, int channel_a, int channel_b, double eps) {
    require_rgb(image, "log_ratio");
    if (channel_a < 0 || channel_a > 2 || channel_b < 0 || channel_b > 2)
        throw DataError("log_ratio channel index out of range");
    if (eps <= 0.0) throw DataError("log_ratio eps must be positive");
    ImageTensor out(image.height, image.width, 1);
    for (size_t p = 0; p < image.pixel_count(); ++p) {
        const double* px = &image.data[p * 3];
        out.data[p] = std::log(clamp01_eps(px[channel_a], eps)) -
                      std::log(clamp01_eps(px[channel_b], eps));
    }
    return out;
}

RrgMap f_rrg(const ImageTensor& image, double sigma, double eps) {
    require_rgb(image, "f_rrg");
    static constexpr int kPairs[3][2] = {{0, 1}, {0, 2}, {2, 1}}; // (R,G), (R,B), (B,G)
    RrgMap out{ImageTensor(image.height, image.width, 3)};
    for (int p = 0; p < 3; ++p) {
        ImageTensor ratio = log_ratio(image, kPairs[p][0], kPairs[p][1], eps);
        filters::GradientField g = filters::spatial_gradient(ratio, sigma);
        for (size_t i = 0; i < ratio.data.size(); ++i)
            out.channels.data[i * 3 + p] = g.magnitude.data[i];
    }
    return out;
}

RamMap f_ram(const ImageTensor& image, double eps) {
    require_rgb(image, "f_ram");
    RamMap out{ImageTensor(image.height, image.width, 3)};
    for (size_t p = 0; p < image.pixel_count(); ++p) {
        const double* px = &image.data[p * 3];
        double ln[3] = {std::log(clamp01_eps(px[0], eps)), std::log(clamp01_eps(px[1], eps)),
                        std::log(clamp01_eps(px[2], eps))};
        auto j = [&](int a, int b) { return std::clamp(ln[a] - ln[b], 0.0, 1.0); };
        out.channels.data[p * 3 + 0] = (j(0, 1) + j(0, 2)) / 2.0;
        out.channels.data[p * 3 + 1] = (j(1, 0) + j(1, 2)) / 2.0;
        out.channels.data[p * 3 + 2] = (j(2, 1) + j(2, 0)) / 2.0;
    }
    return out;
}

ImageTensor m_rrg(const ImageTensor& image, double sigma, double eps) {
    RrgMap rrg = f_rrg(image, sigma, eps);
    // |∇J(a,b)| = |∇J(b,a)|, so the three stored pair magnitudes cover all
    // six orderings written out in the per-channel averages.
    ImageTensor out(image.height, image.width, 3);
    for (size_t p = 0; p < image.pixel_count(); ++p) {
        double rg = rrg.channels.data[p * 3 + 0];
        double rb = rrg.channels.data[p * 3 + 1];
        double bg = rrg.channels.data[p * 3 + 2];
        out.data[p * 3 + 0] = (rg + rb) / 2.0; // R: (R,G)+(R,B)
        out.data[p * 3 + 1] = (bg + rg) / 2.0; // G: (G,B)+(G,R)
        out.data[p * 3 + 2] = (bg + rb) / 2.0; // B: (B,G)+(B,R)
    }
    return out;
}

SgMap f_sg(const ImageTensor& image, double sigma, double eps, double threshold) {
    require_rgb(image, "f_sg");
    SgMap out;
    out.threshold = threshold;
    out.mask = m_rrg(image, sigma, eps);
    out.gx = ImageTensor(image.height, image.width, 3);
    out.gy = ImageTensor(image.height, image.width, 3);

    ImageTensor log_intensity(image.height, image.width, 3);
    for (size_t i = 0; i < image.data.size(); ++i)
        log_intensity.data[i] = std::log(clamp01_eps(image.data[i], eps));
    filters::GradientField g = filters::spatial_gradient(log_intensity, sigma);

    for (size_t i = 0; i < image.data.size(); ++i) {
        if (out.mask.data[i] < threshold) {
            out.gx.data[i] = g.gx.data[i];
            out.gy.data[i] = g.gy.data[i];
        }
    }
    return out;
}

SgReduced sg_reduce(const SgMap& sg) {
    SgReduced out{ImageTensor(sg.gx.height, sg.gx.width, 1),
                  ImageTensor(sg.gy.height, sg.gy.width, 1)};
    for (size_t p = 0; p < out.x.data.size(); ++p) {
        out.x.data[p] = sg.gx.data[p * 3] * sg.gx.data[p * 3 + 1] * sg.gx.data[p * 3 + 2];
        out.y.data[p] = sg.gy.data[p * 3] * sg.gy.data[p * 3 + 1] * sg.gy.data[p * 3 + 2];
    }
    return out;
}

void write_float_map(const ImageTensor& map, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out.write("IIDMAP1", 7);
    auto put_u32 = [&out](std::uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
        out.write(reinterpret_cast<const char*>(b), 4);
    };
    put_u32(static_cast<std::uint32_t>(map.height));
    put_u32(static_cast<std::uint32_t>(map.width));
    put_u32(static_cast<std::uint32_t>(map.channels));
    for (double v : map.data) {
        float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        put_u32(bits);
    }
    if (!out) throw DataError("write failed: " + path.string());
}

ImageTensor read_float_map(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path.string());
    char magic[7];
    in.read(magic, 7);
    if (!in || std::memcmp(magic, "IIDMAP1", 7) != 0)
        throw DataError("not an IIDMAP1 file: " + path.string());
    auto get_u32 = [&in, &path] {
        unsigned char b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        if (!in) throw DataError("truncated IIDMAP1 file: " + path.string());
        return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
               (std::uint32_t(b[3]) << 24);
    };
    int h = static_cast<int>(get_u32());
    int w = static_cast<int>(get_u32());
    int c = static_cast<int>(get_u32());
    if (h <= 0 || w <= 0 || c <= 0 || c > 16)
        throw DataError("implausible IIDMAP1 header: " + path.string());
    ImageTensor map(h, w, c);
    for (double& v : map.data) {
        std::uint32_t bits = get_u32();
        float f;
        std::memcpy(&f, &bits, 4);
        v = f;
    }
    return map;
}

} // namespace iid::physmaps
