#pragma once

#include <filesystem>

#include "iid/filters.hpp"
#include "iid/image.hpp"

namespace iid::physmaps {

using img::ImageTensor;

/// Gradient magnitudes of the three log channel-ratio maps, stacked as
/// (R:G, R:B, B:G). Zero wherever chromaticity is locally constant.
struct RrgMap {
    ImageTensor channels; // 3-channel
};

/// Per-channel likelihood of that channel being significant for reflectance;
/// clipped log-ratio averages, always in [0,1]. Greyscale pixels map to 0.
struct RamMap {
    ImageTensor channels; // 3-channel
};

/// Per-channel signed gradient of log intensity, valid only where the
/// averaged ratio-gradient mask stays below the threshold; zeroed elsewhere.
struct SgMap {
    ImageTensor gx;   // 3-channel, exactly 0 where mask >= threshold
    ImageTensor gy;   // 3-channel, exactly 0 where mask >= threshold
    ImageTensor mask; // 3-channel averaged RRG magnitudes
    double threshold = 0.1;
};

struct SgReduced {
    ImageTensor x; // 1-channel product over the three channels
    ImageTensor y;
};

/// ln(clamp(I_a,eps,1) / clamp(I_b,eps,1)) per pixel.
ImageTensor log_ratio(const ImageTensor& image, int channel_a, int channel_b, double eps);

RrgMap f_rrg(const ImageTensor& image, double sigma, double eps);

RamMap f_ram(const ImageTensor& image, double eps);

/// Averaged RRG magnitude pairs per channel:
/// R: (|∇J(R,G)|+|∇J(R,B)|)/2, G: (|∇J(G,B)|+|∇J(G,R)|)/2,
/// B: (|∇J(B,G)|+|∇J(B,R)|)/2.
ImageTensor m_rrg(const ImageTensor& image, double sigma, double eps);

SgMap f_sg(const ImageTensor& image, double sigma, double eps, double threshold = 0.1);

/// Channel reduction by elementwise product, per gradient component.
SgReduced sg_reduce(const SgMap& sg);

/// Lossless float32 sidecar ("IIDMAP1" header + dims + raw little-endian data).
void write_float_map(const ImageTensor& map, const std::filesystem::path& path);
ImageTensor read_float_map(const std::filesystem::path& path);

} // namespace iid::physmaps
