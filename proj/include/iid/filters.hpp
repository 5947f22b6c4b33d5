#pragma once

#include <utility>
#include <vector>

#include "iid/image.hpp"

namespace iid::filters {

using img::ImageTensor;

/// Odd-sized square filter, row-major taps.
struct Kernel2D {
    int size = 0;
    std::vector<double> taps;

    double at(int u, int v) const { return taps[static_cast<size_t>(u) * size + v]; }
    double& at(int u, int v) { return taps[static_cast<size_t>(u) * size + v]; }
    int radius() const { return size / 2; }
};

struct GradientField {
    ImageTensor gx;
    ImageTensor gy;
    ImageTensor magnitude; // per-channel sqrt(gx^2 + gy^2)
};

/// Normalized Gaussian (taps sum to 1). Size defaults to 2*ceil(3*sigma)+1.
Kernel2D gaussian_kernel(double sigma, int size = 0);

/// First-derivative-of-Gaussian pair. Taps start from -(x/sigma^2)*G(x,y) and
/// are rescaled so the correlation response to the unit ramp f(x,y)=x is
/// exactly 1; the y kernel is the transpose. Taps of each sum to 0.
std::pair<Kernel2D, Kernel2D> gaussian_derivative_kernels(double sigma);

/// Same-size 2D correlation (no kernel flip) with reflect-101 borders.
ImageTensor convolve2d(const ImageTensor& map, const Kernel2D& kernel);

/// Derivative-of-Gaussian gradient of every channel.
GradientField spatial_gradient(const ImageTensor& map, double sigma);

/// Mirror index i into [0, n) without repeating the edge sample.
inline int reflect101(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

/// Shared correlation core over interleaved (H,W,C) data; `out` must not
/// alias `in`. Also used by the autodiff fixed convolution so both paths are
/// bit-identical.
void correlate_reflect101(const double* in, double* out, int h, int w, int channels,
                          const Kernel2D& kernel);

/// Adjoint of correlate_reflect101: accumulates (+=) into grad_in.
void correlate_reflect101_adjoint(const double* grad_out, double* grad_in, int h, int w,
                                  int channels, const Kernel2D& kernel);

} // namespace iid::filters
