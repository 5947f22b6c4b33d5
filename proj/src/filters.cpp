#include "iid/filters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iid/errors.hpp"
#include "iid/parallel.hpp"

namespace iid::filters {

Kernel2D gaussian_kernel(double sigma, int size) {
    if (sigma <= 0.0) throw DataError("sigma must be positive");
    if (size == 0) size = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
    if (size % 2 == 0) throw DataError("kernel size must be odd");

    Kernel2D k{size, std::vector<double>(static_cast<size_t>(size) * size)};
    int r = size / 2;
    double sum = 0.0;
    for (int u = 0; u < size; ++u) {
        for (int v = 0; v < size; ++v) {
            double dy = u - r, dx = v - r;
            double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            k.at(u, v) = g;
            sum += g;
        }
    }
    for (double& t : k.taps) t /= sum;
    return k;
}

std::pair<Kernel2D, Kernel2D> gaussian_derivative_kernels(double sigma) {
    if (sigma <= 0.0) throw DataError("sigma must be positive");
    int size = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
    int r = size / 2;

    Kernel2D gx{size, std::vector<double>(static_cast<size_t>(size) * size)};
    double ramp = 0.0; // correlation response to f(x,y) = x
    for (int u = 0; u < size; ++u) {
        for (int v = 0; v < size; ++v) {
            double dy = u - r, dx = v - r;
            double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            gx.at(u, v) = -(dx / (sigma * sigma)) * g;
            ramp += gx.at(u, v) * dx;
        }
    }
    for (double& t : gx.taps) t /= ramp;

    Kernel2D gy{size, std::vector<double>(static_cast<size_t>(size) * size)};
    for (int u = 0; u < size; ++u)
        for (int v = 0; v < size; ++v) gy.at(u, v) = gx.at(v, u);
    return {gx, gy};
}

namespace {

void correlate_rows(const double* in, double* out, int h, int w, int channels,
                    const Kernel2D& kernel, int y0, int y1) {
    int r = kernel.radius();
    int size = kernel.size;
    for (int y = y0; y < y1; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                double acc = 0.0;
                for (int u = 0; u < size; ++u) {
                    int sy = reflect101(y + u - r, h);
                    for (int v = 0; v < size; ++v) {
                        int sx = reflect101(x + v - r, w);
                        acc += kernel.taps[static_cast<size_t>(u) * size + v] *
                               in[(static_cast<size_t>(sy) * w + sx) * channels + c];
                    }
                }
                out[(static_cast<size_t>(y) * w + x) * channels + c] = acc;
            }
        }
    }
}

} // namespace

void correlate_reflect101(const double* in, double* out, int h, int w, int channels,
                          const Kernel2D& kernel) {
    correlate_rows(in, out, h, w, channels, kernel, 0, h);
}

void correlate_reflect101_adjoint(const double* grad_out, double* grad_in, int h, int w,
                                  int channels, const Kernel2D& kernel) {
    int r = kernel.radius();
    int size = kernel.size;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                double g = grad_out[(static_cast<size_t>(y) * w + x) * channels + c];
                if (g == 0.0) continue;
                for (int u = 0; u < size; ++u) {
                    int sy = reflect101(y + u - r, h);
                    for (int v = 0; v < size; ++v) {
                        int sx = reflect101(x + v - r, w);
                        grad_in[(static_cast<size_t>(sy) * w + sx) * channels + c] +=
                            g * kernel.taps[static_cast<size_t>(u) * size + v];
                    }
                }
            }
        }
    }
}

ImageTensor convolve2d(const ImageTensor& map, const Kernel2D& kernel) {
    if (kernel.size > map.height || kernel.size > map.width)
        throw DataError("kernel larger than image");
    ImageTensor out(map.height, map.width, map.channels);
    // Output rows are disjoint, so banding does not change the result.
    int bands = std::min(parallel::thread_count(), map.height);
    parallel::parallel_for(bands, [&](int b) {
        int y0 = map.height * b / bands;
        int y1 = map.height * (b + 1) / bands;
        correlate_rows(map.data.data(), out.data.data(), map.height, map.width, map.channels,
                       kernel, y0, y1);
    });
    return out;
}

GradientField spatial_gradient(const ImageTensor& map, double sigma) {
    auto [kx, ky] = gaussian_derivative_kernels(sigma);
    GradientField f;
    f.gx = convolve2d(map, kx);
    f.gy = convolve2d(map, ky);
    f.magnitude = ImageTensor(map.height, map.width, map.channels);
    for (size_t i = 0; i < f.magnitude.data.size(); ++i)
        f.magnitude.data[i] = std::sqrt(f.gx.data[i] * f.gx.data[i] + f.gy.data[i] * f.gy.data[i]);
    return f;
}

} // namespace iid::filters
