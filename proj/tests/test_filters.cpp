#include "doctest.h"

#include <cmath>
#include <random>

#include "iid/errors.hpp"
#include "iid/filters.hpp"

using namespace iid;
using filters::Kernel2D;
using img::ImageTensor;

namespace {

ImageTensor random_image(int h, int w, int c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ImageTensor out(h, w, c);
    for (double& v : out.data) v = (rng() >> 11) * 0x1.0p-53;
    return out;
}

Kernel2D random_kernel(int size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Kernel2D k{size, std::vector<double>(static_cast<size_t>(size) * size)};
    for (double& t : k.taps) t = 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
    return k;
}

/// Brute-force nested-loop correlation with reflect-101 borders; the oracle
/// the fast path is checked against.
ImageTensor brute_force_correlate(const ImageTensor& map, const Kernel2D& k) {
    ImageTensor out(map.height, map.width, map.channels);
    int r = k.size / 2;
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x)
            for (int c = 0; c < map.channels; ++c) {
                double acc = 0.0;
                for (int u = -r; u <= r; ++u)
                    for (int v = -r; v <= r; ++v) {
                        int sy = y + u, sx = x + v;
                        while (sy < 0 || sy >= map.height)
                            sy = sy < 0 ? -sy : 2 * map.height - 2 - sy;
                        while (sx < 0 || sx >= map.width)
                            sx = sx < 0 ? -sx : 2 * map.width - 2 - sx;
                        acc += k.at(u + r, v + r) * map.at(sy, sx, c);
                    }
                out.at(y, x, c) = acc;
            }
    return out;
}

} // namespace

TEST_CASE("derivative kernels: size, zero sum, exact ramp response") {
    auto [gx, gy] = filters::gaussian_derivative_kernels(1.0);
    CHECK(gx.size == 7);
    double sum_x = 0, sum_y = 0;
    for (double t : gx.taps) sum_x += t;
    for (double t : gy.taps) sum_y += t;
    CHECK(std::abs(sum_x) < 1e-12);
    CHECK(std::abs(sum_y) < 1e-12);

    // Interior response of the x kernel to f(x,y)=x is exactly 1, to f=y is 0.
    int n = 31;
    ImageTensor ramp_x(n, n, 1), ramp_y(n, n, 1);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            ramp_x.at(y, x, 0) = x;
            ramp_y.at(y, x, 0) = y;
        }
    ImageTensor rx = filters::convolve2d(ramp_x, gx);
    ImageTensor ry = filters::convolve2d(ramp_y, gx);
    for (int y = 10; y < n - 10; ++y)
        for (int x = 10; x < n - 10; ++x) {
            CHECK(rx.at(y, x, 0) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(std::abs(ry.at(y, x, 0)) < 1e-10);
        }

    CHECK_THROWS_AS(filters::gaussian_derivative_kernels(0.0), DataError);
    CHECK_THROWS_AS(filters::gaussian_derivative_kernels(-1.0), DataError);
}

TEST_CASE("gaussian kernel normalizes to 1") {
    for (double sigma : {0.5, 1.0, 1.5, 2.3}) {
        Kernel2D k = filters::gaussian_kernel(sigma);
        double sum = 0;
        for (double t : k.taps) sum += t;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(k.size % 2 == 1);
    }
}

TEST_CASE("convolve2d: identity, box normalization, kernel-vs-image size") {
    ImageTensor image = random_image(7, 9, 3, 17);

    Kernel2D identity{3, {0, 0, 0, 0, 1, 0, 0, 0, 0}};
    CHECK(filters::convolve2d(image, identity).data == image.data);

    Kernel2D box{3, std::vector<double>(9, 1.0 / 9.0)};
    ImageTensor ones(5, 5, 1, 1.0);
    for (double v : filters::convolve2d(ones, box).data)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(filters::convolve2d(ImageTensor(2, 2, 1), box), DataError);
}

TEST_CASE("convolve2d matches the brute-force oracle on random instances") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        int h = 5 + static_cast<int>(rng() % 6);
        int w = 5 + static_cast<int>(rng() % 6);
        int c = 1 + static_cast<int>(rng() % 3);
        int size = 1 + 2 * static_cast<int>(rng() % 2); // 1 or 3
        ImageTensor map = random_image(h, w, c, rng());
        Kernel2D k = random_kernel(size, rng());
        ImageTensor fast = filters::convolve2d(map, k);
        ImageTensor slow = brute_force_correlate(map, k);
        for (size_t i = 0; i < fast.data.size(); ++i)
            CHECK(std::abs(fast.data[i] - slow.data[i]) < 1e-12);
    }
}

TEST_CASE("convolve2d is linear") {
    ImageTensor a = random_image(8, 8, 1, 31);
    ImageTensor b = random_image(8, 8, 1, 32);
    Kernel2D k = random_kernel(3, 33);
    double alpha = 0.37, beta = -1.25;

    ImageTensor mixed(8, 8, 1);
    for (size_t i = 0; i < mixed.data.size(); ++i)
        mixed.data[i] = alpha * a.data[i] + beta * b.data[i];

    ImageTensor lhs = filters::convolve2d(mixed, k);
    ImageTensor ca = filters::convolve2d(a, k);
    ImageTensor cb = filters::convolve2d(b, k);
    for (size_t i = 0; i < lhs.data.size(); ++i)
        CHECK(lhs.data[i] == doctest::Approx(alpha * ca.data[i] + beta * cb.data[i]).epsilon(1e-12));
}

TEST_CASE("spatial_gradient: constants, ramps, offset invariance") {
    ImageTensor flat(12, 12, 3, 0.42);
    filters::GradientField g = filters::spatial_gradient(flat, 1.0);
    for (double v : g.gx.data) CHECK(std::abs(v) < 1e-12);
    for (double v : g.gy.data) CHECK(std::abs(v) < 1e-12);
    for (double v : g.magnitude.data) CHECK(std::abs(v) < 1e-12);

    int n = 24;
    ImageTensor ramp(n, n, 1);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) ramp.at(y, x, 0) = 2.0 * x;
    filters::GradientField gr = filters::spatial_gradient(ramp, 1.0);
    for (int y = 8; y < n - 8; ++y)
        for (int x = 8; x < n - 8; ++x) CHECK(gr.gx.at(y, x, 0) == doctest::Approx(2.0).epsilon(1e-10));

    ImageTensor bump = random_image(16, 16, 1, 55);
    ImageTensor shifted = bump;
    for (double& v : shifted.data) v += 3.7;
    filters::GradientField g0 = filters::spatial_gradient(bump, 1.0);
    filters::GradientField g1 = filters::spatial_gradient(shifted, 1.0);
    for (size_t i = 0; i < g0.magnitude.data.size(); ++i)
        CHECK(g0.magnitude.data[i] == doctest::Approx(g1.magnitude.data[i]).epsilon(1e-10));
    for (double v : g0.magnitude.data) CHECK(v >= 0.0);
}

TEST_CASE("rotating the input permutes the gradient components") {
    int n = 17;
    ImageTensor image = random_image(n, n, 1, 71);
    // Smooth it slightly so interior gradients are well resolved.
    image = filters::convolve2d(image, filters::gaussian_kernel(1.0));

    // Rotate 90 degrees clockwise: out(y,x) = in(n-1-x, y).
    ImageTensor rotated(n, n, 1);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) rotated.at(y, x, 0) = image.at(n - 1 - x, y, 0);

    filters::GradientField g = filters::spatial_gradient(image, 1.0);
    filters::GradientField gr = filters::spatial_gradient(rotated, 1.0);

    // d/dx of the rotated field at (y,x) equals -d/dy of the original at
    // (n-1-x, y); the magnitude is invariant.
    for (int y = 6; y < n - 6; ++y)
        for (int x = 6; x < n - 6; ++x) {
            CHECK(gr.gx.at(y, x, 0) == doctest::Approx(-g.gy.at(n - 1 - x, y, 0)).epsilon(1e-9));
            CHECK(gr.gy.at(y, x, 0) == doctest::Approx(g.gx.at(n - 1 - x, y, 0)).epsilon(1e-9));
            CHECK(gr.magnitude.at(y, x, 0) ==
                  doctest::Approx(g.magnitude.at(n - 1 - x, y, 0)).epsilon(1e-9));
        }
}

TEST_CASE("correlate adjoint satisfies <Ax,y> = <x,A'y>") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 10; ++trial) {
        int h = 6 + static_cast<int>(rng() % 4);
        int w = 6 + static_cast<int>(rng() % 4);
        ImageTensor x = random_image(h, w, 2, rng());
        ImageTensor y = random_image(h, w, 2, rng());
        Kernel2D k = random_kernel(3, rng());

        ImageTensor ax(h, w, 2);
        filters::correlate_reflect101(x.data.data(), ax.data.data(), h, w, 2, k);
        ImageTensor aty(h, w, 2);
        filters::correlate_reflect101_adjoint(y.data.data(), aty.data.data(), h, w, 2, k);

        double lhs = 0, rhs = 0;
        for (size_t i = 0; i < x.data.size(); ++i) {
            lhs += ax.data[i] * y.data[i];
            rhs += x.data[i] * aty.data[i];
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}
