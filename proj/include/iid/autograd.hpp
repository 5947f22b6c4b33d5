#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "iid/filters.hpp"

namespace iid::ad {

/// Dense batched layout (N,H,W,C), row-major with interleaved channels.
/// Convolution kernels reuse the same struct as (Kh,Kw,Cin,Cout).
struct Shape {
    int n = 1, h = 1, w = 1, c = 1;
    long long count() const { return 1LL * n * h * w * c; }
    bool operator==(const Shape&) const = default;
};

namespace detail {
struct Node;
}

/// Value handle into the computation graph. Copies share the node. Gradients
/// of leaves accumulate across backward() calls until zero_grad(); non-leaf
/// gradients are rebuilt by each backward() pass.
class Tensor {
  public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<detail::Node> node) : node(std::move(node)) {}

    static Tensor zeros(const Shape& shape, bool requires_grad = false);
    static Tensor full(const Shape& shape, double value, bool requires_grad = false);
    static Tensor from_data(const Shape& shape, std::vector<double> values,
                            bool requires_grad = false);

    bool defined() const { return node != nullptr; }
    const Shape& shape() const;
    std::span<const double> data() const;
    std::span<double> mutable_data(); // leaves only (parameters, inputs)
    std::span<const double> grad() const;
    bool requires_grad() const;
    bool is_leaf() const;
    void zero_grad();
    double scalar() const; // single-element tensors

    // Opaque graph handle; ops and backward() wire through it.
    std::shared_ptr<detail::Node> node;
};

// Elementwise / reduction ops. Binary ops need equal shapes except where
// noted; mul broadcasts a 1-channel tensor against a C-channel one.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scalar_mul(const Tensor& a, double s);
Tensor exp(const Tensor& a);
/// ln(max(x, eps)); zero derivative inside the clamped region.
Tensor log(const Tensor& a, double eps);
Tensor sqrt(const Tensor& a);
Tensor abs(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor leaky_relu(const Tensor& a, double slope);
Tensor concat_channels(const Tensor& a, const Tensor& b);
Tensor channel_max(const Tensor& a); // ties go to the first channel

Tensor reflection_pad(const Tensor& a, int pad);
/// Valid cross-correlation, stride 1. kernel is (Kh,Kw,Cin,Cout), bias (Cout).
Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias);
/// Same-size depthwise correlation with a fixed (non-trainable) kernel and
/// reflect-101 borders; bit-identical to filters::convolve2d.
Tensor fixed_conv2d(const Tensor& input, const filters::Kernel2D& kernel);

/// Reverse-mode pass from a scalar loss. Rebuilds non-leaf grads, accumulates
/// into leaf grads.
void backward(const Tensor& loss);

struct GradCheckReport {
    double max_rel_error = 0.0;
    long long checked = 0;
    long long non_smooth = 0; // excluded points (one-sided slopes disagree)
    bool passed = false;
};

/// Central-difference check of d(fn)/d(point). fn must build a fresh graph on
/// every call and return a scalar. Elements where the one-sided slopes
/// disagree badly (kinks like |x| at 0) are excluded and counted.
GradCheckReport grad_check(const std::function<Tensor(const Tensor&)>& fn, const Tensor& point,
                           double h, double tol);

} // namespace iid::ad
