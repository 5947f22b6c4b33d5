#include "iid/losses.hpp"

#include <cmath>
#include <vector>

#include "iid/errors.hpp"
#include "iid/physmaps.hpp"

namespace iid::losses {
namespace {

using ad::Tensor;

img::ImageTensor item_view(const Tensor& batch, int item) {
    const ad::Shape& s = batch.shape();
    img::ImageTensor out(s.h, s.w, s.c);
    size_t stride = out.data.size();
    std::copy_n(batch.data().begin() + static_cast<size_t>(item) * stride, stride,
                out.data.begin());
    return out;
}

Tensor pack_constant(const std::vector<img::ImageTensor>& items) {
    ad::Shape shape{static_cast<int>(items.size()), items[0].height, items[0].width,
                    items[0].channels};
    std::vector<double> values;
    values.reserve(static_cast<size_t>(shape.count()));
    for (const auto& item : items) values.insert(values.end(), item.data.begin(), item.data.end());
    return Tensor::from_data(shape, std::move(values));
}

/// Constant feature maps of the network input, one physmaps pass per item.
struct FeatureBundle {
    Tensor rrg;       // (N,H,W,3)
    Tensor ss_weight; // (N,H,W,1) exp(-k * channel-mean of rrg)
    Tensor sg_x;      // (N,H,W,1)
    Tensor sg_y;      // (N,H,W,1)
    Tensor ram;       // (N,H,W,3)
};

FeatureBundle compute_features(const Tensor& input, const FeatureConfig& fc) {
    const ad::Shape& s = input.shape();
    if (s.c != 3) throw DataError("losses expect a 3-channel input batch");

    std::vector<img::ImageTensor> rrg, ssw, sgx, sgy, ram;
    for (int b = 0; b < s.n; ++b) {
        img::ImageTensor item = item_view(input, b);
        physmaps::RrgMap r = physmaps::f_rrg(item, fc.sigma, fc.eps);
        img::ImageTensor weight(s.h, s.w, 1);
        for (size_t p = 0; p < weight.data.size(); ++p) {
            double m = (r.channels.data[p * 3] + r.channels.data[p * 3 + 1] +
                        r.channels.data[p * 3 + 2]) /
                       3.0;
            weight.data[p] = std::exp(-fc.ss_sharpness * m);
        }
        physmaps::SgReduced sr =
            physmaps::sg_reduce(physmaps::f_sg(item, fc.sigma, fc.eps, fc.sg_threshold));
        rrg.push_back(std::move(r.channels));
        ssw.push_back(std::move(weight));
        sgx.push_back(std::move(sr.x));
        sgy.push_back(std::move(sr.y));
        ram.push_back(physmaps::f_ram(item, fc.eps).channels);
    }
    return {pack_constant(rrg), pack_constant(ssw), pack_constant(sgx), pack_constant(sgy),
            pack_constant(ram)};
}

/// Differentiable f_RRG: log, channel-pair differences via a fixed 1x1
/// selector convolution, derivative-of-Gaussian components, magnitude.
Tensor f_rrg_ad(const Tensor& image, const FeatureConfig& fc) {
    Tensor logs = ad::log(image, fc.eps);
    // Pairs (R,G), (R,B), (B,G) as +1/-1 taps over the channel axis.
    std::vector<double> taps(9, 0.0); // (1,1,3,3): index ci*3 + pair
    taps[0 * 3 + 0] = 1.0;
    taps[1 * 3 + 0] = -1.0;
    taps[0 * 3 + 1] = 1.0;
    taps[2 * 3 + 1] = -1.0;
    taps[2 * 3 + 2] = 1.0;
    taps[1 * 3 + 2] = -1.0;
    Tensor selector = Tensor::from_data(ad::Shape{1, 1, 3, 3}, std::move(taps));
    Tensor ratios = ad::conv2d(logs, selector, Tensor::zeros({1, 1, 1, 3}));

    auto [kx, ky] = filters::gaussian_derivative_kernels(fc.sigma);
    Tensor gx = ad::fixed_conv2d(ratios, kx);
    Tensor gy = ad::fixed_conv2d(ratios, ky);
    return ad::sqrt(ad::add(ad::mul(gx, gx), ad::mul(gy, gy)));
}

Tensor grad_magnitude(const Tensor& map, double sigma) {
    auto [kx, ky] = filters::gaussian_derivative_kernels(sigma);
    Tensor gx = ad::fixed_conv2d(map, kx);
    Tensor gy = ad::fixed_conv2d(map, ky);
    return ad::sqrt(ad::add(ad::mul(gx, gx), ad::mul(gy, gy)));
}

Tensor l_ss_with(const Tensor& shading, const Tensor& ss_weight, const FeatureConfig& fc) {
    return ad::mean(ad::abs(ad::mul(grad_magnitude(shading, fc.sigma), ss_weight)));
}

Tensor l_rrg_with(const Tensor& reflectance, const Tensor& rrg_input, const FeatureConfig& fc) {
    return ad::mean(ad::abs(ad::sub(f_rrg_ad(reflectance, fc), rrg_input)));
}

Tensor l_sg_with(const Tensor& shading, const Tensor& sg_x, const Tensor& sg_y,
                 const FeatureConfig& fc) {
    Tensor log_s = ad::log(shading, fc.eps);
    auto [kx, ky] = filters::gaussian_derivative_kernels(fc.sigma);
    Tensor gx = ad::fixed_conv2d(log_s, kx);
    Tensor gy = ad::fixed_conv2d(log_s, ky);
    Tensor term_x = ad::mean(ad::abs(ad::mul(ad::sub(gx, sg_x), sg_x)));
    Tensor term_y = ad::mean(ad::abs(ad::mul(ad::sub(gy, sg_y), sg_y)));
    return ad::add(term_x, term_y);
}

Tensor l_ram_with(const Tensor& reflectance, const Tensor& ram_input) {
    return ad::mean(ad::abs(ad::mul(ad::sub(reflectance, ram_input), ram_input)));
}

void check_rs_shapes(const Tensor& reflectance, const Tensor& shading, const Tensor& input) {
    const ad::Shape& r = reflectance.shape();
    const ad::Shape& s = shading.shape();
    const ad::Shape& i = input.shape();
    if (r.c != 3 || s.c != 1 || i.c != 3 || r.n != s.n || r.n != i.n || r.h != s.h ||
        r.h != i.h || r.w != s.w || r.w != i.w)
        throw DataError("loss shapes: expected R (N,H,W,3), S (N,H,W,1), I (N,H,W,3)");
}

} // namespace

Tensor l_recon(const Tensor& reflectance, const Tensor& shading, const Tensor& input) {
    check_rs_shapes(reflectance, shading, input);
    return ad::mean(ad::abs(ad::sub(ad::mul(reflectance, shading), input)));
}

Tensor l_ss(const Tensor& shading, const Tensor& input, const FeatureConfig& fc) {
    return l_ss_with(shading, compute_features(input, fc).ss_weight, fc);
}

Tensor l_rrg(const Tensor& reflectance, const Tensor& input, const FeatureConfig& fc) {
    return l_rrg_with(reflectance, compute_features(input, fc).rrg, fc);
}

Tensor l_sg(const Tensor& shading, const Tensor& input, const FeatureConfig& fc) {
    FeatureBundle f = compute_features(input, fc);
    return l_sg_with(shading, f.sg_x, f.sg_y, fc);
}

Tensor l_ram(const Tensor& reflectance, const Tensor& input, const FeatureConfig& fc) {
    return l_ram_with(reflectance, compute_features(input, fc).ram);
}

LossTerms total_loss(const Tensor& reflectance, const Tensor& shading, const Tensor& input,
                     const LossWeights& weights, const FeatureConfig& fc) {
    check_rs_shapes(reflectance, shading, input);
    FeatureBundle f = compute_features(input, fc);
    LossTerms t;
    t.recon = l_recon(reflectance, shading, input);
    t.ss = l_ss_with(shading, f.ss_weight, fc);
    t.rrg = l_rrg_with(reflectance, f.rrg, fc);
    t.sg = l_sg_with(shading, f.sg_x, f.sg_y, fc);
    t.ram = l_ram_with(reflectance, f.ram);
    t.total = ad::add(
        ad::add(ad::add(ad::add(ad::scalar_mul(t.recon, weights.recon),
                                ad::scalar_mul(t.ss, weights.ss)),
                        ad::scalar_mul(t.rrg, weights.rrg)),
                ad::scalar_mul(t.sg, weights.sg)),
        ad::scalar_mul(t.ram, weights.ram));
    return t;
}

LossBreakdown to_breakdown(const LossTerms& terms) {
    return {terms.recon.scalar(), terms.ss.scalar(),  terms.rrg.scalar(),
            terms.sg.scalar(),    terms.ram.scalar(), terms.total.scalar()};
}

} // namespace iid::losses
