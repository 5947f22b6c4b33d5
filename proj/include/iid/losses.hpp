#pragma once

#include "iid/autograd.hpp"
#include "iid/image.hpp"

namespace iid::losses {

struct FeatureConfig {
    double sigma = 1.0;
    double eps = 1e-3;
    double sg_threshold = 0.1;
    double ss_sharpness = 10.0; // the 10 in exp(-10 * f_RRG)
};

struct LossWeights {
    double recon = 1.0;
    double ss = 0.01;
    double rrg = 0.01;
    double sg = 0.0001;
    double ram = 0.1;
};

/// Graph-connected scalar terms; total = sum of weighted terms.
struct LossTerms {
    ad::Tensor recon, ss, rrg, sg, ram, total;
};

struct LossBreakdown {
    double recon = 0, ss = 0, rrg = 0, sg = 0, ram = 0, total = 0;
};

/// mean |R*S - I| with the 1-channel shading broadcast over channels.
ad::Tensor l_recon(const ad::Tensor& reflectance, const ad::Tensor& shading,
                   const ad::Tensor& input);

/// mean |grad-magnitude(S) * exp(-k * mean_c f_RRG(I))|; the feature weight
/// is a constant (no gradient reaches the input through it).
ad::Tensor l_ss(const ad::Tensor& shading, const ad::Tensor& input, const FeatureConfig& fc);

/// mean |f_RRG(R) - f_RRG(I)|, with f_RRG(R) rebuilt from differentiable ops.
ad::Tensor l_rrg(const ad::Tensor& reflectance, const ad::Tensor& input,
                 const FeatureConfig& fc);

/// Per gradient component: mean |(grad ln S - f'_SG(I)) * f'_SG(I)|, summed
/// over the x and y components.
ad::Tensor l_sg(const ad::Tensor& shading, const ad::Tensor& input, const FeatureConfig& fc);

/// mean |(R - f_RAM(I)) * f_RAM(I)|.
ad::Tensor l_ram(const ad::Tensor& reflectance, const ad::Tensor& input,
                 const FeatureConfig& fc);

LossTerms total_loss(const ad::Tensor& reflectance, const ad::Tensor& shading,
                     const ad::Tensor& input, const LossWeights& weights,
                     const FeatureConfig& fc);

LossBreakdown to_breakdown(const LossTerms& terms);

} // namespace iid::losses
