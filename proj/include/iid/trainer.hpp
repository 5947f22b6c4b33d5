#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "iid/image.hpp"
#include "iid/losses.hpp"
#include "iid/net.hpp"

namespace iid::train {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_hat = 1e-8;
};

struct AdamState {
    AdamConfig config;
    long long step = 0;
    // One m/v pair per parameter tensor, in layer order (kernel then bias).
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
};

AdamState make_adam_state(const net::NetworkParams& params, const AdamConfig& config = {});

/// Standard Adam with bias correction, applied elementwise from the
/// accumulated gradients of every parameter tensor.
void adam_step(net::NetworkParams& params, AdamState& state, double lr);

struct TrainConfig {
    int epochs = 100;
    int patches_per_epoch = 2000;
    int patch_size = 64;
    int batch_size = 16;
    double lr0 = 0.002;
    double decay = std::exp(-0.01); // multiplicative, applied per epoch
    std::uint64_t seed = 0;
    int checkpoint_interval = 10; // epochs; 0 disables intermediate checkpoints
    bool fixed_patch_pool = false; // reuse the epoch-0 crops instead of resampling
    losses::LossWeights weights;
    losses::FeatureConfig features;
    net::NetConfig net;
};

double lr_schedule(int epoch, const TrainConfig& config);

/// Runs the full loop: per epoch, sample and augment patches, batch them,
/// forward, composite loss, backward, Adam with the scheduled rate. Writes
/// out/train_log.csv, out/config.json, periodic out/epoch_%04d.iidnet
/// checkpoints (weights + optimizer + RNG state) and out/final.iidnet.
/// Deterministic for a fixed seed. resume_from continues a checkpoint and is
/// bit-identical to the uninterrupted run.
net::NetworkParams train(const std::vector<img::ImageTensor>& dataset, const TrainConfig& config,
                         const std::filesystem::path& out_dir,
                         const std::optional<std::filesystem::path>& resume_from = {});

/// Full-image forward pass detached to plain images (H,W >= 8).
std::pair<img::ImageTensor, img::ImageTensor> decompose(const net::NetworkParams& params,
                                                        const img::ImageTensor& image);

} // namespace iid::train
