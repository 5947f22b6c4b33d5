#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "iid/autograd.hpp"
#include "iid/image.hpp"

namespace iid::net {

struct NetConfig {
    int trunk_blocks = 5;
    int trunk_filters = 64;
    int kernel = 3;
    int neck_filters = 32;
    std::array<int, 3> head_filters{16, 8, 4};
    double leaky_slope = 0.2;
    std::uint64_t seed = 0;

    bool operator==(const NetConfig&) const = default;
};

struct ConvLayer {
    std::string name;
    ad::Tensor kernel; // (Kh,Kw,Cin,Cout), leaf with gradients
    ad::Tensor bias;   // (Cout), leaf with gradients
};

struct NetworkParams {
    NetConfig config;
    std::vector<ConvLayer> layers; // order is fixed by the architecture
};

/// Trunk of `trunk_blocks` pad+conv+leaky_relu blocks over the 4-channel
/// (image ++ channel-max) input, a neck block, then two parallel heads whose
/// hidden blocks follow head_filters and whose sigmoid outputs are 3-channel
/// reflectance and 1-channel shading. Weights are uniform ±sqrt(6/fan_in),
/// biases zero, drawn from config.seed.
NetworkParams build(const NetConfig& config);

long long parameter_count(const NetworkParams& params);

struct Decomposition {
    ad::Tensor reflectance; // (N,H,W,3) in (0,1)
    ad::Tensor shading;     // (N,H,W,1) in (0,1)
};

/// Full forward pass; spatial size is preserved. images is (N,H,W,3), H,W >= 8.
Decomposition forward(const NetworkParams& params, const ad::Tensor& images);

/// Packs 3-channel images of equal size into an (N,H,W,3) constant tensor.
ad::Tensor pack_batch(std::span<const img::ImageTensor> images, bool requires_grad = false);

/// Binary container: "IIDNET1", config, named float64 arrays, named raw
/// blobs, FNV-1a checksum. load verifies the checksum; the expected-config
/// overload also rejects mismatched architectures.
void save_weights(const NetworkParams& params, const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::vector<double>>>& extra_arrays = {},
                  const std::vector<std::pair<std::string, std::string>>& extra_blobs = {});

struct LoadedNetwork {
    NetworkParams params;
    std::vector<std::pair<std::string, std::vector<double>>> extra_arrays;
    std::vector<std::pair<std::string, std::string>> extra_blobs;
};

LoadedNetwork load_weights(const std::filesystem::path& path);
LoadedNetwork load_weights(const std::filesystem::path& path, const NetConfig& expected);

} // namespace iid::net
