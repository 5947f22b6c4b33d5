#include "iid/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "iid/errors.hpp"

namespace iid::train {
namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void apply_adam(std::span<double> values, std::span<const double> grads, std::vector<double>& m,
                std::vector<double>& v, const AdamConfig& c, long long t, double lr) {
    double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(t));
    for (size_t i = 0; i < values.size(); ++i) {
        double g = grads[i];
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
        double m_hat = m[i] / bc1;
        double v_hat = v[i] / bc2;
        values[i] -= lr * m_hat / (std::sqrt(v_hat) + c.eps_hat);
    }
}

} // namespace

AdamState make_adam_state(const net::NetworkParams& params, const AdamConfig& config) {
    AdamState state;
    state.config = config;
    for (const auto& layer : params.layers) {
        state.m.emplace_back(layer.kernel.data().size(), 0.0);
        state.v.emplace_back(layer.kernel.data().size(), 0.0);
        state.m.emplace_back(layer.bias.data().size(), 0.0);
        state.v.emplace_back(layer.bias.data().size(), 0.0);
    }
    return state;
}

void adam_step(net::NetworkParams& params, AdamState& state, double lr) {
    if (lr <= 0.0) throw DataError("adam_step: learning rate must be positive");
    if (state.m.size() != params.layers.size() * 2)
        throw DataError("adam_step: optimizer state does not match the parameter list");
    ++state.step;
    size_t slot = 0;
    for (auto& layer : params.layers) {
        apply_adam(layer.kernel.mutable_data(), layer.kernel.grad(), state.m[slot], state.v[slot],
                   state.config, state.step, lr);
        ++slot;
        apply_adam(layer.bias.mutable_data(), layer.bias.grad(), state.m[slot], state.v[slot],
                   state.config, state.step, lr);
        ++slot;
    }
}

double lr_schedule(int epoch, const TrainConfig& config) {
    if (epoch < 0) throw DataError("lr_schedule: negative epoch");
    return config.lr0 * std::pow(config.decay, static_cast<double>(epoch));
}

namespace {

struct PatchPick {
    int image;
    int row;
    int col;
    img::AugmentOp op;
};

std::vector<PatchPick> draw_picks(std::mt19937_64& rng, const std::vector<int>& usable,
                                  const std::vector<img::ImageTensor>& dataset,
                                  const TrainConfig& cfg) {
    std::vector<PatchPick> picks;
    picks.reserve(cfg.patches_per_epoch);
    for (int i = 0; i < cfg.patches_per_epoch; ++i) {
        int idx = usable[img::bounded(rng, usable.size())];
        const auto& image = dataset[idx];
        int row = static_cast<int>(img::bounded(rng, image.height - cfg.patch_size + 1));
        int col = static_cast<int>(img::bounded(rng, image.width - cfg.patch_size + 1));
        picks.push_back({idx, row, col, img::random_augment_op(rng)});
    }
    return picks;
}

std::string serialize_rng(const std::mt19937_64& rng) {
    std::ostringstream out;
    out << rng;
    return out.str();
}

void restore_rng(std::mt19937_64& rng, const std::string& blob) {
    std::istringstream in(blob);
    in >> rng;
    if (!in) throw DataError("corrupt RNG state in checkpoint");
}

nlohmann::json config_json(const TrainConfig& c) {
    return {
        {"epochs", c.epochs},
        {"patches_per_epoch", c.patches_per_epoch},
        {"patch_size", c.patch_size},
        {"batch_size", c.batch_size},
        {"lr0", c.lr0},
        {"decay", c.decay},
        {"seed", c.seed},
        {"checkpoint_interval", c.checkpoint_interval},
        {"fixed_patch_pool", c.fixed_patch_pool},
        {"loss_weights",
         {{"recon", c.weights.recon},
          {"ss", c.weights.ss},
          {"rrg", c.weights.rrg},
          {"sg", c.weights.sg},
          {"ram", c.weights.ram}}},
        {"features",
         {{"sigma", c.features.sigma},
          {"eps", c.features.eps},
          {"sg_threshold", c.features.sg_threshold},
          {"ss_sharpness", c.features.ss_sharpness}}},
        {"net",
         {{"trunk_blocks", c.net.trunk_blocks},
          {"trunk_filters", c.net.trunk_filters},
          {"kernel", c.net.kernel},
          {"neck_filters", c.net.neck_filters},
          {"head_filters", c.net.head_filters},
          {"leaky_slope", c.net.leaky_slope},
          {"seed", c.net.seed}}},
    };
}

void write_checkpoint(const std::filesystem::path& path, const net::NetworkParams& params,
                      const AdamState& adam, int next_epoch, const std::mt19937_64& rng) {
    std::vector<std::pair<std::string, std::vector<double>>> arrays;
    for (size_t slot = 0; slot < adam.m.size(); ++slot) {
        arrays.emplace_back("adam.m." + std::to_string(slot), adam.m[slot]);
        arrays.emplace_back("adam.v." + std::to_string(slot), adam.v[slot]);
    }
    std::vector<std::pair<std::string, std::string>> blobs;
    blobs.emplace_back("rng", serialize_rng(rng));
    blobs.emplace_back("train_state", std::to_string(next_epoch) + " " +
                                          std::to_string(adam.step));
    net::save_weights(params, path, arrays, blobs);
}

} // namespace

net::NetworkParams train(const std::vector<img::ImageTensor>& dataset, const TrainConfig& config,
                         const std::filesystem::path& out_dir,
                         const std::optional<std::filesystem::path>& resume_from) {
    if (dataset.empty()) throw DataError("train: empty dataset");
    std::vector<int> usable;
    for (size_t i = 0; i < dataset.size(); ++i) {
        const auto& image = dataset[i];
        if (image.channels != 3) throw DataError("train: dataset images must be 3-channel");
        if (image.height < config.patch_size || image.width < config.patch_size) {
            std::cerr << "warning: skipping image " << i << " smaller than the patch size\n";
            continue;
        }
        usable.push_back(static_cast<int>(i));
    }
    if (usable.empty()) throw DataError("train: every image is smaller than the patch size");

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream cfg(out_dir / "config.json");
        cfg << config_json(config).dump(2) << '\n';
    }

    net::NetworkParams params = net::build(config.net);
    AdamState adam = make_adam_state(params);
    std::mt19937_64 rng(config.seed);
    int start_epoch = 0;

    if (resume_from) {
        net::LoadedNetwork loaded = net::load_weights(*resume_from, config.net);
        params = std::move(loaded.params);
        adam = make_adam_state(params);
        for (auto& [name, values] : loaded.extra_arrays) {
            if (name.rfind("adam.m.", 0) == 0)
                adam.m[std::stoul(name.substr(7))] = std::move(values);
            else if (name.rfind("adam.v.", 0) == 0)
                adam.v[std::stoul(name.substr(7))] = std::move(values);
        }
        for (auto& [name, blob] : loaded.extra_blobs) {
            if (name == "rng") restore_rng(rng, blob);
            if (name == "train_state") {
                std::istringstream in(blob);
                in >> start_epoch >> adam.step;
            }
        }
        if (start_epoch <= 0 || start_epoch >= config.epochs)
            throw DataError("checkpoint is not resumable within the configured epochs");
    }

    bool log_existed = std::filesystem::exists(out_dir / "train_log.csv");
    std::ofstream log(out_dir / "train_log.csv",
                      resume_from ? std::ios::app : std::ios::out);
    if (!log) throw DataError("cannot open training log in " + out_dir.string());
    if (!resume_from || !log_existed) log << "epoch,step,recon,ss,rrg,sg,ram,total,lr\n";

    // The fixed pool draws from its own stream so a resumed run rebuilds the
    // same crops without disturbing the restored per-epoch stream.
    std::vector<PatchPick> pool;
    if (config.fixed_patch_pool) {
        std::mt19937_64 pool_rng(config.seed);
        pool = draw_picks(pool_rng, usable, dataset, config);
    }

    for (int epoch = start_epoch; epoch < config.epochs; ++epoch) {
        double lr = lr_schedule(epoch, config);
        std::vector<PatchPick> picks =
            config.fixed_patch_pool ? pool : draw_picks(rng, usable, dataset, config);
        if (config.fixed_patch_pool) {
            // Fixed crops, fresh augmentation each epoch.
            for (auto& pick : picks) pick.op = img::random_augment_op(rng);
        }

        int step = 0;
        for (size_t offset = 0; offset < picks.size(); offset += config.batch_size, ++step) {
            size_t count = std::min<size_t>(config.batch_size, picks.size() - offset);
            std::vector<img::ImageTensor> batch;
            batch.reserve(count);
            for (size_t i = 0; i < count; ++i) {
                const PatchPick& pick = picks[offset + i];
                img::Patch patch{"", pick.row, pick.col,
                                 img::extract_patch(dataset[pick.image], pick.row, pick.col,
                                                    config.patch_size)};
                batch.push_back(img::augment(patch, pick.op).tensor);
            }

            ad::Tensor input = net::pack_batch(batch);
            net::Decomposition out = net::forward(params, input);
            losses::LossTerms terms =
                losses::total_loss(out.reflectance, out.shading, input, config.weights,
                                   config.features);
            losses::LossBreakdown b = losses::to_breakdown(terms);
            if (!std::isfinite(b.total))
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                                   " step " + std::to_string(step));

            for (auto& layer : params.layers) {
                layer.kernel.zero_grad();
                layer.bias.zero_grad();
            }
            ad::backward(terms.total);
            adam_step(params, adam, lr);

            for (const auto& layer : params.layers)
                for (double v : layer.kernel.data())
                    if (!std::isfinite(v))
                        throw NumericError("non-finite parameter in " + layer.name +
                                           " at epoch " + std::to_string(epoch));

            log << epoch << ',' << step << ',' << fmt(b.recon) << ',' << fmt(b.ss) << ','
                << fmt(b.rrg) << ',' << fmt(b.sg) << ',' << fmt(b.ram) << ',' << fmt(b.total)
                << ',' << fmt(lr) << '\n';
        }
        log.flush();

        if (config.checkpoint_interval > 0 && (epoch + 1) % config.checkpoint_interval == 0 &&
            epoch + 1 < config.epochs) {
            char name[32];
            std::snprintf(name, sizeof name, "epoch_%04d.iidnet", epoch + 1);
            write_checkpoint(out_dir / name, params, adam, epoch + 1, rng);
        }
    }

    net::save_weights(params, out_dir / "final.iidnet");
    return params;
}

std::pair<img::ImageTensor, img::ImageTensor> decompose(const net::NetworkParams& params,
                                                        const img::ImageTensor& image) {
    if (image.height < 8 || image.width < 8)
        throw DataError("decompose: image smaller than the network's minimum size (8x8)");
    ad::Tensor input = net::pack_batch(std::span(&image, 1));
    net::Decomposition out = net::forward(params, input);

    img::ImageTensor reflectance(image.height, image.width, 3);
    std::copy(out.reflectance.data().begin(), out.reflectance.data().end(),
              reflectance.data.begin());
    img::ImageTensor shading(image.height, image.width, 1);
    std::copy(out.shading.data().begin(), out.shading.data().end(), shading.data.begin());
    return {std::move(reflectance), std::move(shading)};
}

} // namespace iid::train
