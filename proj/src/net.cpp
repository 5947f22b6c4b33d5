#include "iid/net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "iid/errors.hpp"

namespace iid::net {
namespace {

struct LayerSpec {
    std::string name;
    int in_channels;
    int out_channels;
};

std::vector<LayerSpec> layer_plan(const NetConfig& c) {
    std::vector<LayerSpec> plan;
    int in = 4; // image ++ channel-max
    for (int i = 0; i < c.trunk_blocks; ++i) {
        plan.push_back({"trunk" + std::to_string(i + 1), in, c.trunk_filters});
        in = c.trunk_filters;
    }
    plan.push_back({"neck", in, c.neck_filters});
    for (const char* head : {"refl", "shad"}) {
        int hin = c.neck_filters;
        for (int i = 0; i < 3; ++i) {
            plan.push_back({std::string(head) + std::to_string(i + 1), hin, c.head_filters[i]});
            hin = c.head_filters[i];
        }
        plan.push_back({std::string(head) + "_out", hin, head == std::string("refl") ? 3 : 1});
    }
    return plan;
}

void validate(const NetConfig& c) {
    if (c.trunk_blocks <= 0 || c.trunk_filters <= 0 || c.neck_filters <= 0)
        throw DataError("net config: filter/block counts must be positive");
    for (int f : c.head_filters)
        if (f <= 0) throw DataError("net config: head filters must be positive");
    if (c.kernel <= 0 || c.kernel % 2 == 0) throw DataError("net config: kernel must be odd");
}

double uniform_pm(std::mt19937_64& rng, double bound) {
    double u = (rng() >> 11) * 0x1.0p-53; // [0,1)
    return (2.0 * u - 1.0) * bound;
}

} // namespace

NetworkParams build(const NetConfig& config) {
    validate(config);
    std::mt19937_64 rng(config.seed);
    NetworkParams params;
    params.config = config;
    int k = config.kernel;
    for (const LayerSpec& spec : layer_plan(config)) {
        ad::Shape kshape{k, k, spec.in_channels, spec.out_channels};
        std::vector<double> weights(static_cast<size_t>(kshape.count()));
        double bound = std::sqrt(6.0 / (static_cast<double>(k) * k * spec.in_channels));
        for (double& w : weights) w = uniform_pm(rng, bound);
        params.layers.push_back(
            {spec.name, ad::Tensor::from_data(kshape, std::move(weights), true),
             ad::Tensor::zeros({1, 1, 1, spec.out_channels}, true)});
    }
    return params;
}

long long parameter_count(const NetworkParams& params) {
    long long total = 0;
    for (const auto& layer : params.layers)
        total += layer.kernel.shape().count() + layer.bias.shape().count();
    return total;
}

namespace {

const ConvLayer& find_layer(const NetworkParams& p, const std::string& name) {
    for (const auto& l : p.layers)
        if (l.name == name) return l;
    throw std::logic_error("missing layer: " + name);
}

ad::Tensor block(const NetworkParams& p, const ad::Tensor& x, const std::string& name) {
    const ConvLayer& l = find_layer(p, name);
    int pad = p.config.kernel / 2;
    return ad::leaky_relu(ad::conv2d(ad::reflection_pad(x, pad), l.kernel, l.bias),
                          p.config.leaky_slope);
}

ad::Tensor head_output(const NetworkParams& p, const ad::Tensor& neck, const char* head) {
    ad::Tensor x = neck;
    for (int i = 0; i < 3; ++i) x = block(p, x, std::string(head) + std::to_string(i + 1));
    const ConvLayer& out = find_layer(p, std::string(head) + "_out");
    int pad = p.config.kernel / 2;
    return ad::sigmoid(ad::conv2d(ad::reflection_pad(x, pad), out.kernel, out.bias));
}

} // namespace

Decomposition forward(const NetworkParams& params, const ad::Tensor& images) {
    const ad::Shape& s = images.shape();
    if (s.c != 3) throw DataError("forward expects 3-channel images");
    if (s.h < 8 || s.w < 8) throw DataError("forward expects images of at least 8x8");

    ad::Tensor x = ad::concat_channels(images, ad::channel_max(images));
    for (int i = 0; i < params.config.trunk_blocks; ++i)
        x = block(params, x, "trunk" + std::to_string(i + 1));
    x = block(params, x, "neck");
    return {head_output(params, x, "refl"), head_output(params, x, "shad")};
}

ad::Tensor pack_batch(std::span<const img::ImageTensor> images, bool requires_grad) {
    if (images.empty()) throw DataError("pack_batch: empty batch");
    const auto& first = images.front();
    if (first.channels != 3) throw DataError("pack_batch expects 3-channel images");
    ad::Shape shape{static_cast<int>(images.size()), first.height, first.width, 3};
    std::vector<double> values;
    values.reserve(static_cast<size_t>(shape.count()));
    for (const auto& image : images) {
        if (!image.same_shape(first)) throw DataError("pack_batch: mixed image shapes");
        values.insert(values.end(), image.data.begin(), image.data.end());
    }
    return ad::Tensor::from_data(shape, std::move(values), requires_grad);
}

// ---------------------------------------------------------------------------
// Weight container

namespace {

constexpr char kMagic[7] = {'I', 'I', 'D', 'N', 'E', 'T', '1'};

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 1099511628211ULL;
    }
    return hash;
}

struct Writer {
    std::string out;
    void bytes(const void* p, size_t n) { out.append(static_cast<const char*>(p), n); }
    void u16(std::uint16_t v) {
        unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
        bytes(b, 2);
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void str(const std::string& s) {
        u16(static_cast<std::uint16_t>(s.size()));
        bytes(s.data(), s.size());
    }
};

struct Reader {
    const std::string& in;
    size_t pos = 0;
    const std::filesystem::path& path;

    void need(size_t n) const {
        if (pos + n > in.size())
            throw DataError("truncated or corrupt weight file: " + path.string());
    }
    std::uint16_t u16() {
        need(2);
        auto v = std::uint16_t(static_cast<unsigned char>(in[pos])) |
                 std::uint16_t(static_cast<unsigned char>(in[pos + 1])) << 8;
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(in[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(in[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string str() {
        size_t n = u16();
        need(n);
        std::string s = in.substr(pos, n);
        pos += n;
        return s;
    }
};

void write_config(Writer& w, const NetConfig& c) {
    w.u32(static_cast<std::uint32_t>(c.trunk_blocks));
    w.u32(static_cast<std::uint32_t>(c.trunk_filters));
    w.u32(static_cast<std::uint32_t>(c.kernel));
    w.u32(static_cast<std::uint32_t>(c.neck_filters));
    for (int f : c.head_filters) w.u32(static_cast<std::uint32_t>(f));
    w.f64(c.leaky_slope);
    w.u64(c.seed);
}

NetConfig read_config(Reader& r) {
    NetConfig c;
    c.trunk_blocks = static_cast<int>(r.u32());
    c.trunk_filters = static_cast<int>(r.u32());
    c.kernel = static_cast<int>(r.u32());
    c.neck_filters = static_cast<int>(r.u32());
    for (int& f : c.head_filters) f = static_cast<int>(r.u32());
    c.leaky_slope = r.f64();
    c.seed = r.u64();
    return c;
}

} // namespace

void save_weights(const NetworkParams& params, const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::vector<double>>>& extra_arrays,
                  const std::vector<std::pair<std::string, std::string>>& extra_blobs) {
    for (const auto& layer : params.layers) {
        for (double v : layer.kernel.data())
            if (!std::isfinite(v)) throw NumericError("non-finite weight in " + layer.name);
        for (double v : layer.bias.data())
            if (!std::isfinite(v)) throw NumericError("non-finite bias in " + layer.name);
    }

    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    write_config(w, params.config);

    auto write_array = [&w](const std::string& name, const ad::Shape& shape,
                            std::span<const double> values) {
        w.str(name);
        w.u32(static_cast<std::uint32_t>(shape.n));
        w.u32(static_cast<std::uint32_t>(shape.h));
        w.u32(static_cast<std::uint32_t>(shape.w));
        w.u32(static_cast<std::uint32_t>(shape.c));
        for (double v : values) w.f64(v);
    };

    w.u32(static_cast<std::uint32_t>(params.layers.size() * 2 + extra_arrays.size()));
    for (const auto& layer : params.layers) {
        write_array(layer.name + ".kernel", layer.kernel.shape(), layer.kernel.data());
        write_array(layer.name + ".bias", layer.bias.shape(), layer.bias.data());
    }
    for (const auto& [name, values] : extra_arrays)
        write_array(name, ad::Shape{1, 1, 1, static_cast<int>(values.size())}, values);

    w.u32(static_cast<std::uint32_t>(extra_blobs.size()));
    for (const auto& [name, blob] : extra_blobs) {
        w.str(name);
        w.u64(blob.size());
        w.bytes(blob.data(), blob.size());
    }

    w.u64(fnv1a(w.out));

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out.write(w.out.data(), static_cast<std::streamsize>(w.out.size()));
    if (!out) throw DataError("write failed: " + path.string());
}

LoadedNetwork load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open weight file: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < sizeof(kMagic) + 8 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
        throw DataError("not an IIDNET1 weight file: " + path.string());

    std::uint64_t stored = 0;
    for (int i = 0; i < 8; ++i)
        stored |= std::uint64_t(static_cast<unsigned char>(bytes[bytes.size() - 8 + i])) << (8 * i);
    std::string body = bytes.substr(0, bytes.size() - 8);
    if (fnv1a(body) != stored)
        throw DataError("checksum mismatch (truncated or corrupt): " + path.string());

    Reader r{body, sizeof kMagic, path};
    NetConfig config = read_config(r);

    // Rebuild the architecture, then overwrite every parameter from the file.
    LoadedNetwork loaded;
    loaded.params = build(config);

    std::uint32_t n_arrays = r.u32();
    std::vector<std::pair<std::string, std::vector<double>>> arrays;
    for (std::uint32_t i = 0; i < n_arrays; ++i) {
        std::string name = r.str();
        ad::Shape shape{static_cast<int>(r.u32()), static_cast<int>(r.u32()),
                        static_cast<int>(r.u32()), static_cast<int>(r.u32())};
        if (shape.count() < 0 || shape.count() > (1LL << 32))
            throw DataError("implausible array size in weight file: " + path.string());
        std::vector<double> values(static_cast<size_t>(shape.count()));
        for (double& v : values) v = r.f64();
        arrays.emplace_back(std::move(name), std::move(values));
    }

    std::uint32_t n_blobs = r.u32();
    for (std::uint32_t i = 0; i < n_blobs; ++i) {
        std::string name = r.str();
        std::uint64_t size = r.u64();
        r.need(size);
        loaded.extra_blobs.emplace_back(std::move(name),
                                        body.substr(r.pos, static_cast<size_t>(size)));
        r.pos += static_cast<size_t>(size);
    }

    auto take = [&arrays](const std::string& name) -> std::vector<double>* {
        for (auto& [n, v] : arrays)
            if (n == name) return &v;
        return nullptr;
    };
    for (auto& layer : loaded.params.layers) {
        std::vector<double>* kv = take(layer.name + ".kernel");
        std::vector<double>* bv = take(layer.name + ".bias");
        if (!kv || !bv) throw DataError("missing layer arrays in weight file: " + layer.name);
        if (kv->size() != layer.kernel.data().size() || bv->size() != layer.bias.data().size())
            throw DataError("array size mismatch in weight file: " + layer.name);
        std::copy(kv->begin(), kv->end(), layer.kernel.mutable_data().begin());
        std::copy(bv->begin(), bv->end(), layer.bias.mutable_data().begin());
        kv->clear();
        bv->clear();
    }
    for (auto& [name, values] : arrays)
        if (!values.empty()) loaded.extra_arrays.emplace_back(std::move(name), std::move(values));
    return loaded;
}

LoadedNetwork load_weights(const std::filesystem::path& path, const NetConfig& expected) {
    LoadedNetwork loaded = load_weights(path);
    if (!(loaded.params.config == expected))
        throw DataError("weight file config does not match the requested architecture: " +
                        path.string());
    return loaded;
}

} // namespace iid::net
