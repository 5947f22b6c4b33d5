#include "iid/autograd.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_set>

#include <cblas.h>

#include "iid/errors.hpp"
#include "iid/parallel.hpp"

namespace iid::ad {

namespace detail {

struct Node {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;
    bool requires_grad = false;
    bool leaf = true;
    std::vector<std::shared_ptr<Node>> inputs;
    std::function<void(Node&)> backprop;

    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
    }
};

} // namespace detail

using detail::Node;

namespace {

std::shared_ptr<Node> make_leaf(const Shape& shape, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->shape = shape;
    n->data.assign(static_cast<size_t>(shape.count()), 0.0);
    n->requires_grad = requires_grad;
    if (requires_grad) n->ensure_grad();
    return n;
}

std::shared_ptr<Node> make_op(const Shape& shape, std::vector<std::shared_ptr<Node>> inputs) {
    auto n = std::make_shared<Node>();
    n->shape = shape;
    n->data.assign(static_cast<size_t>(shape.count()), 0.0);
    n->leaf = false;
    for (const auto& in : inputs) n->requires_grad = n->requires_grad || in->requires_grad;
    n->inputs = std::move(inputs);
    if (n->requires_grad) n->ensure_grad();
    return n;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!(a.shape() == b.shape()))
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

struct OpenBlasSingleThread {
    OpenBlasSingleThread() { openblas_set_num_threads(1); }
};
// Parallelism lives at the batch-item level; keep BLAS itself serial.
const OpenBlasSingleThread kBlasSetup;

} // namespace

Tensor Tensor::zeros(const Shape& shape, bool requires_grad) {
    return Tensor(make_leaf(shape, requires_grad));
}

Tensor Tensor::full(const Shape& shape, double value, bool requires_grad) {
    auto n = make_leaf(shape, requires_grad);
    std::fill(n->data.begin(), n->data.end(), value);
    return Tensor(std::move(n));
}

Tensor Tensor::from_data(const Shape& shape, std::vector<double> values, bool requires_grad) {
    if (static_cast<long long>(values.size()) != shape.count())
        throw std::invalid_argument("from_data: value count does not match shape");
    auto n = make_leaf(shape, requires_grad);
    n->data = std::move(values);
    return Tensor(std::move(n));
}

const Shape& Tensor::shape() const { return node->shape; }
std::span<const double> Tensor::data() const { return node->data; }
std::span<double> Tensor::mutable_data() { return node->data; }
bool Tensor::requires_grad() const { return node->requires_grad; }
bool Tensor::is_leaf() const { return node->leaf; }

std::span<const double> Tensor::grad() const {
    if (!node->requires_grad) throw std::logic_error("tensor does not track gradients");
    node->ensure_grad();
    return node->grad;
}

void Tensor::zero_grad() {
    if (node->requires_grad) {
        node->ensure_grad();
        std::fill(node->grad.begin(), node->grad.end(), 0.0);
    }
}

double Tensor::scalar() const {
    if (node->shape.count() != 1) throw std::logic_error("scalar() on a non-scalar tensor");
    return node->data[0];
}

// ---------------------------------------------------------------------------
// Elementwise ops

namespace {

/// Wires a unary elementwise op: fwd(x) and dfdx(x, y) evaluated pointwise.
template <typename Fwd, typename Dfdx>
Tensor unary_op(const Tensor& a, Fwd fwd, Dfdx dfdx) {
    auto n = make_op(a.shape(), {a.node});
    const auto& x = a.data();
    for (size_t i = 0; i < n->data.size(); ++i) n->data[i] = fwd(x[i]);
    if (n->requires_grad) {
        n->backprop = [dfdx](Node& self) {
            Node& input = *self.inputs[0];
            if (!input.requires_grad) return;
            input.ensure_grad();
            for (size_t i = 0; i < self.data.size(); ++i)
                input.grad[i] += self.grad[i] * dfdx(input.data[i], self.data[i]);
        };
    }
    return Tensor(std::move(n));
}

} // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    auto n = make_op(a.shape(), {a.node, b.node});
    for (size_t i = 0; i < n->data.size(); ++i) n->data[i] = a.data()[i] + b.data()[i];
    if (n->requires_grad) {
        n->backprop = [](Node& self) {
            for (int k = 0; k < 2; ++k) {
                Node& input = *self.inputs[k];
                if (!input.requires_grad) continue;
                input.ensure_grad();
                for (size_t i = 0; i < self.data.size(); ++i) input.grad[i] += self.grad[i];
            }
        };
    }
    return Tensor(std::move(n));
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    auto n = make_op(a.shape(), {a.node, b.node});
    for (size_t i = 0; i < n->data.size(); ++i) n->data[i] = a.data()[i] - b.data()[i];
    if (n->requires_grad) {
        n->backprop = [](Node& self) {
            Node& lhs = *self.inputs[0];
            if (lhs.requires_grad) {
                lhs.ensure_grad();
                for (size_t i = 0; i < self.data.size(); ++i) lhs.grad[i] += self.grad[i];
            }
            Node& rhs = *self.inputs[1];
            if (rhs.requires_grad) {
                rhs.ensure_grad();
                for (size_t i = 0; i < self.data.size(); ++i) rhs.grad[i] -= self.grad[i];
            }
        };
    }
    return Tensor(std::move(n));
}

Tensor mul(const Tensor& a, const Tensor& b) {
    const Shape& sa = a.shape();
    const Shape& sb = b.shape();
    bool same = sa == sb;
    bool a_bcast = sa.c == 1 && sb.c > 1 && sa.n == sb.n && sa.h == sb.h && sa.w == sb.w;
    bool b_bcast = sb.c == 1 && sa.c > 1 && sa.n == sb.n && sa.h == sb.h && sa.w == sb.w;
    if (!same && !a_bcast && !b_bcast) throw std::invalid_argument("mul: incompatible shapes");

    Shape out = same ? sa : (a_bcast ? sb : sa);
    auto n = make_op(out, {a.node, b.node});
    size_t pixels = static_cast<size_t>(out.n) * out.h * out.w;
    int channels = out.c;
    const auto& da = a.data();
    const auto& db = b.data();
    for (size_t p = 0; p < pixels; ++p)
        for (int c = 0; c < channels; ++c)
            n->data[p * channels + c] =
                da[a_bcast ? p : p * channels + c] * db[b_bcast ? p : p * channels + c];

    if (n->requires_grad) {
        n->backprop = [a_bcast, b_bcast, channels, pixels](Node& self) {
            Node& lhs = *self.inputs[0];
            Node& rhs = *self.inputs[1];
            if (lhs.requires_grad) {
                lhs.ensure_grad();
                for (size_t p = 0; p < pixels; ++p)
                    for (int c = 0; c < channels; ++c)
                        lhs.grad[a_bcast ? p : p * channels + c] +=
                            self.grad[p * channels + c] *
                            rhs.data[b_bcast ? p : p * channels + c];
            }
            if (rhs.requires_grad) {
                rhs.ensure_grad();
                for (size_t p = 0; p < pixels; ++p)
                    for (int c = 0; c < channels; ++c)
                        rhs.grad[b_bcast ? p : p * channels + c] +=
                            self.grad[p * channels + c] *
                            lhs.data[a_bcast ? p : p * channels + c];
            }
        };
    }
    return Tensor(std::move(n));
}

Tensor scalar_mul(const Tensor& a, double s) {
    return unary_op(
        a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor exp(const Tensor& a) {
    return unary_op(
        a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("log: eps must be positive");
    return unary_op(
        a, [eps](double x) { return std::log(std::max(x, eps)); },
        [eps](double x, double) { return x >= eps ? 1.0 / x : 0.0; });
}

Tensor sqrt(const Tensor& a) {
    return unary_op(
        a, [](double x) { return std::sqrt(std::max(x, 0.0)); },
        [](double x, double y) { return x > 0.0 ? 0.5 / y : 0.0; });
}

Tensor abs(const Tensor& a) {
    return unary_op(
        a, [](double x) { return std::abs(x); },
        [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Tensor sigmoid(const Tensor& a) {
    return unary_op(
        a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor leaky_relu(const Tensor& a, double slope) {
    return unary_op(
        a, [slope](double x) { return x >= 0.0 ? x : slope * x; },
        [slope](double x, double) { return x >= 0.0 ? 1.0 : slope; });
}

Tensor mean(const Tensor& a) {
    auto n = make_op(Shape{1, 1, 1, 1}, {a.node});
    double acc = 0.0;
    for (double v : a.data()) acc += v;
    double count = static_cast<double>(a.shape().count());
    n->data[0] = acc / count;
    if (n->requires_grad) {
        n->backprop = [count](Node& self) {
            Node& input = *self.inputs[0];
            if (!input.requires_grad) return;
            input.ensure_grad();
            double g = self.grad[0] / count;
            for (double& v : input.grad) v += g;
        };
    }
    return Tensor(std::move(n));
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    const Shape& sa = a.shape();
    const Shape& sb = b.shape();
    if (sa.n != sb.n || sa.h != sb.h || sa.w != sb.w)
        throw std::invalid_argument("concat_channels: spatial shape mismatch");
    Shape out{sa.n, sa.h, sa.w, sa.c + sb.c};
    auto n = make_op(out, {a.node, b.node});
    size_t pixels = static_cast<size_t>(out.n) * out.h * out.w;
    for (size_t p = 0; p < pixels; ++p) {
        std::memcpy(&n->data[p * out.c], &a.data()[p * sa.c], sa.c * sizeof(double));
        std::memcpy(&n->data[p * out.c + sa.c], &b.data()[p * sb.c], sb.c * sizeof(double));
    }
    if (n->requires_grad) {
        int ca = sa.c, cb = sb.c;
        n->backprop = [pixels, ca, cb](Node& self) {
            int cc = ca + cb;
            Node& lhs = *self.inputs[0];
            if (lhs.requires_grad) {
                lhs.ensure_grad();
                for (size_t p = 0; p < pixels; ++p)
                    for (int c = 0; c < ca; ++c) lhs.grad[p * ca + c] += self.grad[p * cc + c];
            }
            Node& rhs = *self.inputs[1];
            if (rhs.requires_grad) {
                rhs.ensure_grad();
                for (size_t p = 0; p < pixels; ++p)
                    for (int c = 0; c < cb; ++c)
                        rhs.grad[p * cb + c] += self.grad[p * cc + ca + c];
            }
        };
    }
    return Tensor(std::move(n));
}

Tensor channel_max(const Tensor& a) {
    const Shape& s = a.shape();
    Shape out{s.n, s.h, s.w, 1};
    auto n = make_op(out, {a.node});
    size_t pixels = static_cast<size_t>(out.count());
    auto winners = std::make_shared<std::vector<int>>(pixels);
    for (size_t p = 0; p < pixels; ++p) {
        const double* px = &a.data()[p * s.c];
        int best = 0;
        for (int c = 1; c < s.c; ++c)
            if (px[c] > px[best]) best = c;
        (*winners)[p] = best;
        n->data[p] = px[best];
    }
    if (n->requires_grad) {
        int channels = s.c;
        n->backprop = [winners, channels, pixels](Node& self) {
            Node& input = *self.inputs[0];
            if (!input.requires_grad) return;
            input.ensure_grad();
            for (size_t p = 0; p < pixels; ++p)
                input.grad[p * channels + (*winners)[p]] += self.grad[p];
        };
    }
    return Tensor(std::move(n));
}

// ---------------------------------------------------------------------------
// Spatial ops

Tensor reflection_pad(const Tensor& a, int pad) {
    const Shape& s = a.shape();
    if (pad < 0) throw std::invalid_argument("reflection_pad: negative pad");
    if (pad >= s.h || pad >= s.w)
        throw std::invalid_argument("reflection_pad: pad too large for input");
    Shape out{s.n, s.h + 2 * pad, s.w + 2 * pad, s.c};
    auto n = make_op(out, {a.node});

    auto for_each = [s, out, pad](auto&& visit) {
        for (int b = 0; b < out.n; ++b) {
            size_t in_base = static_cast<size_t>(b) * s.h * s.w * s.c;
            size_t out_base = static_cast<size_t>(b) * out.h * out.w * out.c;
            for (int y = 0; y < out.h; ++y) {
                int sy = filters::reflect101(y - pad, s.h);
                for (int x = 0; x < out.w; ++x) {
                    int sx = filters::reflect101(x - pad, s.w);
                    size_t src = in_base + (static_cast<size_t>(sy) * s.w + sx) * s.c;
                    size_t dst = out_base + (static_cast<size_t>(y) * out.w + x) * s.c;
                    for (int c = 0; c < s.c; ++c) visit(src + c, dst + c);
                }
            }
        }
    };

    const auto& src_data = a.data();
    for_each([&](size_t src, size_t dst) { n->data[dst] = src_data[src]; });
    if (n->requires_grad) {
        n->backprop = [for_each](Node& self) {
            Node& input = *self.inputs[0];
            if (!input.requires_grad) return;
            input.ensure_grad();
            for_each([&](size_t src, size_t dst) { input.grad[src] += self.grad[dst]; });
        };
    }
    return Tensor(std::move(n));
}

namespace {

/// col is (Ho*Wo) x (Kh*Kw*Cin), row-major, for one batch item.
void im2col(const double* in, double* col, int h, int w, int cin, int kh, int kw) {
    int ho = h - kh + 1, wo = w - kw + 1;
    size_t k = static_cast<size_t>(kh) * kw * cin;
    for (int y = 0; y < ho; ++y) {
        for (int x = 0; x < wo; ++x) {
            double* row = col + (static_cast<size_t>(y) * wo + x) * k;
            for (int u = 0; u < kh; ++u)
                for (int v = 0; v < kw; ++v)
                    std::memcpy(row + (static_cast<size_t>(u) * kw + v) * cin,
                                in + (static_cast<size_t>(y + u) * w + (x + v)) * cin,
                                cin * sizeof(double));
        }
    }
}

void col2im_add(const double* col, double* in_grad, int h, int w, int cin, int kh, int kw) {
    int ho = h - kh + 1, wo = w - kw + 1;
    size_t k = static_cast<size_t>(kh) * kw * cin;
    for (int y = 0; y < ho; ++y) {
        for (int x = 0; x < wo; ++x) {
            const double* row = col + (static_cast<size_t>(y) * wo + x) * k;
            for (int u = 0; u < kh; ++u)
                for (int v = 0; v < kw; ++v) {
                    double* dst = in_grad + (static_cast<size_t>(y + u) * w + (x + v)) * cin;
                    const double* src = row + (static_cast<size_t>(u) * kw + v) * cin;
                    for (int c = 0; c < cin; ++c) dst[c] += src[c];
                }
        }
    }
}

} // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias) {
    const Shape& si = input.shape();
    const Shape& sk = kernel.shape(); // (Kh,Kw,Cin,Cout)
    int kh = sk.n, kw = sk.h, cin = sk.w, cout = sk.c;
    if (si.c != cin) throw std::invalid_argument("conv2d: channel mismatch");
    if (si.h < kh || si.w < kw) throw std::invalid_argument("conv2d: kernel larger than input");
    if (!(bias.shape() == Shape{1, 1, 1, cout}))
        throw std::invalid_argument("conv2d: bias shape mismatch");

    int ho = si.h - kh + 1, wo = si.w - kw + 1;
    Shape out{si.n, ho, wo, cout};
    auto n = make_op(out, {input.node, kernel.node, bias.node});

    long long rows = 1LL * ho * wo;
    long long k = 1LL * kh * kw * cin;
    size_t in_stride = static_cast<size_t>(si.h) * si.w * si.c;
    size_t out_stride = static_cast<size_t>(rows) * cout;

    const double* in_data = input.data().data();
    const double* k_data = kernel.data().data();
    const double* b_data = bias.data().data();

    if (kh == 1 && kw == 1) {
        // Sequential path: tiny selector/projection kernels stay bit-stable.
        parallel::parallel_for(si.n, [&](int b) {
            const double* in = in_data + b * in_stride;
            double* o = n->data.data() + b * out_stride;
            for (long long p = 0; p < rows; ++p)
                for (int co = 0; co < cout; ++co) {
                    double acc = b_data[co];
                    for (int ci = 0; ci < cin; ++ci) acc += in[p * cin + ci] * k_data[ci * cout + co];
                    o[p * cout + co] = acc;
                }
        });
    } else {
        parallel::parallel_for(si.n, [&](int b) {
            std::vector<double> col(static_cast<size_t>(rows) * k);
            im2col(in_data + b * in_stride, col.data(), si.h, si.w, cin, kh, kw);
            double* o = n->data.data() + b * out_stride;
            cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(rows), cout,
                        static_cast<int>(k), 1.0, col.data(), static_cast<int>(k), k_data, cout,
                        0.0, o, cout);
            for (long long p = 0; p < rows; ++p)
                for (int co = 0; co < cout; ++co) o[p * cout + co] += b_data[co];
        });
    }

    if (n->requires_grad) {
        Shape shape_in = si;
        n->backprop = [shape_in, kh, kw, cin, cout, rows, k, in_stride,
                       out_stride](Node& self) {
            Node& input = *self.inputs[0];
            Node& kernel = *self.inputs[1];
            Node& bias = *self.inputs[2];
            int batch = shape_in.n;

            bool need_din = input.requires_grad;
            bool need_dw = kernel.requires_grad;
            bool need_db = bias.requires_grad;
            if (need_din) input.ensure_grad();
            if (need_dw) kernel.ensure_grad();
            if (need_db) bias.ensure_grad();

            // Per-item kernel/bias gradients, reduced afterwards in item
            // order so the result is independent of the worker count.
            std::vector<std::vector<double>> dw_parts, db_parts;
            if (need_dw) dw_parts.assign(batch, std::vector<double>(kernel.data.size(), 0.0));
            if (need_db) db_parts.assign(batch, std::vector<double>(cout, 0.0));

            parallel::parallel_for(batch, [&](int b) {
                const double* g = self.grad.data() + b * out_stride;
                std::vector<double> col;
                if (need_dw || need_din) {
                    col.resize(static_cast<size_t>(rows) * k);
                }
                if (need_dw) {
                    im2col(input.data.data() + b * in_stride, col.data(), shape_in.h, shape_in.w,
                           cin, kh, kw);
                    cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, static_cast<int>(k),
                                cout, static_cast<int>(rows), 1.0, col.data(),
                                static_cast<int>(k), g, cout, 0.0, dw_parts[b].data(), cout);
                }
                if (need_db) {
                    for (long long p = 0; p < rows; ++p)
                        for (int co = 0; co < cout; ++co) db_parts[b][co] += g[p * cout + co];
                }
                if (need_din) {
                    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(rows),
                                static_cast<int>(k), cout, 1.0, g, cout, kernel.data.data(), cout,
                                0.0, col.data(), static_cast<int>(k));
                    col2im_add(col.data(), input.grad.data() + b * in_stride, shape_in.h,
                               shape_in.w, cin, kh, kw);
                }
            });

            for (int b = 0; b < batch; ++b) {
                if (need_dw)
                    for (size_t i = 0; i < kernel.grad.size(); ++i) kernel.grad[i] += dw_parts[b][i];
                if (need_db)
                    for (int co = 0; co < cout; ++co) bias.grad[co] += db_parts[b][co];
            }
        };
    }
    return Tensor(std::move(n));
}

Tensor fixed_conv2d(const Tensor& input, const filters::Kernel2D& kernel) {
    const Shape& s = input.shape();
    if (kernel.size > s.h || kernel.size > s.w)
        throw std::invalid_argument("fixed_conv2d: kernel larger than input");
    auto n = make_op(s, {input.node});
    size_t item = static_cast<size_t>(s.h) * s.w * s.c;
    const double* in_data = input.data().data();
    parallel::parallel_for(s.n, [&](int b) {
        filters::correlate_reflect101(in_data + b * item, n->data.data() + b * item, s.h, s.w,
                                      s.c, kernel);
    });
    if (n->requires_grad) {
        auto taps = std::make_shared<filters::Kernel2D>(kernel);
        n->backprop = [taps, s, item](Node& self) {
            Node& input = *self.inputs[0];
            if (!input.requires_grad) return;
            input.ensure_grad();
            parallel::parallel_for(s.n, [&](int b) {
                filters::correlate_reflect101_adjoint(self.grad.data() + b * item,
                                                      input.grad.data() + b * item, s.h, s.w,
                                                      s.c, *taps);
            });
        };
    }
    return Tensor(std::move(n));
}

// ---------------------------------------------------------------------------
// Backward

void backward(const Tensor& loss) {
    if (!loss.defined()) throw std::logic_error("backward: undefined tensor");
    Node* root = loss.node.get();
    if (root->shape.count() != 1) throw std::logic_error("backward: loss must be scalar");
    if (!root->requires_grad) return; // nothing reachable is tracked

    // Post-order DFS gives a topological order of the reachable subgraph.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, size_t>> stack{{root, 0}};
    seen.insert(root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->inputs.size()) {
            Node* child = node->inputs[next++].get();
            if (child->requires_grad && seen.insert(child).second) stack.push_back({child, 0});
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    // Non-leaf grads are per-pass scratch; leaves accumulate across passes.
    for (Node* node : order) {
        node->ensure_grad();
        if (!node->leaf) std::fill(node->grad.begin(), node->grad.end(), 0.0);
    }
    root->grad[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* node = *it;
        if (node->backprop) node->backprop(*node);
    }
}

// ---------------------------------------------------------------------------
// Gradient checking

GradCheckReport grad_check(const std::function<Tensor(const Tensor&)>& fn, const Tensor& point,
                           double h, double tol) {
    Tensor probe = Tensor::from_data(point.shape(),
                                     std::vector<double>(point.data().begin(), point.data().end()),
                                     /*requires_grad=*/true);
    Tensor loss = fn(probe);
    backward(loss);
    std::vector<double> analytic(probe.grad().begin(), probe.grad().end());

    GradCheckReport report;
    auto eval = [&fn](const Tensor& at) { return fn(at).scalar(); };
    std::vector<double> values(point.data().begin(), point.data().end());
    double f0 = eval(Tensor::from_data(point.shape(), values));
    for (size_t i = 0; i < values.size(); ++i) {
        double keep = values[i];
        values[i] = keep + h;
        double fp = eval(Tensor::from_data(point.shape(), values));
        values[i] = keep - h;
        double fm = eval(Tensor::from_data(point.shape(), values));
        values[i] = keep;

        double fwd = (fp - f0) / h;
        double bwd = (f0 - fm) / h;
        // One-sided slopes disagreeing badly marks a kink (|x| at 0); those
        // points are excluded rather than scored.
        if (std::abs(fwd - bwd) > 0.1 * std::max({1.0, std::abs(fwd), std::abs(bwd)})) {
            ++report.non_smooth;
            continue;
        }
        double numeric = (fp - fm) / (2.0 * h);
        double rel = std::abs(analytic[i] - numeric) /
                     std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
        report.max_rel_error = std::max(report.max_rel_error, rel);
        ++report.checked;
    }
    report.passed = report.checked > 0 && report.max_rel_error < tol;
    return report;
}

} // namespace iid::ad
