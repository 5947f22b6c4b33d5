#include "iid/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "iid/errors.hpp"
#include "iid/filters.hpp"

namespace iid::metrics {
namespace {

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* who) {
    if (!a.same_shape(b)) throw DataError(std::string(who) + ": image shape mismatch");
}

double mse255(const ImageTensor& a, const ImageTensor& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        double d = 255.0 * (a.data[i] - b.data[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(a.data.size());
}

} // namespace

double rmse(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "rmse");
    return std::sqrt(mse255(a, b));
}

double psnr(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "psnr");
    double mse = mse255(a, b);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "ssim");
    constexpr int kWindow = 11;
    constexpr double kSigma = 1.5, kK1 = 0.01, kK2 = 0.03, kRange = 1.0;
    if (a.height < kWindow || a.width < kWindow)
        throw DataError("ssim: image smaller than the 11x11 window");

    filters::Kernel2D window = filters::gaussian_kernel(kSigma, kWindow);
    const int r = window.radius();
    const double c1 = (kK1 * kRange) * (kK1 * kRange);
    const double c2 = (kK2 * kRange) * (kK2 * kRange);

    double channel_sum = 0.0;
    for (int c = 0; c < a.channels; ++c) {
        double acc = 0.0;
        long long count = 0;
        for (int y = r; y < a.height - r; ++y) {
            for (int x = r; x < a.width - r; ++x) {
                double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
                for (int u = 0; u < kWindow; ++u) {
                    for (int v = 0; v < kWindow; ++v) {
                        double wgt = window.at(u, v);
                        double va = a.at(y + u - r, x + v - r, c);
                        double vb = b.at(y + u - r, x + v - r, c);
                        ma += wgt * va;
                        mb += wgt * vb;
                        saa += wgt * va * va;
                        sbb += wgt * vb * vb;
                        sab += wgt * va * vb;
                    }
                }
                double var_a = saa - ma * ma;
                double var_b = sbb - mb * mb;
                double cov = sab - ma * mb;
                acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                       ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
                ++count;
            }
        }
        channel_sum += acc / static_cast<double>(count);
    }
    return channel_sum / a.channels;
}

MetricReport evaluate(const std::vector<std::tuple<std::string, ImageTensor, ImageTensor>>& pairs,
                      const std::string& label) {
    if (pairs.empty()) throw DataError("evaluate: empty pair list");
    MetricReport report;
    report.label = label;
    for (const auto& [id, produced, reference] : pairs) {
        if (!produced.same_shape(reference))
            throw DataError("evaluate: size mismatch for pair '" + id + "'");
        report.rows.push_back({id, rmse(produced, reference), psnr(produced, reference),
                               ssim(produced, reference)});
    }
    for (const auto& row : report.rows) {
        report.mean_rmse += row.rmse;
        report.mean_psnr += row.psnr;
        report.mean_ssim += row.ssim;
    }
    double n = static_cast<double>(report.rows.size());
    report.mean_rmse /= n;
    report.mean_psnr /= n;
    report.mean_ssim /= n;
    return report;
}

namespace {

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json json_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf"; // JSON has no infinity
    return v;
}

} // namespace

void write_csv(const MetricReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << "id,rmse,psnr,ssim\n";
    for (const auto& row : report.rows)
        out << row.id << ',' << fmt(row.rmse) << ',' << fmt(row.psnr) << ',' << fmt(row.ssim)
            << '\n';
}

void write_json(const MetricReport& report, const std::filesystem::path& path) {
    nlohmann::json j;
    j["label"] = report.label;
    j["scale"] = report.scale_note;
    j["count"] = report.rows.size();
    j["mean"] = {{"rmse", json_number(report.mean_rmse)},
                 {"psnr", json_number(report.mean_psnr)},
                 {"ssim", json_number(report.mean_ssim)}};
    // NIQE needs a pretrained natural-scene model; column reserved, unfilled.
    j["mean"]["niqe"] = nullptr;
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace iid::metrics
