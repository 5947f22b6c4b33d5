#pragma once

#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

#include "iid/image.hpp"

namespace iid::metrics {

using img::ImageTensor;

/// sqrt(mean((255a - 255b)^2)); reported on the 0-255 scale.
double rmse(const ImageTensor& a, const ImageTensor& b);

/// 10*log10(255^2 / MSE) on the 0-255 scale; +infinity for identical images.
double psnr(const ImageTensor& a, const ImageTensor& b);

/// Mean local SSIM, 11x11 Gaussian window sigma 1.5, K1=0.01, K2=0.03,
/// dynamic range 1.0, computed per channel over the valid (full-window)
/// region and averaged over channels.
double ssim(const ImageTensor& a, const ImageTensor& b);

struct MetricRow {
    std::string id;
    double rmse = 0;
    double psnr = 0;
    double ssim = 0;
};

struct MetricReport {
    std::string label;
    std::vector<MetricRow> rows;
    double mean_rmse = 0;
    double mean_psnr = 0;
    double mean_ssim = 0;
    std::string scale_note = "0-255";
};

/// Per-image metrics plus arithmetic means of the rows.
MetricReport evaluate(const std::vector<std::tuple<std::string, ImageTensor, ImageTensor>>& pairs,
                      const std::string& label);

void write_csv(const MetricReport& report, const std::filesystem::path& path);
void write_json(const MetricReport& report, const std::filesystem::path& path);

} // namespace iid::metrics
