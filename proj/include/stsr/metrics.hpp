#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stsr/raster.hpp"

namespace stsr {

// 10*log10(1/MSE) over all pixels and channels, range [0,1].
// MSE below 1e-10 (and thus identical inputs) reports the 100 dB cap.
double psnr(const Frame &pred, const Frame &gt);

// Gaussian-windowed SSIM: window 11, sigma 1.5, K1 = 0.01, K2 = 0.03,
// dynamic range 1. Computed per channel on valid windows only (no padding)
// and averaged over channels and positions. Images must be at least 11x11.
double ssim(const Frame &pred, const Frame &gt);

// Mean over all elements of sqrt((x-y)^2 + eps^2).
double charbonnier(const Frame &x, const Frame &y, double eps = 1e-3);

// Charbonnier over the five HR frame pairs {0,2,t,4,6} plus half the LR
// intermediate term. Exactly five HR pairs are required.
double frame_reconstruction_loss(const std::vector<Frame> &hr_preds,
                                 const std::vector<Frame> &hr_gts,
                                 const Frame &lr_t_pred, const Frame &lr_t_gt,
                                 double eps = 1e-3);

// Charbonnier on structure and detail components of the five HR pairs.
double structure_detail_loss(const std::vector<Frame> &hr_preds,
                             const std::vector<Frame> &hr_gts,
                             double eps = 1e-3, float sigma = 1.5f);

// 45*fr + 45*sd.
double total_loss(double fr, double sd);

struct FrameMetrics {
    int index = 0;
    bool odd = false;
    double psnr = 0.0;
    double ssim = 0.0;
};

struct MetricReport {
    std::vector<FrameMetrics> frames; // ordered by index
    double even_psnr = 0.0, even_ssim = 0.0;
    double odd_psnr = 0.0, odd_ssim = 0.0;
    double overall_psnr = 0.0, overall_ssim = 0.0;
    int even_count = 0, odd_count = 0;

    void compute_aggregates();
    // CSV rows "frame_index,kind,psnr,ssim" followed by the three
    // mean summary rows.
    void write_csv(std::ostream &os) const;
};

} // namespace stsr
