#include "stsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "stsr/decompose.hpp"

namespace stsr {

namespace {

// Sum per row first, then fold the row sums, so the result does not depend
// on thread partitioning and rounding stays bounded on large frames.
double mean_of(const Raster &a, const Raster &b,
               double (*term)(double, double), double extra) {
    const int h = a.height;
    const size_t row_elems = a.data.size() / h;
    std::vector<double> row_sum(h, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; y++) {
        double s = 0.0;
        const float *pa = &a.data[y * row_elems];
        const float *pb = &b.data[y * row_elems];
        for (size_t i = 0; i < row_elems; i++)
            s += term(static_cast<double>(pa[i]) - static_cast<double>(pb[i]), extra);
        row_sum[y] = s;
    }
    double total = 0.0;
    for (double s : row_sum)
        total += s;
    return total / static_cast<double>(a.data.size());
}

double sq_term(double d, double) { return d * d; }
double charb_term(double d, double eps) { return std::sqrt(d * d + eps * eps); }

std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> w(size);
    const int r = size / 2;
    double total = 0.0;
    for (int i = 0; i < size; i++) {
        w[i] = std::exp(-0.5 * double(i - r) * double(i - r) / (sigma * sigma));
        total += w[i];
    }
    for (double &v : w)
        v /= total;
    return w;
}

} // namespace

double psnr(const Frame &pred, const Frame &gt) {
    require_same_shape(pred, gt, "psnr");
    const double mse = mean_of(pred, gt, sq_term, 0.0);
    if (mse < 1e-10)
        return 100.0;
    return std::min(10.0 * std::log10(1.0 / mse), 100.0);
}

double ssim(const Frame &pred, const Frame &gt) {
    require_same_shape(pred, gt, "ssim");
    constexpr int win = 11;
    if (pred.height < win || pred.width < win)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");

    const auto w = gaussian_window(win, 1.5);
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;

    const int h = pred.height, wd = pred.width, ch = pred.channels;
    const int vh = h - win + 1, vw = wd - win + 1;

    double total = 0.0;
    for (int c = 0; c < ch; c++) {
        // horizontal pass over the five running products
        std::vector<double> hx(size_t(h) * vw), hy(size_t(h) * vw),
            hxx(size_t(h) * vw), hyy(size_t(h) * vw), hxy(size_t(h) * vw);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; y++) {
            for (int xi = 0; xi < vw; xi++) {
                double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
                for (int k = 0; k < win; k++) {
                    const double a = pred.at(y, xi + k, c);
                    const double b = gt.at(y, xi + k, c);
                    sx += w[k] * a;
                    sy += w[k] * b;
                    sxx += w[k] * a * a;
                    syy += w[k] * b * b;
                    sxy += w[k] * a * b;
                }
                const size_t i = size_t(y) * vw + xi;
                hx[i] = sx; hy[i] = sy; hxx[i] = sxx; hyy[i] = syy; hxy[i] = sxy;
            }
        }

        std::vector<double> row_sum(vh, 0.0);
#pragma omp parallel for schedule(static)
        for (int yi = 0; yi < vh; yi++) {
            double s = 0.0;
            for (int xi = 0; xi < vw; xi++) {
                double mu1 = 0, mu2 = 0, m11 = 0, m22 = 0, m12 = 0;
                for (int k = 0; k < win; k++) {
                    const size_t i = size_t(yi + k) * vw + xi;
                    mu1 += w[k] * hx[i];
                    mu2 += w[k] * hy[i];
                    m11 += w[k] * hxx[i];
                    m22 += w[k] * hyy[i];
                    m12 += w[k] * hxy[i];
                }
                const double s1 = m11 - mu1 * mu1;
                const double s2 = m22 - mu2 * mu2;
                const double s12 = m12 - mu1 * mu2;
                s += ((2.0 * mu1 * mu2 + c1) * (2.0 * s12 + c2)) /
                     ((mu1 * mu1 + mu2 * mu2 + c1) * (s1 + s2 + c2));
            }
            row_sum[yi] = s;
        }
        double csum = 0.0;
        for (double s : row_sum)
            csum += s;
        total += csum / (static_cast<double>(vh) * vw);
    }
    return total / ch;
}

double charbonnier(const Frame &x, const Frame &y, double eps) {
    require_same_shape(x, y, "charbonnier");
    return mean_of(x, y, charb_term, eps);
}

double frame_reconstruction_loss(const std::vector<Frame> &hr_preds,
                                 const std::vector<Frame> &hr_gts,
                                 const Frame &lr_t_pred, const Frame &lr_t_gt,
                                 double eps) {
    if (hr_preds.size() != 5 || hr_gts.size() != 5)
        throw std::invalid_argument(
            "frame_reconstruction_loss: exactly five HR pairs {0,2,t,4,6} required");
    double total = 0.0;
    for (size_t i = 0; i < 5; i++)
        total += charbonnier(hr_preds[i], hr_gts[i], eps);
    return total + 0.5 * charbonnier(lr_t_pred, lr_t_gt, eps);
}

double structure_detail_loss(const std::vector<Frame> &hr_preds,
                             const std::vector<Frame> &hr_gts,
                             double eps, float sigma) {
    if (hr_preds.size() != 5 || hr_gts.size() != 5)
        throw std::invalid_argument(
            "structure_detail_loss: exactly five HR pairs {0,2,t,4,6} required");
    double s_total = 0.0, d_total = 0.0;
    for (size_t i = 0; i < 5; i++) {
        const auto [sp, dp] = structure_detail_decompose(hr_preds[i], sigma);
        const auto [sg, dg] = structure_detail_decompose(hr_gts[i], sigma);
        s_total += charbonnier(sp, sg, eps);
        d_total += charbonnier(dp, dg, eps);
    }
    return s_total + d_total;
}

double total_loss(double fr, double sd) { return 45.0 * fr + 45.0 * sd; }

void MetricReport::compute_aggregates() {
    even_psnr = even_ssim = odd_psnr = odd_ssim = 0.0;
    even_count = odd_count = 0;
    for (const FrameMetrics &fm : frames) {
        if (fm.odd) {
            odd_psnr += fm.psnr;
            odd_ssim += fm.ssim;
            odd_count++;
        } else {
            even_psnr += fm.psnr;
            even_ssim += fm.ssim;
            even_count++;
        }
    }
    const int n = even_count + odd_count;
    overall_psnr = n ? (even_psnr + odd_psnr) / n : 0.0;
    overall_ssim = n ? (even_ssim + odd_ssim) / n : 0.0;
    if (even_count) { even_psnr /= even_count; even_ssim /= even_count; }
    if (odd_count) { odd_psnr /= odd_count; odd_ssim /= odd_count; }
}

void MetricReport::write_csv(std::ostream &os) const {
    char buf[128];
    os << "# psnr/ssim averaged over RGB channels; ssim window 11, sigma 1.5; "
          "psnr capped at 100 dB\n";
    os << "frame_index,kind,psnr,ssim\n";
    for (const FrameMetrics &fm : frames) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%.6f,%.6f\n", fm.index,
                      fm.odd ? "odd" : "even", fm.psnr, fm.ssim);
        os << buf;
    }
    if (even_count) {
        std::snprintf(buf, sizeof(buf), "mean,even,%.6f,%.6f\n", even_psnr, even_ssim);
        os << buf;
    }
    if (odd_count) {
        std::snprintf(buf, sizeof(buf), "mean,odd,%.6f,%.6f\n", odd_psnr, odd_ssim);
        os << buf;
    }
    if (even_count + odd_count) {
        std::snprintf(buf, sizeof(buf), "mean,overall,%.6f,%.6f\n", overall_psnr,
                      overall_ssim);
        os << buf;
    }
}

} // namespace stsr
