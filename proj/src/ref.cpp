#include "stsr/ref.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stsr::ref {

float sample_bilinear(const Raster &img, float x, float y, int c) {
    double xd = std::min(std::max(double(x), 0.0), double(img.width - 1));
    double yd = std::min(std::max(double(y), 0.0), double(img.height - 1));
    int x0 = int(std::floor(xd)), y0 = int(std::floor(yd));
    if (x0 > img.width - 2) x0 = std::max(img.width - 2, 0);
    if (y0 > img.height - 2) y0 = std::max(img.height - 2, 0);
    int x1 = std::min(x0 + 1, img.width - 1);
    int y1 = std::min(y0 + 1, img.height - 1);
    double fx = xd - x0, fy = yd - y0;
    double w00 = (1.0 - fx) * (1.0 - fy);
    double w01 = fx * (1.0 - fy);
    double w10 = (1.0 - fx) * fy;
    double w11 = fx * fy;
    return float(w00 * img.at(y0, x0, c) + w01 * img.at(y0, x1, c) +
                 w10 * img.at(y1, x0, c) + w11 * img.at(y1, x1, c));
}

Raster backward_warp(const Raster &src, const FlowField &flow) {
    Raster out(src.height, src.width, src.channels);
    for (int y = 0; y < src.height; y++)
        for (int x = 0; x < src.width; x++)
            for (int c = 0; c < src.channels; c++)
                out.at(y, x, c) = sample_bilinear(src, x + flow.at(y, x, 0),
                                                  y + flow.at(y, x, 1), c);
    return out;
}

std::pair<Raster, Mask> forward_splat(const Raster &values, const FlowField &flow) {
    const int h = values.height, w = values.width, ch = values.channels;
    Raster acc(h, w, ch, 0.0f);
    Mask wsum(h, w, 1, 0.0f);
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            double tx = x + double(flow.at(y, x, 0));
            double ty = y + double(flow.at(y, x, 1));
            int x0 = int(std::floor(tx)), y0 = int(std::floor(ty));
            double fx = tx - x0, fy = ty - y0;
            for (int dy = 0; dy <= 1; dy++) {
                for (int dx = 0; dx <= 1; dx++) {
                    int px = x0 + dx, py = y0 + dy;
                    if (px < 0 || px >= w || py < 0 || py >= h)
                        continue;
                    double wt = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
                    for (int c = 0; c < ch; c++)
                        acc.at(py, px, c) += float(wt * values.at(y, x, c));
                    wsum.at(py, px, 0) += float(wt);
                }
            }
        }
    }
    return {acc, wsum};
}

FlowField reverse_flow(const FlowField &f) {
    const int h = f.height, w = f.width;
    FlowField neg(h, w, 2);
    for (size_t i = 0; i < neg.data.size(); i++)
        neg.data[i] = -f.data[i];
    auto [acc, wsum] = forward_splat(neg, f);

    FlowField out(h, w, 2, 0.0f);
    std::vector<char> valid(size_t(h) * w, 0);
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            if (wsum.at(y, x, 0) > 1e-6f) {
                out.at(y, x, 0) = acc.at(y, x, 0) / wsum.at(y, x, 0);
                out.at(y, x, 1) = acc.at(y, x, 1) / wsum.at(y, x, 0);
                valid[size_t(y) * w + x] = 1;
            }
        }
    }
    for (int round = 0; round < h + w; round++) {
        bool any_hole = false;
        FlowField cur = out;
        std::vector<char> cur_valid = valid;
        for (int y = 0; y < h; y++) {
            for (int x = 0; x < w; x++) {
                if (cur_valid[size_t(y) * w + x])
                    continue;
                float su = 0, sv = 0;
                int n = 0;
                for (int dy = -1; dy <= 1; dy++)
                    for (int dx = -1; dx <= 1; dx++) {
                        int py = y + dy, px = x + dx;
                        if (py < 0 || py >= h || px < 0 || px >= w)
                            continue;
                        if (!cur_valid[size_t(py) * w + px])
                            continue;
                        su += cur.at(py, px, 0);
                        sv += cur.at(py, px, 1);
                        n++;
                    }
                if (n) {
                    out.at(y, x, 0) = su / n;
                    out.at(y, x, 1) = sv / n;
                    valid[size_t(y) * w + x] = 1;
                } else {
                    any_hole = true;
                }
            }
        }
        if (!any_hole)
            break;
    }
    return out;
}

Raster bilinear_upsample(const Raster &field, int factor) {
    Raster out(field.height * factor, field.width * factor, field.channels);
    for (int y = 0; y < out.height; y++)
        for (int x = 0; x < out.width; x++)
            for (int c = 0; c < field.channels; c++)
                out.at(y, x, c) = sample_bilinear(field,
                                                  (x + 0.5f) / factor - 0.5f,
                                                  (y + 0.5f) / factor - 0.5f, c);
    return out;
}

namespace {

double catrom(double d) {
    d = std::fabs(d);
    if (d < 1.0) return 1.5 * d * d * d - 2.5 * d * d + 1.0;
    if (d < 2.0) return -0.5 * d * d * d + 2.5 * d * d - 4.0 * d + 2.0;
    return 0.0;
}

} // namespace

Frame bicubic_resize(const Frame &frame, int out_h, int out_w) {
    Frame out(out_h, out_w, frame.channels);
    const double ry = double(frame.height) / out_h;
    const double rx = double(frame.width) / out_w;
    for (int oy = 0; oy < out_h; oy++) {
        const double sy = (oy + 0.5) * ry - 0.5;
        const int by = int(std::floor(sy));
        for (int ox = 0; ox < out_w; ox++) {
            const double sx = (ox + 0.5) * rx - 0.5;
            const int bx = int(std::floor(sx));
            for (int c = 0; c < frame.channels; c++) {
                double acc = 0.0;
                for (int ky = -1; ky <= 2; ky++) {
                    const int py = std::clamp(by + ky, 0, frame.height - 1);
                    const double wy = catrom(sy - (by + ky));
                    for (int kx = -1; kx <= 2; kx++) {
                        const int px = std::clamp(bx + kx, 0, frame.width - 1);
                        acc += wy * catrom(sx - (bx + kx)) * frame.at(py, px, c);
                    }
                }
                out.at(oy, ox, c) = float(std::min(std::max(acc, 0.0), 1.0));
            }
        }
    }
    return out;
}

Raster conv_forward(const WeightBundle &bundle, const Raster &input) {
    Raster cur = input;
    for (const ConvLayer &l : bundle.layers) {
        Raster next(cur.height, cur.width, l.out_channels);
        const int rh = l.kernel_h / 2, rw = l.kernel_w / 2;
        for (int y = 0; y < cur.height; y++) {
            for (int x = 0; x < cur.width; x++) {
                for (int oc = 0; oc < l.out_channels; oc++) {
                    double acc = l.bias[oc];
                    for (int ic = 0; ic < l.in_channels; ic++)
                        for (int ky = -rh; ky <= rh; ky++)
                            for (int kx = -rw; kx <= rw; kx++) {
                                const int sy = std::clamp(y + ky, 0, cur.height - 1);
                                const int sx = std::clamp(x + kx, 0, cur.width - 1);
                                const size_t wi =
                                    ((size_t(oc) * l.in_channels + ic) * l.kernel_h +
                                     (ky + rh)) * l.kernel_w + (kx + rw);
                                acc += l.weights[wi] * cur.at(sy, sx, ic);
                            }
                    double v = acc;
                    if (l.activation == Activation::relu)
                        v = std::max(v, 0.0);
                    else if (l.activation == Activation::sigmoid)
                        v = 1.0 / (1.0 + std::exp(-v));
                    next.at(y, x, oc) = float(v);
                }
            }
        }
        cur = next;
    }
    return cur;
}

Frame blend_from_inputs(const Frame &I2, const Frame &I4,
                        const FlowField &f_t2, const FlowField &f_t4,
                        const Mask &m, double t) {
    const double w2 = (4.0 - t) / 2.0;
    const double w4 = (t - 2.0) / 2.0;
    Frame out(I2.height, I2.width, I2.channels);
    for (int y = 0; y < out.height; y++) {
        for (int x = 0; x < out.width; x++) {
            const double mv = m.at(y, x, 0);
            const double a2 = w2 * mv, a4 = w4 * (1.0 - mv);
            const double denom = std::max(a2 + a4, 1e-8);
            for (int c = 0; c < out.channels; c++) {
                const double s2 = sample_bilinear(I2, x + f_t2.at(y, x, 0),
                                                  y + f_t2.at(y, x, 1), c);
                const double s4 = sample_bilinear(I4, x + f_t4.at(y, x, 0),
                                                  y + f_t4.at(y, x, 1), c);
                out.at(y, x, c) = float(std::min(std::max((a2 * s2 + a4 * s4) / denom, 0.0), 1.0));
            }
        }
    }
    return out;
}

FlowField quadratic_fit_flow(const FlowField &f_back, const FlowField &f_fwd,
                             double tau) {
    // displacement samples: x(-2) = f_back, x(0) = 0, x(+2) = f_fwd;
    // fit x(s) = v*s + a*s^2/2 and evaluate at s = 2*tau
    FlowField out(f_back.height, f_back.width, 2);
    const double s = 2.0 * tau;
    for (int y = 0; y < out.height; y++) {
        for (int x = 0; x < out.width; x++) {
            for (int c = 0; c < 2; c++) {
                const double xb = f_back.at(y, x, c);
                const double xf = f_fwd.at(y, x, c);
                const double v = (xf - xb) / 4.0;
                const double a = (xf + xb) / 4.0;
                out.at(y, x, c) = float(v * s + 0.5 * a * s * s);
            }
        }
    }
    return out;
}

double ssim(const Frame &pred, const Frame &gt) {
    constexpr int win = 11;
    const int r = win / 2;
    double wker[win][win];
    double total_w = 0.0;
    for (int i = 0; i < win; i++)
        for (int j = 0; j < win; j++) {
            wker[i][j] = std::exp(-0.5 * ((i - r) * (i - r) + (j - r) * (j - r)) / (1.5 * 1.5));
            total_w += wker[i][j];
        }
    for (int i = 0; i < win; i++)
        for (int j = 0; j < win; j++)
            wker[i][j] /= total_w;

    const double c1 = 1e-4, c2 = 9e-4;
    double total = 0.0;
    long count = 0;
    for (int c = 0; c < pred.channels; c++) {
        for (int y = 0; y + win <= pred.height; y++) {
            for (int x = 0; x + win <= pred.width; x++) {
                double mu1 = 0, mu2 = 0, m11 = 0, m22 = 0, m12 = 0;
                for (int i = 0; i < win; i++)
                    for (int j = 0; j < win; j++) {
                        const double a = pred.at(y + i, x + j, c);
                        const double b = gt.at(y + i, x + j, c);
                        mu1 += wker[i][j] * a;
                        mu2 += wker[i][j] * b;
                        m11 += wker[i][j] * a * a;
                        m22 += wker[i][j] * b * b;
                        m12 += wker[i][j] * a * b;
                    }
                const double s1 = m11 - mu1 * mu1, s2 = m22 - mu2 * mu2;
                const double s12 = m12 - mu1 * mu2;
                total += ((2 * mu1 * mu2 + c1) * (2 * s12 + c2)) /
                         ((mu1 * mu1 + mu2 * mu2 + c1) * (s1 + s2 + c2));
                count++;
            }
        }
    }
    return total / count;
}

double mse(const Frame &pred, const Frame &gt) {
    double acc = 0.0;
    for (size_t i = 0; i < pred.data.size(); i++) {
        const double d = double(pred.data[i]) - double(gt.data[i]);
        acc += d * d;
    }
    return acc / pred.data.size();
}

} // namespace stsr::ref
