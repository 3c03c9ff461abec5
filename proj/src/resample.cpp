#include "stsr/resample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "stsr/warp.hpp"

namespace stsr {

Raster bilinear_upsample(const Raster &field, int factor) {
    if (factor < 1)
        throw std::invalid_argument("bilinear_upsample: factor must be >= 1");
    if (field.empty())
        throw std::invalid_argument("bilinear_upsample: empty input");

    const int oh = field.height * factor;
    const int ow = field.width * factor;
    Raster out(oh, ow, field.channels);
    const float inv = 1.0f / static_cast<float>(factor);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < oh; y++) {
        const float sy = (static_cast<float>(y) + 0.5f) * inv - 0.5f;
        for (int x = 0; x < ow; x++) {
            const float sx = (static_cast<float>(x) + 0.5f) * inv - 0.5f;
            for (int c = 0; c < field.channels; c++)
                out.at(y, x, c) = sample_bilinear(field, sx, sy, c);
        }
    }
    return out;
}

namespace {

// Catmull-Rom weight, a = -0.5.
inline double cubic_weight(double d) {
    d = std::fabs(d);
    if (d < 1.0) return ((1.5 * d - 2.5) * d) * d + 1.0;
    if (d < 2.0) return ((-0.5 * d + 2.5) * d - 4.0) * d + 2.0;
    return 0.0;
}

struct CubicTaps {
    int idx[4];
    double w[4];
};

std::vector<CubicTaps> make_taps(int in_dim, int out_dim) {
    std::vector<CubicTaps> taps(out_dim);
    const double ratio = static_cast<double>(in_dim) / out_dim;
    for (int o = 0; o < out_dim; o++) {
        const double s = (o + 0.5) * ratio - 0.5;
        const int base = static_cast<int>(std::floor(s));
        const double t = s - base;
        for (int k = 0; k < 4; k++) {
            taps[o].idx[k] = std::clamp(base - 1 + k, 0, in_dim - 1);
            taps[o].w[k] = cubic_weight(t + 1.0 - k);
        }
    }
    return taps;
}

} // namespace

Frame bicubic_resize(const Frame &frame, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1)
        throw std::invalid_argument("bicubic_resize: output dims must be >= 1");
    if (frame.empty())
        throw std::invalid_argument("bicubic_resize: empty input");

    const int ch = frame.channels;
    const auto xtaps = make_taps(frame.width, out_w);
    const auto ytaps = make_taps(frame.height, out_h);

    // horizontal pass
    Raster tmp(frame.height, out_w, ch);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < frame.height; y++) {
        for (int x = 0; x < out_w; x++) {
            const CubicTaps &tx = xtaps[x];
            for (int c = 0; c < ch; c++) {
                double acc = 0.0;
                for (int k = 0; k < 4; k++)
                    acc += tx.w[k] * frame.at(y, tx.idx[k], c);
                tmp.at(y, x, c) = static_cast<float>(acc);
            }
        }
    }

    // vertical pass, clamped to [0,1]
    Frame out(out_h, out_w, ch);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out_h; y++) {
        const CubicTaps &ty = ytaps[y];
        for (int x = 0; x < out_w; x++) {
            for (int c = 0; c < ch; c++) {
                double acc = 0.0;
                for (int k = 0; k < 4; k++)
                    acc += ty.w[k] * tmp.at(ty.idx[k], x, c);
                out.at(y, x, c) = clamp01(static_cast<float>(acc));
            }
        }
    }
    return out;
}

} // namespace stsr
