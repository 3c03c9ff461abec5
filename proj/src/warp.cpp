#include "stsr/warp.hpp"

#include <algorithm>
#include <cmath>

namespace stsr {

float sample_bilinear(const Raster &img, float x, float y, int c) {
    const float xc = std::clamp(x, 0.0f, static_cast<float>(img.width - 1));
    const float yc = std::clamp(y, 0.0f, static_cast<float>(img.height - 1));
    const int x0 = static_cast<int>(xc);
    const int y0 = static_cast<int>(yc);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const float fx = xc - static_cast<float>(x0);
    const float fy = yc - static_cast<float>(y0);

    const float v00 = img.at(y0, x0, c);
    const float v01 = img.at(y0, x1, c);
    const float v10 = img.at(y1, x0, c);
    const float v11 = img.at(y1, x1, c);
    const float top = v00 + fx * (v01 - v00);
    const float bot = v10 + fx * (v11 - v10);
    return top + fy * (bot - top);
}

Raster backward_warp(const Raster &src, const FlowField &flow) {
    require_same_size(src, flow, "backward_warp");
    if (flow.channels != 2)
        throw std::invalid_argument("backward_warp: flow must have 2 channels");

    Raster out(src.height, src.width, src.channels);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < src.height; y++) {
        for (int x = 0; x < src.width; x++) {
            const float sx = static_cast<float>(x) + flow.at(y, x, 0);
            const float sy = static_cast<float>(y) + flow.at(y, x, 1);
            for (int c = 0; c < src.channels; c++)
                out.at(y, x, c) = sample_bilinear(src, sx, sy, c);
        }
    }
    return out;
}

// Serial: scatter targets overlap across source pixels, and the fixed
// traversal order keeps the accumulation bit-reproducible.
std::pair<Raster, Mask> forward_splat(const Raster &values, const FlowField &flow) {
    require_same_size(values, flow, "forward_splat");
    if (flow.channels != 2)
        throw std::invalid_argument("forward_splat: flow must have 2 channels");

    const int h = values.height, w = values.width, ch = values.channels;
    Raster acc(h, w, ch, 0.0f);
    Mask wsum(h, w, 1, 0.0f);

    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            const float tx = static_cast<float>(x) + flow.at(y, x, 0);
            const float ty = static_cast<float>(y) + flow.at(y, x, 1);
            const int x0 = static_cast<int>(std::floor(tx));
            const int y0 = static_cast<int>(std::floor(ty));
            const float fx = tx - static_cast<float>(x0);
            const float fy = ty - static_cast<float>(y0);
            const float wgt[4] = {(1.0f - fx) * (1.0f - fy), fx * (1.0f - fy),
                                  (1.0f - fx) * fy, fx * fy};
            const int nx[4] = {x0, x0 + 1, x0, x0 + 1};
            const int ny[4] = {y0, y0, y0 + 1, y0 + 1};
            for (int k = 0; k < 4; k++) {
                if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h)
                    continue; // out-of-bounds mass is dropped
                for (int c = 0; c < ch; c++)
                    acc.at(ny[k], nx[k], c) += wgt[k] * values.at(y, x, c);
                wsum.at(ny[k], nx[k], 0) += wgt[k];
            }
        }
    }
    return {std::move(acc), std::move(wsum)};
}

} // namespace stsr
