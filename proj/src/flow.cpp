#include "stsr/flow.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "stsr/decompose.hpp"
#include "stsr/resample.hpp"
#include "stsr/warp.hpp"

namespace stsr {

namespace {

// Antialias blur then 2x subsample; dims round up so nothing is lost on
// odd sizes.
Frame downsample2(const Frame &img) {
    Frame blurred = gaussian_blur(img, 0.8f);
    const int oh = (img.height + 1) / 2;
    const int ow = (img.width + 1) / 2;
    Frame out(oh, ow, 1);
    for (int y = 0; y < oh; y++)
        for (int x = 0; x < ow; x++)
            out.at(y, x, 0) = blurred.at(std::min(2 * y, img.height - 1),
                                         std::min(2 * x, img.width - 1), 0);
    return out;
}

// Upsample a coarse flow to (fine_h, fine_w) and double the displacements.
FlowField upsample_flow_x2(const FlowField &coarse, int fine_h, int fine_w) {
    FlowField up = bilinear_upsample(coarse, 2);
    FlowField out(fine_h, fine_w, 2);
    for (int y = 0; y < fine_h; y++) {
        const int sy = std::min(y, up.height - 1);
        for (int x = 0; x < fine_w; x++) {
            const int sx = std::min(x, up.width - 1);
            out.at(y, x, 0) = 2.0f * up.at(sy, sx, 0);
            out.at(y, x, 1) = 2.0f * up.at(sy, sx, 1);
        }
    }
    return out;
}

// Centered difference with replicated borders, averaged over both images.
void mixed_gradient(const Frame &la, const Frame &lbw,
                    std::vector<float> &ix, std::vector<float> &iy) {
    const int h = la.height, w = la.width;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; y++) {
        const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
        for (int x = 0; x < w; x++) {
            const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
            const size_t i = static_cast<size_t>(y) * w + x;
            ix[i] = 0.25f * ((la.at(y, xr, 0) - la.at(y, xl, 0)) +
                             (lbw.at(y, xr, 0) - lbw.at(y, xl, 0)));
            iy[i] = 0.25f * ((la.at(yd, x, 0) - la.at(yu, x, 0)) +
                             (lbw.at(yd, x, 0) - lbw.at(yu, x, 0)));
        }
    }
}

// One pyramid level: linearize brightness constancy around the incoming
// flow (by warping lb), then run the fixed Jacobi budget on the full flow.
void hs_level(const Frame &la, const Frame &lb, FlowField &flow,
              int iterations, float alpha) {
    const int h = la.height, w = la.width;
    const size_t n = static_cast<size_t>(h) * w;

    const Frame lbw = backward_warp(lb, flow);
    std::vector<float> ix(n), iy(n);
    mixed_gradient(la, lbw, ix, iy);

    // residual constant: It - Ix*u0 - Iy*v0, so that Ix*u + Iy*v + cterm
    // linearizes around the warp flow u0
    std::vector<float> cterm(n), inv_denom(n);
    const float alpha2 = alpha * alpha;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            const size_t i = static_cast<size_t>(y) * w + x;
            const float it = lbw.at(y, x, 0) - la.at(y, x, 0);
            cterm[i] = it - ix[i] * flow.at(y, x, 0) - iy[i] * flow.at(y, x, 1);
            inv_denom[i] = 1.0f / (alpha2 + ix[i] * ix[i] + iy[i] * iy[i]);
        }
    }

    std::vector<float> u(n), v(n), un(n), vn(n);
    for (size_t i = 0; i < n; i++) {
        u[i] = flow.data[2 * i];
        v[i] = flow.data[2 * i + 1];
    }

    for (int it = 0; it < iterations; it++) {
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; y++) {
            const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
            for (int x = 0; x < w; x++) {
                const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
                const size_t i = static_cast<size_t>(y) * w + x;
                const float ubar = 0.25f * (u[size_t(y) * w + xl] + u[size_t(y) * w + xr] +
                                            u[size_t(yu) * w + x] + u[size_t(yd) * w + x]);
                const float vbar = 0.25f * (v[size_t(y) * w + xl] + v[size_t(y) * w + xr] +
                                            v[size_t(yu) * w + x] + v[size_t(yd) * w + x]);
                const float r = (ix[i] * ubar + iy[i] * vbar + cterm[i]) * inv_denom[i];
                un[i] = ubar - ix[i] * r;
                vn[i] = vbar - iy[i] * r;
            }
        }
        u.swap(un);
        v.swap(vn);
    }

    for (size_t i = 0; i < n; i++) {
        flow.data[2 * i] = u[i];
        flow.data[2 * i + 1] = v[i];
    }
}

} // namespace

FlowField estimate_flow(const Frame &a, const Frame &b, const FlowParams &params) {
    require_same_shape(a, b, "estimate_flow");
    if (params.pyramid_levels < 1 || params.iterations_per_level < 1 ||
        params.smoothness_alpha <= 0.0f)
        throw std::invalid_argument("estimate_flow: bad FlowParams");

    int levels = params.pyramid_levels;
    const int min_dim = std::min(a.height, a.width);
    while (levels > 1 && min_dim < (1 << levels))
        levels--;

    std::vector<Frame> pa(levels), pb(levels);
    pa[0] = luminance(a, 255.0f);
    pb[0] = luminance(b, 255.0f);
    for (int l = 1; l < levels; l++) {
        pa[l] = downsample2(pa[l - 1]);
        pb[l] = downsample2(pb[l - 1]);
    }

    FlowField flow(pa[levels - 1].height, pa[levels - 1].width, 2, 0.0f);
    for (int l = levels - 1; l >= 0; l--) {
        if (l != levels - 1)
            flow = upsample_flow_x2(flow, pa[l].height, pa[l].width);
        hs_level(pa[l], pb[l], flow, params.iterations_per_level,
                 params.smoothness_alpha);
    }
    return flow;
}

} // namespace stsr
