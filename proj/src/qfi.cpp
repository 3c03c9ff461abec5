#include "stsr/qfi.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "stsr/warp.hpp"

namespace stsr {

namespace {

void check_flow_pair(const FlowField &a, const FlowField &b, const char *what) {
    require_same_shape(a, b, what);
    if (a.channels != 2)
        throw std::invalid_argument(std::string(what) + ": flows must have 2 channels");
}

FlowField intermediate_flow(const FlowField &f_back, const FlowField &f_fwd,
                            float tau, bool with_acceleration) {
    check_flow_pair(f_back, f_fwd, "intermediate_flow");
    if (!(tau > 0.0f && tau < 1.0f))
        throw std::invalid_argument("intermediate_flow: tau must be in (0,1)");

    FlowField out(f_back.height, f_back.width, 2);
    const float acc_coef = with_acceleration ? 0.5f * tau * tau : 0.0f;
    const float vel_coef = 0.5f * tau;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out.height; y++) {
        for (int x = 0; x < out.width; x++) {
            for (int c = 0; c < 2; c++) {
                const float fb = f_back.at(y, x, c);
                const float ff = f_fwd.at(y, x, c);
                out.at(y, x, c) = acc_coef * (ff + fb) + vel_coef * (ff - fb);
            }
        }
    }
    return out;
}

// Forward-backward consistency error toward one neighbour:
// e(p) = | f_ts(p) + bw(f_st, f_ts)(p) |_2
Mask consistency_error(const FlowField &f_ts, const FlowField &f_st) {
    const FlowField back = backward_warp(f_st, f_ts);
    Mask e(f_ts.height, f_ts.width, 1);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < e.height; y++) {
        for (int x = 0; x < e.width; x++) {
            const float du = f_ts.at(y, x, 0) + back.at(y, x, 0);
            const float dv = f_ts.at(y, x, 1) + back.at(y, x, 1);
            e.at(y, x, 0) = std::sqrt(du * du + dv * dv);
        }
    }
    return e;
}

} // namespace

FlowField quadratic_intermediate_flow(const FlowField &f_center_back,
                                      const FlowField &f_center_fwd, float tau) {
    return intermediate_flow(f_center_back, f_center_fwd, tau, true);
}

FlowField linear_intermediate_flow(const FlowField &f_center_back,
                                   const FlowField &f_center_fwd, float tau) {
    return intermediate_flow(f_center_back, f_center_fwd, tau, false);
}

FlowField reverse_flow(const FlowField &f_src_to_t) {
    if (f_src_to_t.channels != 2)
        throw std::invalid_argument("reverse_flow: flow must have 2 channels");
    const int h = f_src_to_t.height, w = f_src_to_t.width;

    FlowField negated(h, w, 2);
    for (size_t i = 0; i < negated.data.size(); i++)
        negated.data[i] = -f_src_to_t.data[i];

    auto [acc, wsum] = forward_splat(negated, f_src_to_t);

    constexpr float eps_w = 1e-6f;
    FlowField out(h, w, 2, 0.0f);
    std::vector<char> valid(static_cast<size_t>(h) * w, 0);
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            const float ws = wsum.at(y, x, 0);
            if (ws > eps_w) {
                out.at(y, x, 0) = acc.at(y, x, 0) / ws;
                out.at(y, x, 1) = acc.at(y, x, 1) / ws;
                valid[static_cast<size_t>(y) * w + x] = 1;
            }
        }
    }

    // Jacobi-style hole fill: each round averages the 3x3 neighbours that
    // were valid before the round started, so the result is independent of
    // traversal order. A raster with no valid pixel at all stays zero.
    const int max_rounds = h + w;
    for (int round = 0; round < max_rounds; round++) {
        bool holes = false;
        FlowField next = out;
        std::vector<char> next_valid = valid;
        for (int y = 0; y < h; y++) {
            for (int x = 0; x < w; x++) {
                if (valid[static_cast<size_t>(y) * w + x])
                    continue;
                float su = 0.0f, sv = 0.0f;
                int cnt = 0;
                for (int dy = -1; dy <= 1; dy++) {
                    for (int dx = -1; dx <= 1; dx++) {
                        const int ny = y + dy, nx = x + dx;
                        if (ny < 0 || ny >= h || nx < 0 || nx >= w)
                            continue;
                        if (!valid[static_cast<size_t>(ny) * w + nx])
                            continue;
                        su += out.at(ny, nx, 0);
                        sv += out.at(ny, nx, 1);
                        cnt++;
                    }
                }
                if (cnt > 0) {
                    next.at(y, x, 0) = su / static_cast<float>(cnt);
                    next.at(y, x, 1) = sv / static_cast<float>(cnt);
                    next_valid[static_cast<size_t>(y) * w + x] = 1;
                } else {
                    holes = true;
                }
            }
        }
        out = std::move(next);
        valid = std::move(next_valid);
        if (!holes)
            break;
    }
    return out;
}

std::pair<FlowField, FlowField> refine_flow(const FlowField &f_t2,
                                            const FlowField &f_t4,
                                            const Frame &I2, const Frame &I4,
                                            const WeightBundle *weights) {
    check_flow_pair(f_t2, f_t4, "refine_flow");
    if (!weights)
        return {f_t2, f_t4};

    require_same_size(f_t2, I2, "refine_flow");
    require_same_size(f_t2, I4, "refine_flow");
    const int h = f_t2.height, w = f_t2.width;
    const int stack_ch = 4 + I2.channels + I4.channels;
    if (weights->input_channels() != stack_ch || weights->output_channels() != 4)
        throw std::invalid_argument(
            "refine_flow: bundle must map " + std::to_string(stack_ch) +
            " input channels to 4, got " + std::to_string(weights->input_channels()) +
            "->" + std::to_string(weights->output_channels()));

    Raster stack(h, w, stack_ch);
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            int c = 0;
            stack.at(y, x, c++) = f_t2.at(y, x, 0);
            stack.at(y, x, c++) = f_t2.at(y, x, 1);
            stack.at(y, x, c++) = f_t4.at(y, x, 0);
            stack.at(y, x, c++) = f_t4.at(y, x, 1);
            for (int k = 0; k < I2.channels; k++) stack.at(y, x, c++) = I2.at(y, x, k);
            for (int k = 0; k < I4.channels; k++) stack.at(y, x, c++) = I4.at(y, x, k);
        }
    }
    const Raster res = conv_forward(*weights, stack);

    FlowField r2 = f_t2, r4 = f_t4;
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            r2.at(y, x, 0) += res.at(y, x, 0);
            r2.at(y, x, 1) += res.at(y, x, 1);
            r4.at(y, x, 0) += res.at(y, x, 2);
            r4.at(y, x, 1) += res.at(y, x, 3);
        }
    }
    return {std::move(r2), std::move(r4)};
}

Mask estimate_blend_mask(const FlowField &f_t2, const FlowField &f_2t,
                         const FlowField &f_t4, const FlowField &f_4t,
                         const WeightBundle *weights,
                         const Frame *I2, const Frame *I4) {
    check_flow_pair(f_t2, f_2t, "estimate_blend_mask");
    check_flow_pair(f_t4, f_4t, "estimate_blend_mask");
    require_same_size(f_t2, f_t4, "estimate_blend_mask");

    const Mask e2 = consistency_error(f_t2, f_2t);
    const Mask e4 = consistency_error(f_t4, f_4t);
    const int h = f_t2.height, w = f_t2.width;

    if (!weights) {
        constexpr float eps_m = 1e-3f;
        Mask m(h, w, 1);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; y++)
            for (int x = 0; x < w; x++)
                m.at(y, x, 0) = clamp01((e4.at(y, x, 0) + eps_m) /
                                        (e2.at(y, x, 0) + e4.at(y, x, 0) + 2.0f * eps_m));
        return m;
    }

    if (!I2 || !I4)
        throw std::invalid_argument("estimate_blend_mask: neural mask needs I2 and I4");
    if (weights->input_channels() != 8 || weights->output_channels() != 1)
        throw std::invalid_argument("estimate_blend_mask: bundle must map 8 channels to 1");
    if (weights->layers.back().activation != Activation::sigmoid)
        throw std::invalid_argument("estimate_blend_mask: final activation must be sigmoid");

    const Frame luma2 = luminance(backward_warp(*I2, f_t2));
    const Frame luma4 = luminance(backward_warp(*I4, f_t4));
    Raster stack(h, w, 8);
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            stack.at(y, x, 0) = f_t2.at(y, x, 0);
            stack.at(y, x, 1) = f_t2.at(y, x, 1);
            stack.at(y, x, 2) = f_t4.at(y, x, 0);
            stack.at(y, x, 3) = f_t4.at(y, x, 1);
            stack.at(y, x, 4) = e2.at(y, x, 0);
            stack.at(y, x, 5) = e4.at(y, x, 0);
            stack.at(y, x, 6) = luma2.at(y, x, 0);
            stack.at(y, x, 7) = luma4.at(y, x, 0);
        }
    }
    Mask m = conv_forward(*weights, stack);
    for (float &v : m.data)
        v = clamp01(v);
    return m;
}

Frame blend_warped(const Frame &warped2, const Frame &warped4,
                   const Mask &m, double t) {
    require_same_shape(warped2, warped4, "blend_warped");
    require_same_size(warped2, m, "blend_warped");
    if (!(t > 2.0 && t < 4.0))
        throw std::invalid_argument("blend_warped: t must be in (2,4)");

    const float w2 = static_cast<float>((4.0 - t) / 2.0);
    const float w4 = static_cast<float>((t - 2.0) / 2.0);
    Frame out(warped2.height, warped2.width, warped2.channels);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out.height; y++) {
        for (int x = 0; x < out.width; x++) {
            const float mv = m.at(y, x, 0);
            const float a2 = w2 * mv;
            const float a4 = w4 * (1.0f - mv);
            const float denom = std::max(a2 + a4, 1e-8f);
            // lerp form of (a2*v2 + a4*v4)/denom; identical algebra, but the
            // one-sided collapses (M=1, or v2 == v4) stay bit-exact
            for (int c = 0; c < out.channels; c++) {
                const float v2 = warped2.at(y, x, c);
                const float v4 = warped4.at(y, x, c);
                out.at(y, x, c) = clamp01(v2 + a4 * (v4 - v2) / denom);
            }
        }
    }
    return out;
}

Frame synthesize_lr_frame(const Frame &I2, const Frame &I4,
                          const FlowField &f_t2, const FlowField &f_t4,
                          const Mask &m, double t) {
    require_same_shape(I2, I4, "synthesize_lr_frame");
    require_same_size(I2, f_t2, "synthesize_lr_frame");
    require_same_size(I2, f_t4, "synthesize_lr_frame");
    const Frame warped2 = backward_warp(I2, f_t2);
    const Frame warped4 = backward_warp(I4, f_t4);
    return blend_warped(warped2, warped4, m, t);
}

} // namespace stsr
