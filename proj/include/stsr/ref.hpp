#pragma once

#include <utility>

#include "stsr/conv.hpp"
#include "stsr/raster.hpp"

// Serial scalar reference implementations, written independently of the
// OpenMP kernels in stsr. They exist for two reasons: tests compare the
// production kernels against them, and the kernel benchmark measures the
// parallel speedup over them. Nothing in the stsr library itself calls
// into this namespace.
namespace stsr::ref {

float sample_bilinear(const Raster &img, float x, float y, int c);

Raster backward_warp(const Raster &src, const FlowField &flow);

std::pair<Raster, Mask> forward_splat(const Raster &values, const FlowField &flow);

FlowField reverse_flow(const FlowField &f);

Raster bilinear_upsample(const Raster &field, int factor);

// Direct (non-separable) 4x4 Catmull-Rom evaluation in double.
Frame bicubic_resize(const Frame &frame, int out_h, int out_w);

// Plain nested-loop convolution in double.
Raster conv_forward(const WeightBundle &bundle, const Raster &input);

// Per-pixel scalar evaluation of the warped-blend formula, double
// precision, including its own bilinear warps.
Frame blend_from_inputs(const Frame &I2, const Frame &I4,
                        const FlowField &f_t2, const FlowField &f_t4,
                        const Mask &m, double t);

// Quadratic trajectory fit through displacement samples
// (-2, f_back), (0, 0), (+2, f_fwd), evaluated at s = 2*tau.
FlowField quadratic_fit_flow(const FlowField &f_back, const FlowField &f_fwd,
                             double tau);

// Direct per-window double-summation SSIM (window 11, sigma 1.5).
double ssim(const Frame &pred, const Frame &gt);

double mse(const Frame &pred, const Frame &gt);

} // namespace stsr::ref
