#pragma once

#include <utility>

#include "stsr/conv.hpp"
#include "stsr/raster.hpp"

namespace stsr {

// Intermediate flow under a per-pixel constant-acceleration model:
//   0.5*(f_fwd + f_back)*tau^2 + 0.5*(f_fwd - f_back)*tau
// For the flow anchored at the earlier center frame pass
// (back = F_{2->0}, fwd = F_{2->4}, tau = (t-2)/2); for the later one
// (back = F_{4->6}, fwd = F_{4->2}, tau = (4-t)/2). tau must be in (0,1).
FlowField quadratic_intermediate_flow(const FlowField &f_center_back,
                                      const FlowField &f_center_fwd,
                                      float tau);

// Constant-velocity variant with the acceleration term zeroed:
// 0.5*(f_fwd - f_back)*tau. Used as the ablation baseline.
FlowField linear_intermediate_flow(const FlowField &f_center_back,
                                   const FlowField &f_center_fwd,
                                   float tau);

// Turn F_{src->t} into F_{t->src}: forward-splat -f to p + f(p), normalize
// by the splat weights where weight > 1e-6, then fill holes by iterative
// 3x3 averaging of already-valid neighbours (at most H+W rounds).
FlowField reverse_flow(const FlowField &f_src_to_t);

// Residual refinement of the two reversed flows. With a bundle, runs
// conv_forward on the 10-channel stack [f_t2, f_t4, I2, I4] and adds the
// 4-channel output as residuals; without one it is the identity.
std::pair<FlowField, FlowField> refine_flow(const FlowField &f_t2,
                                            const FlowField &f_t4,
                                            const Frame &I2, const Frame &I4,
                                            const WeightBundle *weights = nullptr);

// Blending mask M (1 where the frame-2 correspondence is the more
// consistent). Analytic default: per pixel
//   e2 = |f_t2 + bw(f_2t, f_t2)|, e4 = |f_t4 + bw(f_4t, f_t4)|,
//   M = (e4 + eps) / (e2 + e4 + 2*eps), eps = 1e-3.
// With a bundle, inference on the 8-channel stack
// [f_t2, f_t4, e2, e4, luma(bw(I2,f_t2)), luma(bw(I4,f_t4))] producing a
// 1-channel sigmoid output replaces the analytic rule; I2/I4 are required
// in that case.
Mask estimate_blend_mask(const FlowField &f_t2, const FlowField &f_2t,
                         const FlowField &f_t4, const FlowField &f_4t,
                         const WeightBundle *weights = nullptr,
                         const Frame *I2 = nullptr, const Frame *I4 = nullptr);

// Weighted blend of two already-warped frames with w2 = (4-t)/2,
// w4 = (t-2)/2:
//   (w2*M.*warped2 + w4*(1-M).*warped4) / (w2*M + w4*(1-M))
// Denominator floored at 1e-8, output clamped to [0,1]. Shared by the LR
// and HR synthesis paths.
Frame blend_warped(const Frame &warped2, const Frame &warped4,
                   const Mask &m, double t);

// LR intermediate frame: warp I2 by f_t2 and I4 by f_t4, then blend.
Frame synthesize_lr_frame(const Frame &I2, const Frame &I4,
                          const FlowField &f_t2, const FlowField &f_t4,
                          const Mask &m, double t);

} // namespace stsr
