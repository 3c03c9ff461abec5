#pragma once

#include "stsr/conv.hpp"
#include "stsr/raster.hpp"

namespace stsr {

// F_hr = 4 * up(F_lr): bilinear upsample by 4, then every displacement
// multiplied by the spatial factor 4.
FlowField upsample_flow_to_hr(const FlowField &f_lr);

// M_hr = up(M_lr): bilinear upsample by 4, values stay in [0,1].
Mask upsample_mask_to_hr(const Mask &m_lr);

// Coarse HR intermediate frame: the LR blending formula evaluated in HR
// space from the super-resolved neighbours and the upsampled flows/mask.
Frame synthesize_coarse_hr(const Frame &I2_hr, const Frame &I4_hr,
                           const FlowField &f_t2_hr, const FlowField &f_t4_hr,
                           const Mask &m_hr, double t);

// Residual refinement: out = clamp(coarse + residual, 0, 1) where the
// residual is conv_forward on the 20-channel stack
// [coarse, I2_hr, I4_hr, f_t2_hr, f_t4_hr, M_hr, warped2, warped4]
// (3+3+3+2+2+1+3+3). Without a bundle the residual is zero and the coarse
// estimate is returned unchanged.
Frame refine_hr_frame(const Frame &coarse, const Frame &I2_hr, const Frame &I4_hr,
                      const FlowField &f_t2_hr, const FlowField &f_t4_hr,
                      const Mask &m_hr, const Frame &warped2, const Frame &warped4,
                      const WeightBundle *weights = nullptr);

} // namespace stsr
