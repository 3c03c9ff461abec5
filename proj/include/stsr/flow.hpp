#pragma once

#include "stsr/raster.hpp"

namespace stsr {

struct FlowParams {
    int pyramid_levels = 4;
    int iterations_per_level = 100;
    float smoothness_alpha = 15.0f; // calibrated for luminance in [0,255]
    // downscale per level is fixed at 2
};

// Pyramidal Horn-Schunck estimate of F_{a->b}: a(p) ~ b(p + F(p)).
// Inputs are converted to Rec.601 luminance internally. Per level the
// brightness-constancy term is linearized around the upsampled coarser
// flow and solved by a fixed budget of Jacobi iterations, so the result
// is deterministic under any thread count. Level count is reduced
// automatically when the frames are smaller than 2^levels per side.
FlowField estimate_flow(const Frame &a, const Frame &b, const FlowParams &params);

} // namespace stsr
