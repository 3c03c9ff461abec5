#pragma once

#include "stsr/raster.hpp"

namespace stsr {

// Bilinear upsampling by an integer factor, align-corners-false:
// output pixel i samples input coordinate (i + 0.5)/factor - 0.5,
// edge-clamped. Does not rescale values; flow callers multiply by the
// spatial factor themselves.
Raster bilinear_upsample(const Raster &field, int factor);

// Catmull-Rom bicubic (a = -0.5), edge-clamped, align-corners-false.
// Serves both as the x4 degradation model and the baseline super-resolver.
// Output is clamped to [0,1].
Frame bicubic_resize(const Frame &frame, int out_h, int out_w);

} // namespace stsr
