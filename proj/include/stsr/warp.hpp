#pragma once

#include <utility>

#include "stsr/raster.hpp"

namespace stsr {

// Bilinear sample at (x, y) with edge-clamp addressing. Computed as nested
// lerps so integer coordinates reproduce stored values bit-exactly and
// constant fields stay constant.
float sample_bilinear(const Raster &img, float x, float y, int c);

// out(p) = src sampled at p + flow(p). src and flow must share height/width.
Raster backward_warp(const Raster &src, const FlowField &flow);

// Scatter each source pixel's value to the four integer neighbours of
// p + flow(p) with bilinear weights. Returns accumulated values and the
// summed weight map; contributions landing outside the raster are dropped.
std::pair<Raster, Mask> forward_splat(const Raster &values, const FlowField &flow);

} // namespace stsr
