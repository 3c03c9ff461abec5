#pragma once

#include <utility>

#include "stsr/raster.hpp"

namespace stsr {

// Separable Gaussian blur, kernel truncated at 4*sigma, edge-clamped taps.
Frame gaussian_blur(const Frame &frame, float sigma);

// structure = gaussian_blur(frame, sigma); detail = frame - structure.
// The subtraction defines the detail component, so structure + detail
// reconstructs the input up to one float rounding per pixel.
std::pair<Frame, Frame> structure_detail_decompose(const Frame &frame,
                                                   float sigma = 1.5f);

} // namespace stsr
