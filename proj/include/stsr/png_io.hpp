#pragma once

#include <filesystem>

#include "stsr/raster.hpp"

namespace stsr {

// Decode an 8-bit PNG to a float frame on the k/255 grid. Grayscale maps
// to 1 channel, color to 3; palette images are expanded, alpha is dropped.
Frame read_png(const std::filesystem::path &path);

// Quantize clamp(v,0,1)*255 to 8 bits (round half away from zero) and
// write a grayscale or RGB PNG.
void write_png(const Frame &frame, const std::filesystem::path &path);

} // namespace stsr
