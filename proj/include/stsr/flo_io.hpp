#pragma once

#include <filesystem>

#include "stsr/raster.hpp"

namespace stsr {

// Middlebury .flo format: float magic 202021.25, int32 width, int32 height,
// then width*height interleaved (u,v) float pairs, all little-endian.
// write_flo(read_flo(p)) is bit-exact for finite values.
FlowField read_flo(const std::filesystem::path &path);
void write_flo(const FlowField &flow, const std::filesystem::path &path);

} // namespace stsr
