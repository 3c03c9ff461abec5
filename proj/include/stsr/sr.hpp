#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stsr/raster.hpp"

namespace stsr {

// Pluggable spatial super-resolver. bicubic upsamples each frame
// independently; precomputed loads externally produced HR frames named
// identically to the LR inputs from `dir` and validates their dims.
struct SrMethod {
    enum class Kind { bicubic, precomputed };
    Kind kind = Kind::bicubic;
    std::filesystem::path dir; // precomputed only
};

// x4 super-resolution of one frame. `name` is the file name used to look
// up precomputed output (may be empty for bicubic).
Frame super_resolve_frame(const Frame &lr, const SrMethod &method, int scale,
                          const std::string &name = {});

// Batch form; output order matches input order. `names` is required for
// the precomputed variant.
std::vector<Frame> super_resolve(const std::vector<Frame> &frames,
                                 const SrMethod &method, int scale,
                                 const std::vector<std::string> &names = {});

} // namespace stsr
