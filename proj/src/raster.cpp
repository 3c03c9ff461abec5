#include "stsr/raster.hpp"

namespace stsr {

Frame luminance(const Frame &f, float scale) {
    if (f.channels == 1) {
        Frame out = f;
        if (scale != 1.0f)
            for (float &v : out.data) v *= scale;
        return out;
    }
    if (f.channels != 3)
        throw std::invalid_argument("luminance: expected 1 or 3 channels");
    Frame out(f.height, f.width, 1);
    const size_t n = f.pixel_count();
    for (size_t i = 0; i < n; i++) {
        const float *px = &f.data[3 * i];
        out.data[i] = scale * (0.299f * px[0] + 0.587f * px[1] + 0.114f * px[2]);
    }
    return out;
}

} // namespace stsr
