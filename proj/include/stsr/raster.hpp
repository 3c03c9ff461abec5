#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stsr {

// Row-major, channel-interleaved float raster. One carrier type serves
// frames (1 or 3 channels, values nominally in [0,1]), flow fields
// (2 channels: u = displacement to the right, v = displacement down)
// and masks (1 channel in [0,1]).
struct Raster {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> data;

    Raster() = default;
    Raster(int h, int w, int c, float fill = 0.0f)
        : height(h), width(w), channels(c),
          data(static_cast<size_t>(h) * w * c, fill) {
        if (h < 1 || w < 1 || c < 1)
            throw std::invalid_argument("Raster: dimensions must be positive");
    }

    float &at(int y, int x, int c) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    float at(int y, int x, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    size_t pixel_count() const { return static_cast<size_t>(height) * width; }
    bool empty() const { return data.empty(); }

    bool same_shape(const Raster &o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }
    bool same_size(const Raster &o) const {
        return height == o.height && width == o.width;
    }
};

using Frame = Raster;     // 1 or 3 channels, [0,1]
using FlowField = Raster; // 2 channels: u, v in pixels
using Mask = Raster;      // 1 channel, [0,1]

inline FlowField make_flow(int h, int w, float u = 0.0f, float v = 0.0f) {
    FlowField f(h, w, 2);
    for (size_t i = 0; i < f.pixel_count(); i++) {
        f.data[2 * i] = u;
        f.data[2 * i + 1] = v;
    }
    return f;
}

inline void require_same_shape(const Raster &a, const Raster &b, const char *what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

inline void require_same_size(const Raster &a, const Raster &b, const char *what) {
    if (!a.same_size(b))
        throw std::invalid_argument(std::string(what) + ": size mismatch");
}

inline float clamp01(float v) { return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v); }

// Rec.601 luminance. `scale` lets callers pick the working range
// (flow estimation runs on [0,255], mask inputs stay in [0,1]).
Frame luminance(const Frame &f, float scale = 1.0f);

} // namespace stsr
