#pragma once

#include <filesystem>
#include <vector>

#include "stsr/raster.hpp"

namespace stsr {

enum class Activation : int { linear = 0, relu = 1, sigmoid = 2 };

struct ConvLayer {
    int in_channels = 0;
    int out_channels = 0;
    int kernel_h = 1; // odd
    int kernel_w = 1; // odd
    Activation activation = Activation::linear;
    std::vector<float> weights; // (out, in, kh, kw) order
    std::vector<float> bias;    // out_channels
};

// Serialized sequential convolutional network. Binary layout:
// magic "STSRW1", int32 layer_count, then per layer int32
// {in, out, kh, kw, activation} followed by float32 weights and biases.
struct WeightBundle {
    std::vector<ConvLayer> layers;

    int input_channels() const { return layers.front().in_channels; }
    int output_channels() const { return layers.back().out_channels; }
};

WeightBundle read_weight_bundle(const std::filesystem::path &path);
void write_weight_bundle(const WeightBundle &bundle, const std::filesystem::path &path);

// Sequential same-padding (edge-clamp) stride-1 convolutions with the
// per-layer activation. Spatial dims are preserved.
Raster conv_forward(const WeightBundle &bundle, const Raster &input);

} // namespace stsr
