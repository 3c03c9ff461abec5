#include "stsr/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stsr {

namespace {

std::vector<float> gaussian_kernel(float sigma) {
    const int radius = static_cast<int>(std::ceil(4.0f * sigma));
    std::vector<double> raw(2 * radius + 1);
    double total = 0.0;
    for (int i = -radius; i <= radius; i++) {
        raw[i + radius] = std::exp(-0.5 * (double(i) * i) / (double(sigma) * sigma));
        total += raw[i + radius];
    }
    std::vector<float> k(raw.size());
    for (size_t i = 0; i < raw.size(); i++)
        k[i] = static_cast<float>(raw[i] / total);
    return k;
}

} // namespace

Frame gaussian_blur(const Frame &frame, float sigma) {
    if (sigma <= 0.0f)
        throw std::invalid_argument("gaussian_blur: sigma must be positive");
    const auto kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size()) / 2;
    const int h = frame.height, w = frame.width, ch = frame.channels;

    Frame tmp(h, w, ch);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            for (int c = 0; c < ch; c++) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; k++)
                    acc += kernel[k + radius] * frame.at(y, std::clamp(x + k, 0, w - 1), c);
                tmp.at(y, x, c) = static_cast<float>(acc);
            }
        }
    }

    Frame out(h, w, ch);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; y++) {
        for (int x = 0; x < w; x++) {
            for (int c = 0; c < ch; c++) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; k++)
                    acc += kernel[k + radius] * tmp.at(std::clamp(y + k, 0, h - 1), x, c);
                out.at(y, x, c) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

std::pair<Frame, Frame> structure_detail_decompose(const Frame &frame, float sigma) {
    Frame structure = gaussian_blur(frame, sigma);
    Frame detail(frame.height, frame.width, frame.channels);
    for (size_t i = 0; i < frame.data.size(); i++)
        detail.data[i] = frame.data[i] - structure.data[i];
    return {std::move(structure), std::move(detail)};
}

} // namespace stsr
