#include "stsr/conv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "stsr/error.hpp"

namespace stsr {

namespace {

constexpr char kBundleMagic[6] = {'S', 'T', 'S', 'R', 'W', '1'};

struct FileCloser {
    void operator()(std::FILE *f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void validate_bundle(const WeightBundle &b, const std::string &origin) {
    if (b.layers.empty())
        throw data_error("weight bundle has no layers: " + origin);
    for (size_t i = 0; i < b.layers.size(); i++) {
        const ConvLayer &l = b.layers[i];
        if (l.in_channels < 1 || l.out_channels < 1)
            throw data_error("weight bundle layer with bad channels: " + origin);
        if (l.kernel_h < 1 || l.kernel_w < 1 || l.kernel_h % 2 == 0 || l.kernel_w % 2 == 0)
            throw data_error("weight bundle kernel dims must be odd: " + origin);
        const int act = static_cast<int>(l.activation);
        if (act < 0 || act > 2)
            throw data_error("weight bundle with unknown activation: " + origin);
        const size_t nw = static_cast<size_t>(l.out_channels) * l.in_channels *
                          l.kernel_h * l.kernel_w;
        if (l.weights.size() != nw || l.bias.size() != static_cast<size_t>(l.out_channels))
            throw data_error("weight bundle coefficient count mismatch: " + origin);
        if (i > 0 && b.layers[i - 1].out_channels != l.in_channels)
            throw data_error("weight bundle layers not channel-compatible: " + origin);
    }
}

} // namespace

WeightBundle read_weight_bundle(const std::filesystem::path &path) {
    FilePtr f(std::fopen(path.string().c_str(), "rb"));
    if (!f)
        throw data_error("read_weight_bundle: cannot open " + path.string());

    char magic[6];
    if (std::fread(magic, 1, 6, f.get()) != 6 ||
        std::memcmp(magic, kBundleMagic, 6) != 0)
        throw data_error("read_weight_bundle: bad magic in " + path.string());

    int32_t layer_count = 0;
    if (std::fread(&layer_count, sizeof(layer_count), 1, f.get()) != 1 ||
        layer_count < 1 || layer_count > 1024)
        throw data_error("read_weight_bundle: bad layer count in " + path.string());

    WeightBundle bundle;
    bundle.layers.resize(layer_count);
    for (ConvLayer &l : bundle.layers) {
        int32_t hdr[5];
        if (std::fread(hdr, sizeof(int32_t), 5, f.get()) != 5)
            throw data_error("read_weight_bundle: truncated layer header in " + path.string());
        l.in_channels = hdr[0];
        l.out_channels = hdr[1];
        l.kernel_h = hdr[2];
        l.kernel_w = hdr[3];
        l.activation = static_cast<Activation>(hdr[4]);
        if (l.in_channels < 1 || l.out_channels < 1 || l.kernel_h < 1 || l.kernel_w < 1)
            throw data_error("read_weight_bundle: bad layer dims in " + path.string());
        const size_t nw = static_cast<size_t>(l.out_channels) * l.in_channels *
                          l.kernel_h * l.kernel_w;
        l.weights.resize(nw);
        l.bias.resize(l.out_channels);
        if (std::fread(l.weights.data(), sizeof(float), nw, f.get()) != nw ||
            std::fread(l.bias.data(), sizeof(float), l.bias.size(), f.get()) != l.bias.size())
            throw data_error("read_weight_bundle: truncated coefficients in " + path.string());
    }
    if (std::fgetc(f.get()) != EOF)
        throw data_error("read_weight_bundle: trailing bytes in " + path.string());

    validate_bundle(bundle, path.string());
    return bundle;
}

void write_weight_bundle(const WeightBundle &bundle, const std::filesystem::path &path) {
    validate_bundle(bundle, "write_weight_bundle");
    FilePtr f(std::fopen(path.string().c_str(), "wb"));
    if (!f)
        throw data_error("write_weight_bundle: cannot open " + path.string());

    const int32_t layer_count = static_cast<int32_t>(bundle.layers.size());
    bool ok = std::fwrite(kBundleMagic, 1, 6, f.get()) == 6 &&
              std::fwrite(&layer_count, sizeof(layer_count), 1, f.get()) == 1;
    for (const ConvLayer &l : bundle.layers) {
        const int32_t hdr[5] = {l.in_channels, l.out_channels, l.kernel_h, l.kernel_w,
                                static_cast<int32_t>(l.activation)};
        ok = ok && std::fwrite(hdr, sizeof(int32_t), 5, f.get()) == 5 &&
             std::fwrite(l.weights.data(), sizeof(float), l.weights.size(), f.get()) ==
                 l.weights.size() &&
             std::fwrite(l.bias.data(), sizeof(float), l.bias.size(), f.get()) ==
                 l.bias.size();
    }
    if (!ok)
        throw data_error("write_weight_bundle: write failed for " + path.string());
}

Raster conv_forward(const WeightBundle &bundle, const Raster &input) {
    validate_bundle(bundle, "conv_forward");
    if (input.channels != bundle.input_channels())
        throw std::invalid_argument("conv_forward: input has " +
                                    std::to_string(input.channels) +
                                    " channels, bundle expects " +
                                    std::to_string(bundle.input_channels()));

    const int h = input.height, w = input.width;
    Raster cur = input;
    for (const ConvLayer &l : bundle.layers) {
        Raster next(h, w, l.out_channels);
        const int rh = l.kernel_h / 2, rw = l.kernel_w / 2;
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; y++) {
            for (int x = 0; x < w; x++) {
                for (int oc = 0; oc < l.out_channels; oc++) {
                    double acc = l.bias[oc];
                    const float *wbase =
                        &l.weights[static_cast<size_t>(oc) * l.in_channels *
                                   l.kernel_h * l.kernel_w];
                    for (int ic = 0; ic < l.in_channels; ic++) {
                        for (int ky = 0; ky < l.kernel_h; ky++) {
                            const int sy = std::clamp(y + ky - rh, 0, h - 1);
                            for (int kx = 0; kx < l.kernel_w; kx++) {
                                const int sx = std::clamp(x + kx - rw, 0, w - 1);
                                acc += wbase[(static_cast<size_t>(ic) * l.kernel_h + ky) *
                                                 l.kernel_w + kx] *
                                       cur.at(sy, sx, ic);
                            }
                        }
                    }
                    float val = static_cast<float>(acc);
                    if (l.activation == Activation::relu)
                        val = std::max(val, 0.0f);
                    else if (l.activation == Activation::sigmoid)
                        val = 1.0f / (1.0f + std::exp(-val));
                    next.at(y, x, oc) = val;
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

} // namespace stsr
