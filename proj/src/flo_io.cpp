#include "stsr/flo_io.hpp"

#include <cstdio>
#include <memory>

#include "stsr/error.hpp"

namespace stsr {

namespace {

constexpr float kFloMagic = 202021.25f;

struct FileCloser {
    void operator()(std::FILE *f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

FlowField read_flo(const std::filesystem::path &path) {
    FilePtr f(std::fopen(path.string().c_str(), "rb"));
    if (!f)
        throw data_error("read_flo: cannot open " + path.string());

    float magic = 0.0f;
    int32_t w = 0, h = 0;
    if (std::fread(&magic, sizeof(magic), 1, f.get()) != 1 ||
        std::fread(&w, sizeof(w), 1, f.get()) != 1 ||
        std::fread(&h, sizeof(h), 1, f.get()) != 1)
        throw data_error("read_flo: truncated header in " + path.string());
    if (magic != kFloMagic)
        throw data_error("read_flo: bad magic in " + path.string());
    if (w < 1 || w > 99999 || h < 1 || h > 99999)
        throw data_error("read_flo: implausible dims in " + path.string());

    FlowField flow(h, w, 2);
    const size_t n = flow.data.size();
    if (std::fread(flow.data.data(), sizeof(float), n, f.get()) != n)
        throw data_error("read_flo: truncated payload in " + path.string());
    if (std::fgetc(f.get()) != EOF)
        throw data_error("read_flo: trailing bytes in " + path.string());
    return flow;
}

void write_flo(const FlowField &flow, const std::filesystem::path &path) {
    if (flow.channels != 2)
        throw std::invalid_argument("write_flo: flow must have 2 channels");
    FilePtr f(std::fopen(path.string().c_str(), "wb"));
    if (!f)
        throw data_error("write_flo: cannot open " + path.string());

    const int32_t w = flow.width, h = flow.height;
    if (std::fwrite(&kFloMagic, sizeof(kFloMagic), 1, f.get()) != 1 ||
        std::fwrite(&w, sizeof(w), 1, f.get()) != 1 ||
        std::fwrite(&h, sizeof(h), 1, f.get()) != 1 ||
        std::fwrite(flow.data.data(), sizeof(float), flow.data.size(), f.get()) !=
            flow.data.size())
        throw data_error("write_flo: write failed for " + path.string());
}

} // namespace stsr
