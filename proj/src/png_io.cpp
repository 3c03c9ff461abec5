#include "stsr/png_io.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include <png.h>

#include "stsr/error.hpp"

namespace stsr {

namespace {

struct FileCloser {
    void operator()(std::FILE *f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

Frame read_png(const std::filesystem::path &path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp)
        throw data_error("read_png: cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw data_error("read_png: libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw data_error("read_png: libpng init failed");
    }

    std::vector<png_byte> buf;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw data_error("read_png: failed to decode " + path.string());
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (bit_depth == 16)
        png_set_strip_16(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int h = static_cast<int>(png_get_image_height(png, info));
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int ch = png_get_channels(png, info);
    if (h < 1 || w < 1 || (ch != 1 && ch != 3)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw data_error("read_png: unsupported layout in " + path.string());
    }

    const size_t rowbytes = png_get_rowbytes(png, info);
    buf.resize(rowbytes * h);
    rows.resize(h);
    for (int y = 0; y < h; y++)
        rows[y] = buf.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Frame out(h, w, ch);
    const float inv = 1.0f / 255.0f;
    for (int y = 0; y < h; y++) {
        const png_byte *src = buf.data() + rowbytes * y;
        float *dst = &out.data[static_cast<size_t>(y) * w * ch];
        for (size_t i = 0; i < static_cast<size_t>(w) * ch; i++)
            dst[i] = static_cast<float>(src[i]) * inv;
    }
    return out;
}

void write_png(const Frame &frame, const std::filesystem::path &path) {
    if (frame.channels != 1 && frame.channels != 3)
        throw std::invalid_argument("write_png: frame must have 1 or 3 channels");

    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp)
        throw data_error("write_png: cannot open " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw data_error("write_png: libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw data_error("write_png: libpng init failed");
    }

    const int h = frame.height, w = frame.width, ch = frame.channels;
    std::vector<png_byte> buf(static_cast<size_t>(h) * w * ch);
    for (size_t i = 0; i < buf.size(); i++)
        buf[i] = static_cast<png_byte>(std::lround(clamp01(frame.data[i]) * 255.0f));
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; y++)
        rows[y] = buf.data() + static_cast<size_t>(y) * w * ch;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw data_error("write_png: failed to encode " + path.string());
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, w, h, 8,
                 ch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace stsr
