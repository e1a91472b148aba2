#include "conglab/image.hpp"

#include "conglab/errors.hpp"

#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <memory>

namespace conglab {

void Image::fill_rect(int x, int y, int w, int h, Rgb color) {
    const int x0 = std::max(0, x);
    const int y0 = std::max(0, y);
    const int x1 = std::min(width_, x + w);
    const int y1 = std::min(height_, y + h);
    for (int yy = y0; yy < y1; ++yy) {
        for (int xx = x0; xx < x1; ++xx) {
            at(xx, yy) = color;
        }
    }
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void png_quiet_warn(png_structp, png_const_charp) {}

// Mutable state lives on the heap so the longjmp back to setjmp cannot
// clobber it; the unique_ptr itself is set before setjmp.
struct ReadState {
    Image image;
    std::vector<png_bytep> rows;
};

} // namespace

Image load_png(const std::string& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw UsageError("cannot open image: " + path);

    png_byte sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw DataError("not a PNG file: " + path);
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_quiet_warn);
    if (!png) throw DataError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DataError("png_create_info_struct failed");
    }

    auto state = std::make_unique<ReadState>();
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("corrupt PNG file: " + path);
    }

    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_set_expand(png); // palette -> rgb, gray<8 -> 8
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    if (png_get_channels(png, info) != 3 || png_get_bit_depth(png, info) != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("unsupported PNG layout after normalization: " + path);
    }

    state->image = Image(int(width), int(height));
    state->rows.resize(height);
    static_assert(sizeof(Rgb) == 3);
    for (png_uint_32 y = 0; y < height; ++y) {
        state->rows[y] = reinterpret_cast<png_bytep>(&state->image.at(0, int(y)));
    }
    png_read_image(png, state->rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return std::move(state->image);
}

void save_png(const std::string& path, const Image& image) {
    const std::string tmp = path + ".tmp";
    {
        FilePtr file(std::fopen(tmp.c_str(), "wb"));
        if (!file) throw UsageError("cannot write image: " + tmp);

        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, png_quiet_warn);
        if (!png) throw DataError("png_create_write_struct failed");
        png_infop info = png_create_info_struct(png);
        if (!info) {
            png_destroy_write_struct(&png, nullptr);
            throw DataError("png_create_info_struct failed");
        }

        if (setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            throw DataError("PNG write failed: " + tmp);
        }

        png_init_io(png, file.get());
        png_set_IHDR(png, info, png_uint_32(image.width()), png_uint_32(image.height()), 8,
                     PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        for (int y = 0; y < image.height(); ++y) {
            png_write_row(png, reinterpret_cast<png_const_bytep>(&image.at(0, y)));
        }
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw UsageError("rename failed for " + path);
    }
}

} // namespace conglab
