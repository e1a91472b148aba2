#pragma once

#include "conglab/color.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace conglab {

// 8-bit RGB raster, row-major.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = Rgb{255, 255, 255})
        : width_(width), height_(height), pixels_(std::size_t(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return pixels_.size(); }

    const Rgb& at(int x, int y) const { return pixels_[std::size_t(y) * width_ + x]; }
    Rgb& at(int x, int y) { return pixels_[std::size_t(y) * width_ + x]; }
    const std::vector<Rgb>& pixels() const { return pixels_; }

    void fill_rect(int x, int y, int w, int h, Rgb color);

    bool same_dimensions(const Image& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> pixels_;
};

// Lossless PNG I/O. Reading accepts any colour type and normalizes to 8-bit
// RGB; writing always emits 8-bit RGB. Failures throw DataError (corrupt
// file) or UsageError (unreadable path).
Image load_png(const std::string& path);
void save_png(const std::string& path, const Image& image);

} // namespace conglab
