#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "echoaug/errors.hpp"

namespace echoaug {

/// Row-major 2-D raster. Value type only; copying copies the pixels.
template <typename T>
class Grid {
public:
    using value_type = T;

    Grid() = default;
    Grid(std::size_t width, std::size_t height, T fill = T{})
        : width_(width), height_(height), data_(width * height, fill) {}
    Grid(std::size_t width, std::size_t height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != width_ * height_)
            throw ValidationError("raster data length does not match width*height");
    }

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t row, std::size_t col) noexcept { return data_[row * width_ + col]; }
    const T& operator()(std::size_t row, std::size_t col) const noexcept {
        return data_[row * width_ + col];
    }

    [[nodiscard]] std::span<T> pixels() noexcept { return data_; }
    [[nodiscard]] std::span<const T> pixels() const noexcept { return data_; }
    [[nodiscard]] const std::vector<T>& data() const noexcept { return data_; }

    [[nodiscard]] bool same_shape(const auto& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<T> data_;
};

/// Normalized grayscale intensities in [0,1].
using GrayImage = Grid<double>;
/// Binary raster over {0,1}.
using BinaryMask = Grid<std::uint8_t>;

inline void validate(const GrayImage& img) {
    if (img.width() == 0 || img.height() == 0) throw ValidationError("image has zero extent");
    for (double v : img.pixels())
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("image pixel outside [0,1]");
}

inline void validate(const BinaryMask& mask) {
    if (mask.width() == 0 || mask.height() == 0) throw ValidationError("mask has zero extent");
    for (auto v : mask.pixels())
        if (v > 1) throw ValidationError("mask value outside {0,1}");
}

inline std::size_t count_positive(const BinaryMask& mask) {
    return static_cast<std::size_t>(std::count(mask.pixels().begin(), mask.pixels().end(), 1));
}

/// Image plus its LV supervision mask and, when known, the ultrasound fan mask.
/// Geometric transforms move all three rasters with one spatial map.
struct Sample {
    GrayImage image;
    BinaryMask lv_mask;
    std::optional<BinaryMask> fan_mask;

    friend bool operator==(const Sample&, const Sample&) = default;
};

inline void validate(const Sample& s) {
    validate(s.image);
    validate(s.lv_mask);
    if (!s.image.same_shape(s.lv_mask)) throw ValidationError("lv_mask dimensions differ from image");
    if (s.fan_mask) {
        validate(*s.fan_mask);
        if (!s.image.same_shape(*s.fan_mask))
            throw ValidationError("fan_mask dimensions differ from image");
    }
}

/// 8-bit to normalized and back; the only place the 0..255 scale appears.
inline double from_u8(std::uint8_t v) noexcept { return static_cast<double>(v) / 255.0; }
inline std::uint8_t to_u8(double v) noexcept {
    const double c = std::clamp(v, 0.0, 1.0) * 255.0;
    return static_cast<std::uint8_t>(c + 0.5);
}

inline double clamp01(double v) noexcept { return std::clamp(v, 0.0, 1.0); }

}  // namespace echoaug
