#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "echoaug/errors.hpp"
#include "echoaug/image.hpp"

// 8-bit grayscale PNG through the libpng simplified API. Colour inputs are
// converted to gray by libpng.

namespace echoaug::png {

inline Grid<std::uint8_t> read_u8(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw IoError("cannot read PNG " + path.string() + ": " + image.message);
    image.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&image);
        throw IoError("cannot decode PNG " + path.string() + ": " + image.message);
    }
    return Grid<std::uint8_t>(image.width, image.height, std::move(buf));
}

inline void write_u8(const std::filesystem::path& path, const Grid<std::uint8_t>& g) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(g.width());
    image.height = static_cast<png_uint_32>(g.height());
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, g.data().data(), 0, nullptr))
        throw IoError("cannot write PNG " + path.string() + ": " + image.message);
}

inline GrayImage read_image(const std::filesystem::path& path) {
    const auto raw = read_u8(path);
    GrayImage img(raw.width(), raw.height());
    for (std::size_t i = 0; i < raw.size(); ++i) img.pixels()[i] = from_u8(raw.pixels()[i]);
    return img;
}

/// Any nonzero value is foreground.
inline BinaryMask read_mask(const std::filesystem::path& path) {
    auto m = read_u8(path);
    for (auto& v : m.pixels()) v = v ? 1 : 0;
    return m;
}

inline void write_image(const std::filesystem::path& path, const GrayImage& img) {
    Grid<std::uint8_t> raw(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) raw.pixels()[i] = to_u8(img.pixels()[i]);
    write_u8(path, raw);
}

/// Stored as {0, 255}.
inline void write_mask(const std::filesystem::path& path, const BinaryMask& m) {
    Grid<std::uint8_t> raw(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i) raw.pixels()[i] = m.pixels()[i] ? 255 : 0;
    write_u8(path, raw);
}

/// Sorted *.png file names (not paths) in `dir`.
inline std::vector<std::string> list_pngs(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
    std::vector<std::string> names;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        auto ext = e.path().extension().string();
        for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (ext == ".png") names.push_back(e.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace echoaug::png
