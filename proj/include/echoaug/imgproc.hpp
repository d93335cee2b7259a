#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "echoaug/image.hpp"

// Low-level raster primitives shared by the transforms: border handling,
// interpolation, remapping, resizing and convolution. Coordinates are pixel
// centres: column x in [0, width-1], row y in [0, height-1].

namespace echoaug::imgproc {

enum class Interp { Nearest, Linear };

enum class Border { Constant, Replicate, Reflect101 };

/// Reflect-101 index (…2 1 | 0 1 2 … n-1 | n-2 …); valid for any offset.
inline std::ptrdiff_t reflect101(std::ptrdiff_t i, std::ptrdiff_t n) noexcept {
    if (n == 1) return 0;
    const std::ptrdiff_t period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

inline std::ptrdiff_t replicate(std::ptrdiff_t i, std::ptrdiff_t n) noexcept {
    return std::clamp<std::ptrdiff_t>(i, 0, n - 1);
}

/// Pixel fetch with border policy. Returns `fill` for out-of-range constant borders.
template <typename T>
T fetch(const Grid<T>& g, std::ptrdiff_t row, std::ptrdiff_t col, Border border, T fill) noexcept {
    const auto h = static_cast<std::ptrdiff_t>(g.height());
    const auto w = static_cast<std::ptrdiff_t>(g.width());
    if (row >= 0 && row < h && col >= 0 && col < w)
        return g(static_cast<std::size_t>(row), static_cast<std::size_t>(col));
    switch (border) {
        case Border::Constant: return fill;
        case Border::Replicate: return g(static_cast<std::size_t>(replicate(row, h)),
                                         static_cast<std::size_t>(replicate(col, w)));
        case Border::Reflect101: return g(static_cast<std::size_t>(reflect101(row, h)),
                                          static_cast<std::size_t>(reflect101(col, w)));
    }
    return fill;
}

/// Bilinear sample. At integral coordinates the result is the stored pixel exactly.
inline double sample_linear(const GrayImage& img, double x, double y, Border border, double fill) noexcept {
    const double xf = std::floor(x);
    const double yf = std::floor(y);
    const double fx = x - xf;
    const double fy = y - yf;
    const auto c0 = static_cast<std::ptrdiff_t>(xf);
    const auto r0 = static_cast<std::ptrdiff_t>(yf);
    const double p00 = fetch(img, r0, c0, border, fill);
    if (fx == 0.0 && fy == 0.0) return p00;
    const double p01 = fetch(img, r0, c0 + 1, border, fill);
    const double p10 = fetch(img, r0 + 1, c0, border, fill);
    const double p11 = fetch(img, r0 + 1, c0 + 1, border, fill);
    const double top = p00 + fx * (p01 - p00);
    const double bottom = p10 + fx * (p11 - p10);
    return top + fy * (bottom - top);
}

template <typename T>
T sample_nearest(const Grid<T>& g, double x, double y, Border border, T fill) noexcept {
    const auto c = static_cast<std::ptrdiff_t>(std::floor(x + 0.5));
    const auto r = static_cast<std::ptrdiff_t>(std::floor(y + 0.5));
    return fetch(g, r, c, border, fill);
}

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct RemapOptions {
    Interp image_interp = Interp::Linear;
    Border border = Border::Constant;
    double image_fill = 0.0;
    std::uint8_t mask_fill = 0;
};

/// Backward warp of every raster in the sample: output pixel (row, col) takes
/// the source value at `source_of(col, row)`. Image bilinear (or nearest),
/// masks always nearest so they stay binary.
template <typename SourceOf>
Sample remap(const Sample& in, std::size_t out_w, std::size_t out_h, SourceOf&& source_of,
             const RemapOptions& opt = {}) {
    Sample out;
    out.image = GrayImage(out_w, out_h);
    out.lv_mask = BinaryMask(out_w, out_h);
    if (in.fan_mask) out.fan_mask = BinaryMask(out_w, out_h);
    for (std::size_t r = 0; r < out_h; ++r) {
        for (std::size_t c = 0; c < out_w; ++c) {
            const Point p = source_of(static_cast<double>(c), static_cast<double>(r));
            const double v = opt.image_interp == Interp::Linear
                                 ? sample_linear(in.image, p.x, p.y, opt.border, opt.image_fill)
                                 : sample_nearest(in.image, p.x, p.y, opt.border, opt.image_fill);
            out.image(r, c) = clamp01(v);
            out.lv_mask(r, c) = sample_nearest(in.lv_mask, p.x, p.y, opt.border, opt.mask_fill);
            if (in.fan_mask)
                (*out.fan_mask)(r, c) = sample_nearest(*in.fan_mask, p.x, p.y, opt.border, opt.mask_fill);
        }
    }
    return out;
}

/// Source coordinate for resizing along one axis. Linear uses half-pixel
/// centres; nearest uses floor(dst * in / out).
inline double resize_coord(std::size_t dst, std::size_t in, std::size_t out, Interp interp) noexcept {
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    if (interp == Interp::Nearest) return std::floor(static_cast<double>(dst) * scale);
    return (static_cast<double>(dst) + 0.5) * scale - 0.5;
}

inline GrayImage resize(const GrayImage& img, std::size_t out_w, std::size_t out_h, Interp interp) {
    if (img.width() == out_w && img.height() == out_h) return img;
    GrayImage out(out_w, out_h);
    for (std::size_t r = 0; r < out_h; ++r) {
        const double y = resize_coord(r, img.height(), out_h, interp);
        for (std::size_t c = 0; c < out_w; ++c) {
            const double x = resize_coord(c, img.width(), out_w, interp);
            out(r, c) = interp == Interp::Linear
                            ? clamp01(sample_linear(img, x, y, Border::Replicate, 0.0))
                            : fetch(img, static_cast<std::ptrdiff_t>(y), static_cast<std::ptrdiff_t>(x),
                                    Border::Replicate, 0.0);
        }
    }
    return out;
}

inline BinaryMask resize(const BinaryMask& m, std::size_t out_w, std::size_t out_h) {
    if (m.width() == out_w && m.height() == out_h) return m;
    BinaryMask out(out_w, out_h);
    for (std::size_t r = 0; r < out_h; ++r) {
        const auto y = static_cast<std::ptrdiff_t>(resize_coord(r, m.height(), out_h, Interp::Nearest));
        for (std::size_t c = 0; c < out_w; ++c) {
            const auto x = static_cast<std::ptrdiff_t>(resize_coord(c, m.width(), out_w, Interp::Nearest));
            out(r, c) = fetch(m, y, x, Border::Replicate, std::uint8_t{0});
        }
    }
    return out;
}

inline Sample resize(const Sample& s, std::size_t out_w, std::size_t out_h) {
    if (s.image.width() == out_w && s.image.height() == out_h) return s;
    Sample out{resize(s.image, out_w, out_h, Interp::Linear), resize(s.lv_mask, out_w, out_h), std::nullopt};
    if (s.fan_mask) out.fan_mask = resize(*s.fan_mask, out_w, out_h);
    return out;
}

struct Rect {
    std::size_t row = 0;
    std::size_t col = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    friend bool operator==(const Rect&, const Rect&) = default;
};

template <typename T>
Grid<T> crop(const Grid<T>& g, const Rect& r) {
    Grid<T> out(r.width, r.height);
    for (std::size_t y = 0; y < r.height; ++y)
        for (std::size_t x = 0; x < r.width; ++x) out(y, x) = g(r.row + y, r.col + x);
    return out;
}

/// Crop every raster to `r` and resize back to (out_w, out_h).
inline Sample crop_resize(const Sample& s, const Rect& r, std::size_t out_w, std::size_t out_h,
                          Interp image_interp = Interp::Linear) {
    Sample out{resize(crop(s.image, r), out_w, out_h, image_interp),
               resize(crop(s.lv_mask, r), out_w, out_h), std::nullopt};
    if (s.fan_mask) out.fan_mask = resize(crop(*s.fan_mask, r), out_w, out_h);
    return out;
}

/// OpenCV's sigma for a kernel size when none is given.
inline double default_sigma(int ksize) noexcept { return 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8; }

/// Sampled, normalized 1-D Gaussian of odd length `ksize`.
inline std::vector<double> gaussian_kernel(int ksize, double sigma) {
    if (ksize < 1) ksize = 1;
    if (sigma <= 0.0) sigma = default_sigma(ksize);
    std::vector<double> k(static_cast<std::size_t>(ksize));
    const double c = (ksize - 1) / 2.0;
    for (int i = 0; i < ksize; ++i) {
        const double d = i - c;
        k[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    }
    const double sum = std::accumulate(k.begin(), k.end(), 0.0);
    for (double& v : k) v /= sum;
    return k;
}

/// Separable convolution, kernels centred, reflect-101 borders. No clamping.
inline GrayImage convolve_separable(const GrayImage& img, const std::vector<double>& kx,
                                    const std::vector<double>& ky) {
    const auto w = static_cast<std::ptrdiff_t>(img.width());
    const auto h = static_cast<std::ptrdiff_t>(img.height());
    const auto rx = static_cast<std::ptrdiff_t>(kx.size() / 2);
    const auto ry = static_cast<std::ptrdiff_t>(ky.size() / 2);
    GrayImage tmp(img.width(), img.height());
    for (std::ptrdiff_t r = 0; r < h; ++r)
        for (std::ptrdiff_t c = 0; c < w; ++c) {
            double acc = 0.0;
            for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(kx.size()); ++k)
                acc += kx[static_cast<std::size_t>(k)] *
                       img(static_cast<std::size_t>(r), static_cast<std::size_t>(reflect101(c + k - rx, w)));
            tmp(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
        }
    GrayImage out(img.width(), img.height());
    for (std::ptrdiff_t r = 0; r < h; ++r)
        for (std::ptrdiff_t c = 0; c < w; ++c) {
            double acc = 0.0;
            for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(ky.size()); ++k)
                acc += ky[static_cast<std::size_t>(k)] *
                       tmp(static_cast<std::size_t>(reflect101(r + k - ry, h)), static_cast<std::size_t>(c));
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
        }
    return out;
}

/// Dense 2-D convolution (correlation) with a square odd kernel, reflect-101 borders.
inline GrayImage convolve2d(const GrayImage& img, const std::vector<double>& kernel, int ksize) {
    const auto w = static_cast<std::ptrdiff_t>(img.width());
    const auto h = static_cast<std::ptrdiff_t>(img.height());
    const std::ptrdiff_t rad = ksize / 2;
    GrayImage out(img.width(), img.height());
    for (std::ptrdiff_t r = 0; r < h; ++r)
        for (std::ptrdiff_t c = 0; c < w; ++c) {
            double acc = 0.0;
            for (std::ptrdiff_t i = 0; i < ksize; ++i) {
                const auto rr = static_cast<std::size_t>(reflect101(r + i - rad, h));
                for (std::ptrdiff_t j = 0; j < ksize; ++j) {
                    const double kv = kernel[static_cast<std::size_t>(i * ksize + j)];
                    if (kv == 0.0) continue;
                    acc += kv * img(rr, static_cast<std::size_t>(reflect101(c + j - rad, w)));
                }
            }
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = acc;
        }
    return out;
}

inline GrayImage gaussian_blur(const GrayImage& img, int ksize, double sigma) {
    const auto k = gaussian_kernel(ksize, sigma);
    return convolve_separable(img, k, k);
}

inline void clamp_inplace(GrayImage& img) noexcept {
    for (double& v : img.pixels()) v = clamp01(v);
}

}  // namespace echoaug::imgproc
