#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "echoaug/image.hpp"
#include "echoaug/imgproc.hpp"
#include "echoaug/photometric.hpp"
#include "echoaug/preset.hpp"
#include "echoaug/rng.hpp"

// Noise and image-quality transforms. Image in, image out; the LV mask is
// only consulted (never modified) by salt-and-pepper in on-mask mode, and the
// fan mask restricts speckle reduction.

namespace echoaug::noise {

/// x + N(0, variance), clamped.
inline GrayImage gauss_noise(const GrayImage& img, double variance, RngStream& rng) {
    if (variance <= 0.0) return img;
    const double sd = std::sqrt(variance);
    GrayImage out = img;
    for (double& v : out.pixels()) v = clamp01(v + rng.normal(0.0, sd));
    return out;
}

inline GrayImage gauss_noise(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const Range var = p.range("var");
    return gauss_noise(img, rng.uniform(var.lo, var.hi), rng);
}

/// x * m with m ~ U(lo, hi) independently per pixel.
inline GrayImage multiplicative_noise(const GrayImage& img, Range multiplier, RngStream& rng) {
    if (multiplier.lo == 1.0 && multiplier.hi == 1.0) return img;
    GrayImage out = img;
    for (double& v : out.pixels()) v = clamp01(v * rng.uniform(multiplier.lo, multiplier.hi));
    return out;
}

inline GrayImage multiplicative_noise(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    return multiplicative_noise(img, p.range("multiplier"), rng);
}

/// Every candidate pixel is hit with probability `amount`; a hit becomes 1
/// (salt) with probability `ratio`, else 0. With `region` set, only pixels
/// where region == 1 are candidates.
inline GrayImage salt_and_pepper(const GrayImage& img, double amount, double ratio, RngStream& rng,
                                 const BinaryMask* region = nullptr) {
    if (amount <= 0.0) return img;
    GrayImage out = img;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (region && region->pixels()[i] == 0) continue;
        if (!rng.bernoulli(amount)) continue;
        out.pixels()[i] = rng.bernoulli(ratio) ? 1.0 : 0.0;
    }
    return out;
}

inline GrayImage salt_and_pepper(const Sample& s, const ParamSet& p, RngStream& rng) {
    const Range a = p.range("amount");
    const Range r = p.range("ratio");
    const double amount = rng.uniform(a.lo, a.hi);
    const double ratio = rng.uniform(r.lo, r.hi);
    const bool on_mask = p.scalar_or("on_mask", 0.0) != 0.0;
    return salt_and_pepper(s.image, amount, ratio, rng, on_mask ? &s.lv_mask : nullptr);
}

inline GrayImage gaussian_blur(const GrayImage& img, int ksize, double sigma) {
    if (ksize <= 1) return img;
    GrayImage out = imgproc::gaussian_blur(img, ksize, sigma);
    imgproc::clamp_inplace(out);
    return out;
}

inline GrayImage gaussian_blur(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const int ksize = photometric::draw_odd_kernel(p.range("blur"), rng);
    const Range s = p.range("sigma");
    return gaussian_blur(img, ksize, rng.uniform(s.lo, s.hi));
}

/// k x k line kernel through the centre at `angle` (radians, 0 = horizontal),
/// normalized to sum 1.
inline std::vector<double> motion_kernel(int ksize, double angle) {
    std::vector<double> k(static_cast<std::size_t>(ksize * ksize), 0.0);
    const double c = (ksize - 1) / 2.0;
    const double dx = std::cos(angle);
    const double dy = -std::sin(angle);
    for (int i = 0; i < ksize; ++i) {
        const double t = static_cast<double>(i) - c;
        const auto col = static_cast<int>(std::lround(c + t * dx));
        const auto row = static_cast<int>(std::lround(c + t * dy));
        k[static_cast<std::size_t>(row * ksize + col)] = 1.0;
    }
    double sum = 0.0;
    for (double v : k) sum += v;
    for (double& v : k) v /= sum;
    return k;
}

inline GrayImage motion_blur(const GrayImage& img, int ksize, double angle) {
    if (ksize <= 1) return img;
    GrayImage out = imgproc::convolve2d(img, motion_kernel(ksize, angle), ksize);
    imgproc::clamp_inplace(out);
    return out;
}

inline GrayImage motion_blur(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const int ksize = photometric::draw_odd_kernel(p.range("blur"), rng);
    const double angle = rng.uniform(0.0, std::numbers::pi);
    return motion_blur(img, ksize, angle);
}

inline imgproc::Interp interp_code(double code) {
    return code == 0 ? imgproc::Interp::Nearest : imgproc::Interp::Linear;
}

/// Resize down by `scale` and back up to the original size.
inline GrayImage downscale(const GrayImage& img, double scale, imgproc::Interp down, imgproc::Interp up) {
    if (scale >= 1.0) return img;
    const auto dw = static_cast<std::size_t>(std::max(1.0, std::round(static_cast<double>(img.width()) * scale)));
    const auto dh = static_cast<std::size_t>(std::max(1.0, std::round(static_cast<double>(img.height()) * scale)));
    const GrayImage small = imgproc::resize(img, dw, dh, down);
    return imgproc::resize(small, img.width(), img.height(), up);
}

inline GrayImage downscale(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const Range s = p.range("scale");
    return downscale(img, rng.uniform(s.lo, s.hi), interp_code(p.scalar("interp_down")),
                     interp_code(p.scalar("interp_up")));
}

// --- block-DCT compression -------------------------------------------------

inline constexpr std::array<int, 64> kLumaQuant{
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

/// Standard quality scaling of the luminance table (quality 1..100).
inline std::array<int, 64> quant_table(int quality) {
    quality = std::clamp(quality, 1, 100);
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    std::array<int, 64> q{};
    for (std::size_t i = 0; i < 64; ++i) q[i] = std::clamp((kLumaQuant[i] * scale + 50) / 100, 1, 255);
    return q;
}

namespace detail {

inline const std::array<double, 64>& dct_basis() {
    static const std::array<double, 64> basis = [] {
        std::array<double, 64> b{};
        for (int u = 0; u < 8; ++u)
            for (int x = 0; x < 8; ++x) {
                const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
                b[static_cast<std::size_t>(u * 8 + x)] = cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
            }
        return b;
    }();
    return basis;
}

}  // namespace detail

/// Luma-only 8x8 block DCT encode/decode at `quality`. Edge blocks are padded
/// by replication.
inline GrayImage jpeg_roundtrip(const GrayImage& img, int quality) {
    const auto& B = detail::dct_basis();
    const auto q = quant_table(quality);
    const std::size_t w = img.width();
    const std::size_t h = img.height();
    GrayImage out(w, h);
    std::array<double, 64> block{}, tmp{}, coef{};
    for (std::size_t by = 0; by < h; by += 8)
        for (std::size_t bx = 0; bx < w; bx += 8) {
            for (std::size_t y = 0; y < 8; ++y)
                for (std::size_t x = 0; x < 8; ++x)
                    block[y * 8 + x] = static_cast<double>(to_u8(img(std::min(by + y, h - 1), std::min(bx + x, w - 1)))) - 128.0;
            // forward: coef = B * block * B^T
            for (std::size_t u = 0; u < 8; ++u)
                for (std::size_t x = 0; x < 8; ++x) {
                    double acc = 0;
                    for (std::size_t y = 0; y < 8; ++y) acc += B[u * 8 + y] * block[y * 8 + x];
                    tmp[u * 8 + x] = acc;
                }
            for (std::size_t u = 0; u < 8; ++u)
                for (std::size_t v = 0; v < 8; ++v) {
                    double acc = 0;
                    for (std::size_t x = 0; x < 8; ++x) acc += tmp[u * 8 + x] * B[v * 8 + x];
                    const double qv = q[u * 8 + v];
                    coef[u * 8 + v] = std::round(acc / qv) * qv;
                }
            // inverse: block = B^T * coef * B
            for (std::size_t y = 0; y < 8; ++y)
                for (std::size_t v = 0; v < 8; ++v) {
                    double acc = 0;
                    for (std::size_t u = 0; u < 8; ++u) acc += B[u * 8 + y] * coef[u * 8 + v];
                    tmp[y * 8 + v] = acc;
                }
            for (std::size_t y = 0; y < 8 && by + y < h; ++y)
                for (std::size_t x = 0; x < 8 && bx + x < w; ++x) {
                    double acc = 0;
                    for (std::size_t v = 0; v < 8; ++v) acc += tmp[y * 8 + v] * B[v * 8 + x];
                    out(by + y, bx + x) = std::clamp(std::round(acc + 128.0), 0.0, 255.0) / 255.0;
                }
        }
    return out;
}

inline GrayImage image_compression(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const Range qr = p.range("quality");
    const auto quality = static_cast<int>(rng.uniform_int(static_cast<std::int64_t>(std::llround(qr.lo)),
                                                          static_cast<std::int64_t>(std::llround(qr.hi))));
    return jpeg_roundtrip(img, quality);
}

// --- speckle reduction -----------------------------------------------------

/// Bilateral filter over a window x window neighbourhood (reflect-101),
/// evaluated only where fan == 1; other pixels are copied unchanged.
/// sigma_spatial is in pixels, sigma_color in normalized intensity.
inline GrayImage bilateral_in_fan(const GrayImage& img, const BinaryMask& fan, int window, double sigma_spatial,
                                  double sigma_color) {
    if (!img.same_shape(fan)) throw ValidationError("fan mask dimensions differ from image");
    if (window <= 1 || sigma_spatial <= 0.0) return img;
    const int rad = window / 2;
    const auto w = static_cast<std::ptrdiff_t>(img.width());
    const auto h = static_cast<std::ptrdiff_t>(img.height());
    std::vector<double> spatial(static_cast<std::size_t>((2 * rad + 1) * (2 * rad + 1)));
    for (int dy = -rad; dy <= rad; ++dy)
        for (int dx = -rad; dx <= rad; ++dx)
            spatial[static_cast<std::size_t>((dy + rad) * (2 * rad + 1) + dx + rad)] =
                std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_spatial * sigma_spatial));
    const double inv_two_sc2 = 1.0 / (2.0 * sigma_color * sigma_color);
    GrayImage out = img;
    for (std::ptrdiff_t r = 0; r < h; ++r)
        for (std::ptrdiff_t c = 0; c < w; ++c) {
            if (fan(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) == 0) continue;
            const double center = img(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            double num = 0.0, den = 0.0;
            for (int dy = -rad; dy <= rad; ++dy) {
                const auto rr = static_cast<std::size_t>(imgproc::reflect101(r + dy, h));
                for (int dx = -rad; dx <= rad; ++dx) {
                    const double v = img(rr, static_cast<std::size_t>(imgproc::reflect101(c + dx, w)));
                    const double d = v - center;
                    const double wgt =
                        spatial[static_cast<std::size_t>((dy + rad) * (2 * rad + 1) + dx + rad)] * std::exp(-d * d * inv_two_sc2);
                    num += wgt * v;
                    den += wgt;
                }
            }
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = clamp01(num / den);
        }
    return out;
}

inline GrayImage speckle_reduction(const Sample& s, const ParamSet& p, RngStream& rng) {
    if (!s.fan_mask)
        throw ValidationError("SpeckleReduction needs a fan mask; extract one with the fan_mask module first");
    const Range ss = p.range("sigma_spatial");
    const Range sc = p.range("sigma_color");
    const double sigma_spatial = rng.uniform(ss.lo, ss.hi);
    const double sigma_color = rng.uniform(sc.lo, sc.hi);
    return bilateral_in_fan(s.image, *s.fan_mask, static_cast<int>(p.scalar("window")), sigma_spatial, sigma_color);
}

}  // namespace echoaug::noise
