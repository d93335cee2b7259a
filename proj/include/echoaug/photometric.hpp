#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "echoaug/image.hpp"
#include "echoaug/imgproc.hpp"
#include "echoaug/preset.hpp"
#include "echoaug/rng.hpp"

// Intensity-only transforms. Masks are never read or written here; callers
// pass the image alone.

namespace echoaug::photometric {

/// clamp((x - 0.5)(1 + contrast) + 0.5 + brightness)
inline GrayImage brightness_contrast(const GrayImage& img, double brightness, double contrast) {
    if (brightness == 0.0 && contrast == 0.0) return img;
    GrayImage out = img;
    for (double& v : out.pixels()) v = clamp01((v - 0.5) * (1.0 + contrast) + 0.5 + brightness);
    return out;
}

inline GrayImage random_brightness_contrast(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const Range b = p.range("brightness");
    const Range c = p.range("contrast");
    const double gb = rng.uniform(b.lo, b.hi);
    const double gc = rng.uniform(c.lo, c.hi);
    return brightness_contrast(img, gb, gc);
}

/// x^(gamma_percent / 100)
inline GrayImage gamma(const GrayImage& img, double gamma_percent) {
    if (gamma_percent == 100.0) return img;
    const double e = gamma_percent / 100.0;
    GrayImage out = img;
    for (double& v : out.pixels()) v = clamp01(std::pow(v, e));
    return out;
}

inline GrayImage random_gamma(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const Range g = p.range("gamma");
    return gamma(img, rng.uniform(g.lo, g.hi));
}

// --- CLAHE -----------------------------------------------------------------

/// Contrast-limited adaptive histogram equalization on the 8-bit quantization.
///
/// The image is padded (reflect-101) up to a multiple of the grid so tiles are
/// equal. Each tile histogram (256 bins) is clipped at
/// max(1, clip_limit * tile_area / 256); the excess is spread evenly over all
/// bins with the remainder going to every `256 / remainder`-th bin. Tile
/// lookup tables are blended bilinearly between tile centres.
inline GrayImage clahe(const GrayImage& img, double clip_limit, std::size_t grid_x, std::size_t grid_y) {
    constexpr int kBins = 256;
    const std::size_t w = img.width();
    const std::size_t h = img.height();
    grid_x = std::max<std::size_t>(1, grid_x);
    grid_y = std::max<std::size_t>(1, grid_y);
    const std::size_t tile_w = (w + grid_x - 1) / grid_x;
    const std::size_t tile_h = (h + grid_y - 1) / grid_y;
    const std::size_t tile_area = tile_w * tile_h;

    Grid<std::uint8_t> q(grid_x * tile_w, grid_y * tile_h);
    for (std::size_t r = 0; r < q.height(); ++r)
        for (std::size_t c = 0; c < q.width(); ++c)
            q(r, c) = to_u8(img(static_cast<std::size_t>(imgproc::reflect101(static_cast<std::ptrdiff_t>(r),
                                                                               static_cast<std::ptrdiff_t>(h))),
                                static_cast<std::size_t>(imgproc::reflect101(static_cast<std::ptrdiff_t>(c),
                                                                               static_cast<std::ptrdiff_t>(w)))));

    std::size_t clip = tile_area;
    if (clip_limit > 0.0)
        clip = std::max<std::size_t>(1, static_cast<std::size_t>(clip_limit * static_cast<double>(tile_area) / kBins));

    const double lut_scale = 255.0 / static_cast<double>(tile_area);
    std::vector<std::array<std::uint8_t, kBins>> luts(grid_x * grid_y);
    for (std::size_t ty = 0; ty < grid_y; ++ty)
        for (std::size_t tx = 0; tx < grid_x; ++tx) {
            std::array<std::size_t, kBins> hist{};
            for (std::size_t r = ty * tile_h; r < (ty + 1) * tile_h; ++r)
                for (std::size_t c = tx * tile_w; c < (tx + 1) * tile_w; ++c) ++hist[q(r, c)];
            if (clip < tile_area) {
                std::size_t excess = 0;
                for (auto& b : hist)
                    if (b > clip) {
                        excess += b - clip;
                        b = clip;
                    }
                const std::size_t batch = excess / kBins;
                const std::size_t residual = excess - batch * kBins;
                for (auto& b : hist) b += batch;
                if (residual != 0) {
                    const std::size_t step = std::max<std::size_t>(kBins / residual, 1);
                    for (std::size_t i = 0, left = residual; i < kBins && left > 0; i += step, --left) ++hist[i];
                }
            }
            auto& lut = luts[ty * grid_x + tx];
            std::size_t cum = 0;
            for (int i = 0; i < kBins; ++i) {
                cum += hist[static_cast<std::size_t>(i)];
                lut[static_cast<std::size_t>(i)] =
                    static_cast<std::uint8_t>(std::min(255.0, std::round(static_cast<double>(cum) * lut_scale)));
            }
        }

    GrayImage out(w, h);
    const double inv_tw = 1.0 / static_cast<double>(tile_w);
    const double inv_th = 1.0 / static_cast<double>(tile_h);
    for (std::size_t r = 0; r < h; ++r) {
        const double ty = static_cast<double>(r) * inv_th - 0.5;
        auto ty1 = static_cast<std::ptrdiff_t>(std::floor(ty));
        const double ya = ty - static_cast<double>(ty1);
        auto ty2 = ty1 + 1;
        ty1 = std::max<std::ptrdiff_t>(ty1, 0);
        ty2 = std::min<std::ptrdiff_t>(ty2, static_cast<std::ptrdiff_t>(grid_y) - 1);
        for (std::size_t c = 0; c < w; ++c) {
            const double tx = static_cast<double>(c) * inv_tw - 0.5;
            auto tx1 = static_cast<std::ptrdiff_t>(std::floor(tx));
            const double xa = tx - static_cast<double>(tx1);
            auto tx2 = tx1 + 1;
            tx1 = std::max<std::ptrdiff_t>(tx1, 0);
            tx2 = std::min<std::ptrdiff_t>(tx2, static_cast<std::ptrdiff_t>(grid_x) - 1);
            const std::uint8_t v = q(r, c);
            auto at = [&](std::ptrdiff_t yy, std::ptrdiff_t xx) {
                return static_cast<double>(luts[static_cast<std::size_t>(yy) * grid_x + static_cast<std::size_t>(xx)][v]);
            };
            const double res = (at(ty1, tx1) * (1.0 - xa) + at(ty1, tx2) * xa) * (1.0 - ya) +
                               (at(ty2, tx1) * (1.0 - xa) + at(ty2, tx2) * xa) * ya;
            out(r, c) = clamp01(std::round(res) / 255.0);
        }
    }
    return out;
}

inline GrayImage clahe(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const Range clip = p.range("clip_limit");
    const double limit = rng.uniform(clip.lo, clip.hi);
    const Range grid = p.range("tile_grid");
    return clahe(img, limit, static_cast<std::size_t>(grid.lo), static_cast<std::size_t>(grid.hi));
}

// --- colour jitter (grayscale) ---------------------------------------------

/// Brightness then contrast: y = clamp(x * fb); out = clamp((y - mean(y)) * fc + mean(y)).
inline GrayImage color_jitter(const GrayImage& img, double fb, double fc) {
    if (fb == 1.0 && fc == 1.0) return img;
    GrayImage out = img;
    for (double& v : out.pixels()) v = clamp01(v * fb);
    if (fc != 1.0) {
        const double m = std::accumulate(out.pixels().begin(), out.pixels().end(), 0.0) /
                         static_cast<double>(out.size());
        for (double& v : out.pixels()) v = clamp01((v - m) * fc + m);
    }
    return out;
}

inline GrayImage color_jitter(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const Range b = p.range("brightness");
    const Range c = p.range("contrast");
    const double fb = rng.uniform(b.lo, b.hi);
    const double fc = rng.uniform(c.lo, c.hi);
    return color_jitter(img, fb, fc);
}

// --- sharpening ------------------------------------------------------------

/// (1 - alpha) * identity + alpha * [[-1,-1,-1],[-1,8+L,-1],[-1,-1,-1]]
inline std::vector<double> sharpen_kernel(double alpha, double lightness) {
    std::vector<double> k(9, -alpha);
    k[4] = (1.0 - alpha) + alpha * (8.0 + lightness);
    return k;
}

inline GrayImage sharpen(const GrayImage& img, double alpha, double lightness) {
    if (alpha == 0.0) return img;
    GrayImage out = imgproc::convolve2d(img, sharpen_kernel(alpha, lightness), 3);
    imgproc::clamp_inplace(out);
    return out;
}

inline GrayImage sharpen(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const Range a = p.range("alpha");
    const Range l = p.range("lightness");
    const double alpha = rng.uniform(a.lo, a.hi);
    const double lightness = rng.uniform(l.lo, l.hi);
    return sharpen(img, alpha, lightness);
}

/// Odd kernel size drawn uniformly from the odd integers in [lo, hi]. When
/// the range holds none, the next odd value above lo.
inline int draw_odd_kernel(Range r, RngStream& rng) {
    auto lo = static_cast<std::int64_t>(std::ceil(r.lo));
    auto hi = static_cast<std::int64_t>(std::floor(r.hi));
    if (lo % 2 == 0) ++lo;
    if (hi % 2 == 0) --hi;
    if (hi < lo) return static_cast<int>(lo);
    const std::int64_t count = (hi - lo) / 2 + 1;
    return static_cast<int>(lo + 2 * rng.uniform_int(0, count - 1));
}

/// x + alpha (x - blur(x)) where |x - blur(x)| >= threshold; other pixels unchanged.
inline GrayImage unsharp_mask(const GrayImage& img, int ksize, double sigma, double alpha, double threshold) {
    if (alpha == 0.0) return img;
    const GrayImage blurred = imgproc::gaussian_blur(img, ksize, sigma);
    GrayImage out = img;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = img.pixels()[i];
        const double residual = x - blurred.pixels()[i];
        if (std::abs(residual) < threshold) continue;
        out.pixels()[i] = clamp01(x + alpha * residual);
    }
    return out;
}

inline GrayImage unsharp_mask(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const int ksize = draw_odd_kernel(p.range("blur"), rng);
    const Range s = p.range("sigma");
    const double sigma = rng.uniform(s.lo, s.hi);
    const Range a = p.range("alpha");
    const double alpha = rng.uniform(a.lo, a.hi);
    return unsharp_mask(img, ksize, sigma, alpha, p.scalar("threshold"));
}

// --- windowing -------------------------------------------------------------

/// clamp((x - (center - width/2)) / width)
inline GrayImage intensity_window(const GrayImage& img, double center, double width) {
    if (!(width > 0.0)) throw ValidationError("window width must be positive");
    if (center == 0.5 && width == 1.0) return img;
    const double low = center - width / 2.0;
    GrayImage out = img;
    for (double& v : out.pixels()) v = clamp01((v - low) / width);
    return out;
}

inline GrayImage intensity_windowing(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const Range c = p.range("center");
    const Range wr = p.range("width");
    if (!(wr.hi > 0.0)) throw ValidationError("window width range must be positive");
    const double center = rng.uniform(c.lo, c.hi);
    double width = rng.uniform(wr.lo, wr.hi);
    for (int tries = 0; !(width > 0.0) && tries < 100; ++tries) width = rng.uniform(wr.lo, wr.hi);
    if (!(width > 0.0)) width = wr.hi;
    return intensity_window(img, center, width);
}

}  // namespace echoaug::photometric
