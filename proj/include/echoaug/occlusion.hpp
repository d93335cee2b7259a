#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "echoaug/image.hpp"
#include "echoaug/imgproc.hpp"
#include "echoaug/preset.hpp"
#include "echoaug/rng.hpp"

// Occlusion transforms. Only the image is corrupted; the LV mask stays the
// supervision target.

namespace echoaug::occlusion {

using imgproc::Rect;

inline void fill_rect(GrayImage& img, const Rect& r, double value) {
    for (std::size_t y = r.row; y < r.row + r.height; ++y)
        for (std::size_t x = r.col; x < r.col + r.width; ++x) img(y, x) = value;
}

/// Hole rectangles: count in `holes`, side lengths int(frac * dim) with frac
/// drawn from `height` / `width`, placed fully inside the image.
inline std::vector<Rect> draw_holes(std::size_t w, std::size_t h, const ParamSet& p, RngStream& rng) {
    const Range holes = p.range("holes");
    const Range hr = p.range("height");
    const Range wr = p.range("width");
    const auto n = rng.uniform_int(static_cast<std::int64_t>(std::llround(holes.lo)),
                                   static_cast<std::int64_t>(std::llround(holes.hi)));
    const auto hmin = static_cast<std::int64_t>(hr.lo * static_cast<double>(h));
    const auto hmax = static_cast<std::int64_t>(hr.hi * static_cast<double>(h));
    const auto wmin = static_cast<std::int64_t>(wr.lo * static_cast<double>(w));
    const auto wmax = static_cast<std::int64_t>(wr.hi * static_cast<double>(w));
    std::vector<Rect> out;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto hh = static_cast<std::size_t>(std::clamp<std::int64_t>(rng.uniform_int(hmin, hmax), 1,
                                                                          static_cast<std::int64_t>(h)));
        const auto ww = static_cast<std::size_t>(std::clamp<std::int64_t>(rng.uniform_int(wmin, wmax), 1,
                                                                          static_cast<std::int64_t>(w)));
        const auto row = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(h - hh)));
        const auto col = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(w - ww)));
        out.push_back(Rect{row, col, hh, ww});
    }
    return out;
}

inline GrayImage coarse_dropout(const GrayImage& img, const std::vector<Rect>& holes, double fill) {
    GrayImage out = img;
    for (const auto& r : holes) fill_rect(out, r, fill);
    return out;
}

inline GrayImage coarse_dropout(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const auto holes = draw_holes(img.width(), img.height(), p, rng);
    return coarse_dropout(img, holes, clamp01(p.scalar("fill")));
}

/// Erasing rectangle with area fraction in `scale` and log-uniform aspect
/// ratio (height / width) in `ratio`; nullopt after 10 failed placements.
inline std::optional<Rect> draw_erasing_rect(std::size_t w, std::size_t h, Range scale, Range ratio, RngStream& rng) {
    const double area = static_cast<double>(w) * static_cast<double>(h);
    const double log_lo = std::log(ratio.lo);
    const double log_hi = std::log(ratio.hi);
    for (int attempt = 0; attempt < 10; ++attempt) {
        const double target = rng.uniform(scale.lo, scale.hi) * area;
        const double ar = std::exp(rng.uniform(log_lo, log_hi));
        const auto eh = static_cast<std::size_t>(std::llround(std::sqrt(target * ar)));
        const auto ew = static_cast<std::size_t>(std::llround(std::sqrt(target / ar)));
        if (eh == 0 || ew == 0 || eh >= h || ew >= w) continue;
        const double frac = static_cast<double>(eh) * static_cast<double>(ew) / area;
        if (frac < scale.lo || frac > scale.hi) continue;
        const auto row = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(h - eh)));
        const auto col = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(w - ew)));
        return Rect{row, col, eh, ew};
    }
    return std::nullopt;
}

inline GrayImage random_erasing(const GrayImage& img, const ParamSet& p, RngStream& rng) {
    const auto rect = draw_erasing_rect(img.width(), img.height(), p.range("scale"), p.range("ratio"), rng);
    if (!rect) return img;
    GrayImage out = img;
    if (p.scalar_or("random_fill", 0.0) != 0.0) {
        for (std::size_t y = rect->row; y < rect->row + rect->height; ++y)
            for (std::size_t x = rect->col; x < rect->col + rect->width; ++x) out(y, x) = rng.uniform();
    } else {
        fill_rect(out, *rect, clamp01(p.scalar("fill")));
    }
    return out;
}

}  // namespace echoaug::occlusion
