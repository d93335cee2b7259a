#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "echoaug/errors.hpp"
#include "echoaug/image.hpp"
#include "echoaug/preset.hpp"
#include "echoaug/rng.hpp"

// Ultrasound-specific transforms. All of them act only inside the fan mask
// and leave every other pixel bit-identical.

namespace echoaug::echo {

struct FanGeometry {
    double apex_row = 0.0;
    double apex_col = 0.0;
    double max_radius = 1.0;

    /// Normalized radial distance from the apex, 1 at the farthest fan pixel.
    [[nodiscard]] double depth(double row, double col) const noexcept {
        return std::hypot(row - apex_row, col - apex_col) / max_radius;
    }
};

namespace detail {

struct LineFit {
    double intercept;
    double slope;
    bool ok;
};

// Least squares col = intercept + slope * row.
inline LineFit fit_line(const std::vector<double>& rows, const std::vector<double>& cols) {
    const auto n = static_cast<double>(rows.size());
    if (rows.size() < 3) return {0, 0, false};
    double sr = 0, sc = 0, srr = 0, src = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        sr += rows[i];
        sc += cols[i];
        srr += rows[i] * rows[i];
        src += rows[i] * cols[i];
    }
    const double den = n * srr - sr * sr;
    if (std::abs(den) < 1e-12) return {0, 0, false};
    const double slope = (n * src - sr * sc) / den;
    return {(sc - slope * sr) / n, slope, true};
}

}  // namespace detail

/// Apex from the two straight sector edges. Per row the outermost fan pixel
/// boundaries are collected; each edge is fitted over the rows above its
/// widest point (upper 80 %, away from the arc). Parallel or degenerate fits
/// fall back to the centre of the first mask row.
inline FanGeometry fit_fan_geometry(const BinaryMask& fan) {
    const std::size_t w = fan.width();
    const std::size_t h = fan.height();
    std::vector<double> rows, lefts, rights;
    for (std::size_t r = 0; r < h; ++r) {
        std::size_t lo = w, hi = 0;
        for (std::size_t c = 0; c < w; ++c)
            if (fan(r, c)) {
                lo = std::min(lo, c);
                hi = c;
            }
        if (lo == w) continue;
        rows.push_back(static_cast<double>(r));
        lefts.push_back(static_cast<double>(lo) - 0.5);
        rights.push_back(static_cast<double>(hi) + 0.5);
    }
    if (rows.empty()) throw ValidationError("fan mask is empty");

    FanGeometry g;
    g.apex_row = rows.front();
    g.apex_col = (lefts.front() + rights.front()) / 2.0;

    auto upper_span = [&](const std::vector<double>& edge, bool left) {
        std::size_t extreme = 0;
        for (std::size_t i = 1; i < edge.size(); ++i)
            if (left ? edge[i] < edge[extreme] : edge[i] > edge[extreme]) extreme = i;
        const auto n = static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(extreme + 1)));
        return detail::fit_line(std::vector<double>(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n)),
                                std::vector<double>(edge.begin(), edge.begin() + static_cast<std::ptrdiff_t>(n)));
    };
    const auto lf = upper_span(lefts, true);
    const auto rf = upper_span(rights, false);
    if (lf.ok && rf.ok && std::abs(lf.slope - rf.slope) > 1e-6) {
        const double row = (rf.intercept - lf.intercept) / (lf.slope - rf.slope);
        // The apex must lie at or above the first mask row.
        if (row <= rows.front() + 1.0) {
            g.apex_row = row;
            g.apex_col = lf.intercept + lf.slope * row;
        }
    }

    double rmax = 0.0;
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c)
            if (fan(r, c))
                rmax = std::max(rmax, std::hypot(static_cast<double>(r) - g.apex_row, static_cast<double>(c) - g.apex_col));
    g.max_radius = rmax > 0.0 ? rmax : 1.0;
    return g;
}

inline const BinaryMask& require_fan(const Sample& s, const char* transform) {
    if (!s.fan_mask)
        throw ValidationError(std::string(transform) + " needs a fan mask; extract one with the fan_mask module first");
    return *s.fan_mask;
}

/// gain(d) = 1 - min(max_attenuation, 1) (1 - exp(-rate d))
inline double attenuation_gain(double depth, double rate, double max_attenuation) noexcept {
    return 1.0 - std::min(max_attenuation, 1.0) * (1.0 - std::exp(-rate * depth));
}

inline GrayImage depth_attenuation(const GrayImage& img, const BinaryMask& fan, const FanGeometry& g, double rate,
                                   double max_attenuation) {
    if (rate == 0.0 || max_attenuation <= 0.0) return img;
    GrayImage out = img;
    for (std::size_t r = 0; r < img.height(); ++r)
        for (std::size_t c = 0; c < img.width(); ++c)
            if (fan(r, c))
                out(r, c) = clamp01(img(r, c) *
                                    attenuation_gain(g.depth(static_cast<double>(r), static_cast<double>(c)), rate, max_attenuation));
    return out;
}

inline GrayImage depth_attenuation(const Sample& s, const ParamSet& p, RngStream& rng) {
    const BinaryMask& fan = require_fan(s, "DepthAttenuation");
    const Range rr = p.range("rate");
    const Range mr = p.range("max_attenuation");
    const double rate = rng.uniform(rr.lo, rr.hi);
    const double max_att = rng.uniform(mr.lo, mr.hi);
    return depth_attenuation(s.image, fan, fit_fan_geometry(fan), rate, max_att);
}

/// x (1 - strength exp(-((dx/sx)^2 + (dy/sy)^2) / 2)) inside the fan; sigmas in pixels.
inline GrayImage gaussian_shadow(const GrayImage& img, const BinaryMask& fan, double center_row, double center_col,
                                 double strength, double sigma_x, double sigma_y) {
    if (strength == 0.0) return img;
    GrayImage out = img;
    for (std::size_t r = 0; r < img.height(); ++r)
        for (std::size_t c = 0; c < img.width(); ++c) {
            if (!fan(r, c)) continue;
            const double dx = (static_cast<double>(c) - center_col) / sigma_x;
            const double dy = (static_cast<double>(r) - center_row) / sigma_y;
            out(r, c) = clamp01(img(r, c) * (1.0 - strength * std::exp(-(dx * dx + dy * dy) / 2.0)));
        }
    return out;
}

inline GrayImage gaussian_shadow(const Sample& s, const ParamSet& p, RngStream& rng) {
    const BinaryMask& fan = require_fan(s, "GaussianShadow");
    const Range st = p.range("strength");
    const Range sx = p.range("sigma_x");
    const Range sy = p.range("sigma_y");
    const double strength = rng.uniform(st.lo, st.hi);
    const double sigma_x = rng.uniform(sx.lo, sx.hi) * static_cast<double>(s.image.width());
    const double sigma_y = rng.uniform(sy.lo, sy.hi) * static_cast<double>(s.image.height());
    const std::size_t n = count_positive(fan);
    if (n == 0) return s.image;
    auto pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    std::size_t idx = 0;
    for (; idx < fan.size(); ++idx)
        if (fan.pixels()[idx] && pick-- == 0) break;
    const auto row = static_cast<double>(idx / fan.width());
    const auto col = static_cast<double>(idx % fan.width());
    return gaussian_shadow(s.image, fan, row, col, strength, sigma_x, sigma_y);
}

/// clamp(x + amplitude exp(-((depth - radius) / sigma)^2 / 2)) inside the fan.
inline GrayImage haze(const GrayImage& img, const BinaryMask& fan, const FanGeometry& g, double radius, double sigma,
                      double amplitude) {
    if (amplitude == 0.0 || sigma <= 0.0) return img;
    GrayImage out = img;
    for (std::size_t r = 0; r < img.height(); ++r)
        for (std::size_t c = 0; c < img.width(); ++c) {
            if (!fan(r, c)) continue;
            const double z = (g.depth(static_cast<double>(r), static_cast<double>(c)) - radius) / sigma;
            out(r, c) = clamp01(img(r, c) + amplitude * std::exp(-z * z / 2.0));
        }
    return out;
}

inline GrayImage haze_artifact(const Sample& s, const ParamSet& p, RngStream& rng) {
    const BinaryMask& fan = require_fan(s, "HazeArtifact");
    const Range rr = p.range("radius");
    const Range sr = p.range("sigma");
    const double radius = rng.uniform(rr.lo, rr.hi);
    const double sigma = rng.uniform(sr.lo, sr.hi);
    return haze(s.image, fan, fit_fan_geometry(fan), radius, sigma, p.scalar("amplitude"));
}

}  // namespace echoaug::echo
