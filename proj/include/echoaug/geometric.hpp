#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "echoaug/image.hpp"
#include "echoaug/imgproc.hpp"
#include "echoaug/preset.hpp"
#include "echoaug/rng.hpp"

// Geometric transforms. Every function moves image, lv_mask and fan_mask with
// the same spatial map; images are interpolated bilinearly, masks by nearest
// neighbour. Pixel-valued parameters (crop sizes, elastic magnitudes) are
// defined at a 512-pixel working size and scale with the actual image size.

namespace echoaug::geometric {

inline constexpr double kReferenceSize = 512.0;

using imgproc::Point;
using imgproc::Rect;

inline double reference_scale(const GrayImage& img) noexcept {
    return std::sqrt(static_cast<double>(img.width()) * static_cast<double>(img.height())) / kReferenceSize;
}

inline std::size_t scaled_extent(double size_at_reference, std::size_t actual) noexcept {
    const double v = std::round(size_at_reference * static_cast<double>(actual) / kReferenceSize);
    return static_cast<std::size_t>(std::max(1.0, v));
}

// --- horizontal flip -------------------------------------------------------

template <typename T>
Grid<T> flip_columns(const Grid<T>& g) {
    Grid<T> out(g.width(), g.height());
    for (std::size_t r = 0; r < g.height(); ++r)
        for (std::size_t c = 0; c < g.width(); ++c) out(r, c) = g(r, g.width() - 1 - c);
    return out;
}

inline Sample horizontal_flip(const Sample& s) {
    Sample out{flip_columns(s.image), flip_columns(s.lv_mask), std::nullopt};
    if (s.fan_mask) out.fan_mask = flip_columns(*s.fan_mask);
    return out;
}

// --- affine family ---------------------------------------------------------

/// One concrete similarity transform about the image centre. Positive angles
/// rotate counter-clockwise on screen; translations are fractions of width/height.
struct AffineDraw {
    double angle_deg = 0.0;
    double tx = 0.0;
    double ty = 0.0;
    double scale = 1.0;
};

/// 2x3 matrix row-major: x' = m[0] x + m[1] y + m[2]; y' = m[3] x + m[4] y + m[5].
using Affine2x3 = std::array<double, 6>;

inline Affine2x3 forward_matrix(const AffineDraw& d, std::size_t w, std::size_t h) noexcept {
    const double cx = (static_cast<double>(w) - 1.0) / 2.0;
    const double cy = (static_cast<double>(h) - 1.0) / 2.0;
    const double theta = d.angle_deg * std::numbers::pi / 180.0;
    const double a = d.scale * std::cos(theta);
    const double b = d.scale * std::sin(theta);
    const double tx = d.tx * static_cast<double>(w);
    const double ty = d.ty * static_cast<double>(h);
    return {a, b, (1.0 - a) * cx - b * cy + tx, -b, a, b * cx + (1.0 - a) * cy + ty};
}

inline std::optional<Affine2x3> invert(const Affine2x3& m) noexcept {
    const double det = m[0] * m[4] - m[1] * m[3];
    if (std::abs(det) < 1e-12) return std::nullopt;
    const double i0 = m[4] / det, i1 = -m[1] / det, i3 = -m[3] / det, i4 = m[0] / det;
    return Affine2x3{i0, i1, -(i0 * m[2] + i1 * m[5]), i3, i4, -(i3 * m[2] + i4 * m[5])};
}

inline Point apply(const Affine2x3& m, double x, double y) noexcept {
    return {m[0] * x + m[1] * y + m[2], m[3] * x + m[4] * y + m[5]};
}

/// Inverse map written directly so the zero transform lands on integral
/// coordinates exactly.
inline Sample affine_warp(const Sample& s, const AffineDraw& d, const imgproc::RemapOptions& opt = {}) {
    const std::size_t w = s.image.width();
    const std::size_t h = s.image.height();
    const double cx = (static_cast<double>(w) - 1.0) / 2.0;
    const double cy = (static_cast<double>(h) - 1.0) / 2.0;
    const double theta = d.angle_deg * std::numbers::pi / 180.0;
    const double cs = std::cos(theta) / d.scale;
    const double sn = std::sin(theta) / d.scale;
    const double tx = d.tx * static_cast<double>(w);
    const double ty = d.ty * static_cast<double>(h);
    return imgproc::remap(s, w, h, [&](double x, double y) {
        const double u = x - cx - tx;
        const double v = y - cy - ty;
        return Point{cx + cs * u - sn * v, cy + sn * u + cs * v};
    }, opt);
}

/// Affine: independent draws of rotation, x/y translation and isotropic scale.
inline AffineDraw draw_affine(const ParamSet& p, RngStream& rng) {
    AffineDraw d;
    const Range rot = p.range("rotate");
    const Range tr = p.range("translate");
    const Range sc = p.range("scale");
    d.angle_deg = rng.uniform(rot.lo, rot.hi);
    d.tx = rng.uniform(tr.lo, tr.hi);
    d.ty = rng.uniform(tr.lo, tr.hi);
    d.scale = rng.uniform(sc.lo, sc.hi);
    return d;
}

inline Sample affine(const Sample& s, const ParamSet& p, RngStream& rng, imgproc::Interp image_interp = imgproc::Interp::Linear) {
    imgproc::RemapOptions opt;
    opt.image_interp = image_interp;
    return affine_warp(s, draw_affine(p, rng), opt);
}

inline AffineDraw draw_shift_scale_rotate(const ParamSet& p, RngStream& rng) {
    AffineDraw d;
    const Range sh = p.range("shift");
    const Range sc = p.range("scale");
    const Range rot = p.range("rotate");
    d.angle_deg = rng.uniform(rot.lo, rot.hi);
    d.scale = rng.uniform(sc.lo, sc.hi);
    d.tx = rng.uniform(sh.lo, sh.hi);
    d.ty = rng.uniform(sh.lo, sh.hi);
    return d;
}

inline Sample shift_scale_rotate(const Sample& s, const ParamSet& p, RngStream& rng, imgproc::Interp image_interp = imgproc::Interp::Linear) {
    imgproc::RemapOptions opt;
    opt.image_interp = image_interp;
    opt.border = imgproc::Border::Constant;
    opt.image_fill = p.scalar_or("fill", 0.0);
    return affine_warp(s, draw_shift_scale_rotate(p, rng), opt);
}

// --- perspective -----------------------------------------------------------

/// Row-major 3x3 projective map.
struct Homography {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    [[nodiscard]] Point apply(Point p) const noexcept {
        const double w = m[6] * p.x + m[7] * p.y + m[8];
        return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
    }
};

/// Solves A x = b in place by Gaussian elimination with partial pivoting.
template <std::size_t N>
std::optional<std::array<double, N>> solve_linear(std::array<std::array<double, N + 1>, N> a) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-12) return std::nullopt;
        std::swap(a[col], a[pivot]);
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k <= N; ++k) a[r][k] -= f * a[col][k];
        }
    }
    std::array<double, N> x{};
    for (std::size_t i = N; i-- > 0;) {
        double acc = a[i][N];
        for (std::size_t k = i + 1; k < N; ++k) acc -= a[i][k] * x[k];
        x[i] = acc / a[i][i];
    }
    return x;
}

/// Homography with h33 = 1 mapping src[i] -> dst[i]; nullopt when degenerate.
inline std::optional<Homography> homography_from_points(const std::array<Point, 4>& src,
                                                        const std::array<Point, 4>& dst) {
    std::array<std::array<double, 9>, 8> a{};
    for (std::size_t i = 0; i < 4; ++i) {
        const double x = src[i].x, y = src[i].y, u = dst[i].x, v = dst[i].y;
        a[2 * i] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
        a[2 * i + 1] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
    }
    auto h = solve_linear<8>(a);
    if (!h) return std::nullopt;
    Homography out;
    for (std::size_t i = 0; i < 8; ++i) out.m[i] = (*h)[i];
    out.m[8] = 1.0;
    for (double v : out.m)
        if (!std::isfinite(v)) return std::nullopt;
    return out;
}

inline std::array<Point, 4> frame_corners(std::size_t w, std::size_t h) noexcept {
    const double x1 = static_cast<double>(w) - 1.0;
    const double y1 = static_cast<double>(h) - 1.0;
    return {Point{0, 0}, Point{x1, 0}, Point{x1, y1}, Point{0, y1}};
}

/// Warps so that the source quadrilateral `quad` (TL, TR, BR, BL) fills the frame.
inline std::optional<Sample> perspective_warp(const Sample& s, const std::array<Point, 4>& quad, imgproc::Interp image_interp = imgproc::Interp::Linear) {
    const auto frame = frame_corners(s.image.width(), s.image.height());
    bool unchanged = true;
    for (std::size_t i = 0; i < 4; ++i)
        unchanged = unchanged && quad[i].x == frame[i].x && quad[i].y == frame[i].y;
    if (unchanged) return s;
    auto hmg = homography_from_points(frame, quad);
    if (!hmg) return std::nullopt;
    imgproc::RemapOptions opt;
    opt.image_interp = image_interp;
    return imgproc::remap(s, s.image.width(), s.image.height(),
                          [&](double x, double y) { return hmg->apply({x, y}); }, opt);
}

/// Corner jitter: sigma ~ U(scale), each corner moves inward by |N(0, sigma)|
/// (capped at 0.32) of the side length.
inline std::array<Point, 4> draw_perspective_quad(std::size_t w, std::size_t h, const ParamSet& p, RngStream& rng) {
    const Range sc = p.range("scale");
    const double sigma = rng.uniform(sc.lo, sc.hi);
    std::array<double, 8> d{};
    for (double& v : d) v = sigma == 0.0 ? 0.0 : std::min(std::abs(rng.normal(0.0, sigma)), 0.32);
    const double W = static_cast<double>(w) - 1.0;
    const double H = static_cast<double>(h) - 1.0;
    return {Point{d[0] * W, d[1] * H}, Point{W - d[2] * W, d[3] * H}, Point{W - d[4] * W, H - d[5] * H},
            Point{d[6] * W, H - d[7] * H}};
}

inline Sample perspective(const Sample& s, const ParamSet& p, RngStream& rng, imgproc::Interp image_interp = imgproc::Interp::Linear) {
    constexpr int kMaxAttempts = 10;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        auto quad = draw_perspective_quad(s.image.width(), s.image.height(), p, rng);
        if (auto out = perspective_warp(s, quad, image_interp)) return *out;
    }
    return s;
}

// --- elastic ---------------------------------------------------------------

struct DisplacementField {
    Grid<double> dx;
    Grid<double> dy;
};

/// alpha * gaussian_smooth(U(-1,1), sigma) per axis; kernel truncated at 3 sigma.
inline DisplacementField elastic_field(std::size_t w, std::size_t h, double alpha, double sigma, RngStream& rng) {
    Grid<double> fx(w, h), fy(w, h);
    for (double& v : fx.pixels()) v = rng.uniform(-1.0, 1.0);
    for (double& v : fy.pixels()) v = rng.uniform(-1.0, 1.0);
    if (sigma > 0.0) {
        const int ksize = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
        const auto k = imgproc::gaussian_kernel(ksize, sigma);
        fx = imgproc::convolve_separable(fx, k, k);
        fy = imgproc::convolve_separable(fy, k, k);
    }
    for (double& v : fx.pixels()) v *= alpha;
    for (double& v : fy.pixels()) v *= alpha;
    return {std::move(fx), std::move(fy)};
}

/// Affine jitter of three anchor points by U(-alpha_affine, alpha_affine) px,
/// followed by the smoothed random displacement; both composed into one remap.
inline Sample elastic(const Sample& s, const ParamSet& p, RngStream& rng, imgproc::Interp image_interp = imgproc::Interp::Linear) {
    const double k = reference_scale(s.image);
    const double alpha = p.scalar("alpha") * k;
    const double sigma = p.scalar("sigma") * k;
    const double alpha_affine = p.scalar("alpha_affine") * k;
    if (alpha == 0.0 && alpha_affine == 0.0) return s;
    const std::size_t w = s.image.width();
    const std::size_t h = s.image.height();

    std::optional<Affine2x3> inverse;
    if (alpha_affine > 0.0) {
        const double cx = static_cast<double>(w / 2);
        const double cy = static_cast<double>(h / 2);
        const double sq = static_cast<double>(std::min(w, h) / 3);
        const std::array<Point, 3> src{Point{cx + sq, cy + sq}, Point{cx + sq, cy - sq}, Point{cx - sq, cy - sq}};
        std::array<Point, 3> dst{};
        for (std::size_t i = 0; i < 3; ++i)
            dst[i] = {src[i].x + rng.uniform(-alpha_affine, alpha_affine),
                      src[i].y + rng.uniform(-alpha_affine, alpha_affine)};
        // Solve the forward affine src -> dst, then invert it.
        std::array<std::array<double, 7>, 6> a{};
        for (std::size_t i = 0; i < 3; ++i) {
            a[2 * i] = {src[i].x, src[i].y, 1, 0, 0, 0, dst[i].x};
            a[2 * i + 1] = {0, 0, 0, src[i].x, src[i].y, 1, dst[i].y};
        }
        if (auto sol = solve_linear<6>(a)) {
            Affine2x3 fwd{};
            for (std::size_t i = 0; i < 6; ++i) fwd[i] = (*sol)[i];
            inverse = invert(fwd);
        }
    }
    const DisplacementField field = elastic_field(w, h, alpha, sigma, rng);
    return imgproc::remap(s, w, h, [&](double x, double y) {
        const auto r = static_cast<std::size_t>(y);
        const auto c = static_cast<std::size_t>(x);
        const double px = x + field.dx(r, c);
        const double py = y + field.dy(r, c);
        return inverse ? apply(*inverse, px, py) : Point{px, py};
    }, imgproc::RemapOptions{image_interp});
}

// --- grid distortion -------------------------------------------------------

/// Source-side cell boundaries along an axis spanning [0, extent]: cell i has
/// width proportional to factors[i]; the total is renormalized to `extent`
/// so every cell keeps positive width and the map stays monotone.
inline std::vector<double> grid_boundaries(double extent, const std::vector<double>& factors) {
    std::vector<double> b(factors.size() + 1, 0.0);
    double total = 0.0;
    for (double f : factors) total += f;
    double acc = 0.0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        acc += factors[i];
        b[i + 1] = extent * acc / total;
    }
    b.back() = extent;
    return b;
}

/// Piecewise-linear map from output coordinate to source coordinate.
inline double grid_map(double x, double extent, const std::vector<double>& src_bounds) {
    const std::size_t n = src_bounds.size() - 1;
    const double cell = extent / static_cast<double>(n);
    std::size_t k = std::min(n - 1, static_cast<std::size_t>(std::max(0.0, x / cell)));
    const double d0 = extent * static_cast<double>(k) / static_cast<double>(n);
    const double d1 = extent * static_cast<double>(k + 1) / static_cast<double>(n);
    const double t = (x - d0) / (d1 - d0);
    return src_bounds[k] + t * (src_bounds[k + 1] - src_bounds[k]);
}

inline Sample grid_distort(const Sample& s, const std::vector<double>& x_factors,
                           const std::vector<double>& y_factors, const imgproc::RemapOptions& opt = {}) {
    auto all_one = [](const std::vector<double>& f) {
        return std::all_of(f.begin(), f.end(), [](double v) { return v == 1.0; });
    };
    if (all_one(x_factors) && all_one(y_factors)) return s;
    const double ex = static_cast<double>(s.image.width()) - 1.0;
    const double ey = static_cast<double>(s.image.height()) - 1.0;
    const auto bx = grid_boundaries(ex, x_factors);
    const auto by = grid_boundaries(ey, y_factors);
    return imgproc::remap(s, s.image.width(), s.image.height(), [&](double x, double y) {
        return Point{grid_map(x, ex, bx), grid_map(y, ey, by)};
    }, opt);
}

inline Sample grid_distortion(const Sample& s, const ParamSet& p, RngStream& rng, imgproc::Interp image_interp = imgproc::Interp::Linear) {
    const auto steps = static_cast<std::size_t>(std::max(1.0, p.scalar("num_steps")));
    const Range lim = p.range("distort");
    std::vector<double> fx(steps), fy(steps);
    for (double& f : fx) f = 1.0 + rng.uniform(lim.lo, lim.hi);
    for (double& f : fy) f = 1.0 + rng.uniform(lim.lo, lim.hi);
    imgproc::RemapOptions opt;
    // INTER_AREA has no remap form; it is sampled bilinearly like INTER_LINEAR.
    opt.image_interp = p.scalar("interpolation") == 0 ? imgproc::Interp::Nearest : image_interp;
    opt.border = p.scalar("border_mode") == 1 ? imgproc::Border::Replicate : imgproc::Border::Constant;
    return grid_distort(s, fx, fy, opt);
}

// --- crops -----------------------------------------------------------------

struct CropDraw {
    Rect rect;
    bool fallback = false;
};

/// Area fraction in `scale`, log-uniform aspect ratio in `ratio`; up to 10
/// attempts, then a centred crop at the mean scale.
inline CropDraw draw_resized_crop(std::size_t w, std::size_t h, Range scale, Range ratio, RngStream& rng) {
    const double area = static_cast<double>(w) * static_cast<double>(h);
    const double log_lo = std::log(ratio.lo);
    const double log_hi = std::log(ratio.hi);
    for (int attempt = 0; attempt < 10; ++attempt) {
        const double target = rng.uniform(scale.lo, scale.hi) * area;
        const double ar = std::exp(rng.uniform(log_lo, log_hi));
        const auto cw = static_cast<std::size_t>(std::llround(std::sqrt(target * ar)));
        const auto ch = static_cast<std::size_t>(std::llround(std::sqrt(target / ar)));
        if (cw == 0 || ch == 0 || cw > w || ch > h) continue;
        const double frac = static_cast<double>(cw) * static_cast<double>(ch) / area;
        if (frac < scale.lo || frac > scale.hi) continue;
        const auto row = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(h - ch)));
        const auto col = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(w - cw)));
        return {Rect{row, col, ch, cw}, false};
    }
    const double side = std::sqrt((scale.lo + scale.hi) / 2.0);
    const auto cw = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(side * static_cast<double>(w))), 1, w);
    const auto ch = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(side * static_cast<double>(h))), 1, h);
    return {Rect{(h - ch) / 2, (w - cw) / 2, ch, cw}, true};
}

inline Sample random_resized_crop(const Sample& s, const ParamSet& p, RngStream& rng, imgproc::Interp image_interp = imgproc::Interp::Linear) {
    const std::size_t w = s.image.width();
    const std::size_t h = s.image.height();
    const double size = p.scalar_or("size", kReferenceSize);
    const auto d = draw_resized_crop(w, h, p.range("scale"), p.range("ratio"), rng);
    return imgproc::crop_resize(s, d.rect, scaled_extent(size, w), scaled_extent(size, h), image_interp);
}

/// Central crop of (crop_w, crop_h) pixels resized back to the input size.
inline Sample center_crop(const Sample& s, std::size_t crop_w, std::size_t crop_h, imgproc::Interp image_interp = imgproc::Interp::Linear) {
    const std::size_t w = s.image.width();
    const std::size_t h = s.image.height();
    if (crop_w > w || crop_h > h) throw ValidationError("center crop larger than input");
    if (crop_w == w && crop_h == h) return s;
    const Rect r{(h - crop_h) / 2, (w - crop_w) / 2, crop_h, crop_w};
    return imgproc::crop_resize(s, r, w, h, image_interp);
}

inline Sample center_crop(const Sample& s, const ParamSet& p, imgproc::Interp image_interp = imgproc::Interp::Linear) {
    const double size = p.scalar("size");
    return center_crop(s, scaled_extent(size, s.image.width()), scaled_extent(size, s.image.height()), image_interp);
}

/// Summed-area table with a zero first row/column.
inline std::vector<std::size_t> integral(const BinaryMask& m) {
    const std::size_t w = m.width() + 1;
    std::vector<std::size_t> s(w * (m.height() + 1), 0);
    for (std::size_t r = 0; r < m.height(); ++r)
        for (std::size_t c = 0; c < m.width(); ++c)
            s[(r + 1) * w + c + 1] = m(r, c) + s[r * w + c + 1] + s[(r + 1) * w + c] - s[r * w + c];
    return s;
}

/// Top-left corners (row, col) of every crop_h x crop_w window that contains
/// at least one positive mask pixel, in row-major order. All windows when the
/// mask is empty.
inline std::vector<std::pair<std::size_t, std::size_t>> admissible_windows(const BinaryMask& m, std::size_t crop_h,
                                                                           std::size_t crop_w) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (crop_h > m.height() || crop_w > m.width()) return out;
    const bool empty = count_positive(m) == 0;
    const auto sat = integral(m);
    const std::size_t w = m.width() + 1;
    for (std::size_t r = 0; r + crop_h <= m.height(); ++r)
        for (std::size_t c = 0; c + crop_w <= m.width(); ++c) {
            const std::size_t sum = sat[(r + crop_h) * w + c + crop_w] + sat[r * w + c] -
                                    sat[r * w + c + crop_w] - sat[(r + crop_h) * w + c];
            if (empty || sum > 0) out.emplace_back(r, c);
        }
    return out;
}

inline Sample crop_non_empty_mask(const Sample& s, std::size_t crop_w, std::size_t crop_h, RngStream& rng,
                                  imgproc::Interp image_interp = imgproc::Interp::Linear) {
    const std::size_t w = s.image.width();
    const std::size_t h = s.image.height();
    if (crop_w > w || crop_h > h) throw ValidationError("crop window larger than input");
    const auto windows = admissible_windows(s.lv_mask, crop_h, crop_w);
    const auto idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(windows.size()) - 1));
    const auto [row, col] = windows[idx];
    if (crop_w == w && crop_h == h) return s;
    return imgproc::crop_resize(s, Rect{row, col, crop_h, crop_w}, w, h, image_interp);
}

inline Sample crop_non_empty_mask(const Sample& s, const ParamSet& p, RngStream& rng, imgproc::Interp image_interp = imgproc::Interp::Linear) {
    const double size = p.scalar("size");
    return crop_non_empty_mask(s, scaled_extent(size, s.image.width()), scaled_extent(size, s.image.height()), rng,
                               image_interp);
}

}  // namespace echoaug::geometric
