#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "echoaug/errors.hpp"
#include "echoaug/image.hpp"

namespace echoaug {

struct Overlap {
    std::size_t pred = 0;
    std::size_t truth = 0;
    std::size_t both = 0;
};

inline Overlap overlap(const BinaryMask& pred, const BinaryMask& truth) {
    if (!pred.same_shape(truth)) throw ValidationError("mask dimensions differ");
    Overlap o;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred.pixels()[i] != 0;
        const bool t = truth.pixels()[i] != 0;
        o.pred += p;
        o.truth += t;
        o.both += p && t;
    }
    return o;
}

/// 2|P and T| / (|P| + |T|); 1 when both masks are empty.
inline double dice(const BinaryMask& pred, const BinaryMask& truth) {
    const Overlap o = overlap(pred, truth);
    if (o.pred + o.truth == 0) return 1.0;
    return 2.0 * static_cast<double>(o.both) / static_cast<double>(o.pred + o.truth);
}

/// |P and T| / |P or T|; 1 when both masks are empty.
inline double iou(const BinaryMask& pred, const BinaryMask& truth) {
    const Overlap o = overlap(pred, truth);
    const std::size_t uni = o.pred + o.truth - o.both;
    if (uni == 0) return 1.0;
    return static_cast<double>(o.both) / static_cast<double>(uni);
}

// --- intensity statistics --------------------------------------------------

struct ImageStatsRecord {
    double mean_brightness = 0;
    double median_brightness = 0;
    double std_contrast = 0;
    double robust_contrast_5_95 = 0;
    double skewness = 0;
    double kurtosis_excess = 0;
    double dynamic_range = 0;
    std::optional<double> lv_mean_brightness;
    std::optional<double> lv_median_brightness;
    std::optional<double> lv_std_contrast;
    std::optional<double> lv_robust_contrast_5_95;
};

inline const std::vector<std::string>& stats_columns() {
    static const std::vector<std::string> cols{
        "mean_brightness",    "median_brightness",    "std_contrast",    "robust_contrast_5_95",
        "skewness",           "kurtosis_excess",      "dynamic_range",   "lv_mean_brightness",
        "lv_median_brightness", "lv_std_contrast", "lv_robust_contrast_5_95"};
    return cols;
}

inline std::vector<std::optional<double>> stats_values(const ImageStatsRecord& r) {
    return {r.mean_brightness,   r.median_brightness,    r.std_contrast,    r.robust_contrast_5_95,
            r.skewness,          r.kurtosis_excess,      r.dynamic_range,   r.lv_mean_brightness,
            r.lv_median_brightness, r.lv_std_contrast, r.lv_robust_contrast_5_95};
}

/// Linear interpolation between order statistics; `sorted` must be ascending.
inline double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw ValidationError("percentile of empty set");
    const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct Moments {
    double mean = 0;
    double std = 0;
    double skewness = 0;
    double kurtosis_excess = 0;
};

/// Population moments; skewness and kurtosis are 0 for zero-variance sets.
inline Moments moments(const std::vector<double>& v) {
    Moments m;
    const auto n = static_cast<double>(v.size());
    for (double x : v) m.mean += x;
    m.mean /= n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : v) {
        const double d = x - m.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    m.std = std::sqrt(m2);
    if (m2 > 0.0) {
        m.skewness = m3 / std::pow(m2, 1.5);
        m.kurtosis_excess = m4 / (m2 * m2) - 3.0;
    }
    return m;
}

/// Statistics over the strictly positive pixels; the LV fields use the
/// positive pixels inside `lv_mask` and stay empty when that set is empty.
inline ImageStatsRecord image_stats(const GrayImage& img, const BinaryMask* lv_mask = nullptr) {
    if (lv_mask && !img.same_shape(*lv_mask)) throw ValidationError("lv_mask dimensions differ from image");
    std::vector<double> s, lv;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = img.pixels()[i];
        if (!(v > 0.0)) continue;
        s.push_back(v);
        if (lv_mask && lv_mask->pixels()[i]) lv.push_back(v);
    }
    if (s.empty()) throw ValidationError("image has no nonzero pixels");
    std::sort(s.begin(), s.end());
    ImageStatsRecord r;
    const Moments m = moments(s);
    r.mean_brightness = m.mean;
    r.median_brightness = percentile(s, 50);
    r.std_contrast = m.std;
    r.robust_contrast_5_95 = percentile(s, 95) - percentile(s, 5);
    r.skewness = m.skewness;
    r.kurtosis_excess = m.kurtosis_excess;
    r.dynamic_range = s.back() - s.front();
    if (!lv.empty()) {
        std::sort(lv.begin(), lv.end());
        const Moments lm = moments(lv);
        r.lv_mean_brightness = lm.mean;
        r.lv_median_brightness = percentile(lv, 50);
        r.lv_std_contrast = lm.std;
        r.lv_robust_contrast_5_95 = percentile(lv, 95) - percentile(lv, 5);
    }
    return r;
}

/// Field-wise mean over records; an LV field is averaged over the records
/// that have it.
inline ImageStatsRecord mean_stats(const std::vector<ImageStatsRecord>& records) {
    ImageStatsRecord out;
    if (records.empty()) return out;
    const auto n = static_cast<double>(records.size());
    auto avg_opt = [&](auto member) -> std::optional<double> {
        double sum = 0;
        std::size_t k = 0;
        for (const auto& r : records)
            if (r.*member) {
                sum += *(r.*member);
                ++k;
            }
        if (k == 0) return std::nullopt;
        return sum / static_cast<double>(k);
    };
    for (const auto& r : records) {
        out.mean_brightness += r.mean_brightness / n;
        out.median_brightness += r.median_brightness / n;
        out.std_contrast += r.std_contrast / n;
        out.robust_contrast_5_95 += r.robust_contrast_5_95 / n;
        out.skewness += r.skewness / n;
        out.kurtosis_excess += r.kurtosis_excess / n;
        out.dynamic_range += r.dynamic_range / n;
    }
    out.lv_mean_brightness = avg_opt(&ImageStatsRecord::lv_mean_brightness);
    out.lv_median_brightness = avg_opt(&ImageStatsRecord::lv_median_brightness);
    out.lv_std_contrast = avg_opt(&ImageStatsRecord::lv_std_contrast);
    out.lv_robust_contrast_5_95 = avg_opt(&ImageStatsRecord::lv_robust_contrast_5_95);
    return out;
}

}  // namespace echoaug
