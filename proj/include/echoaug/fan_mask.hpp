#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "echoaug/errors.hpp"
#include "echoaug/image.hpp"
#include "echoaug/metrics.hpp"

// Morphological fan-sector extraction: threshold, close, keep the largest
// 8-connected component, fill holes, open.

namespace echoaug::fan {

struct FanMaskConfig {
    int close_radius = 5;
    int open_radius = 3;
};

inline std::vector<std::pair<int, int>> disk_offsets(int radius) {
    std::vector<std::pair<int, int>> off;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) off.emplace_back(dy, dx);
    return off;
}

/// Out-of-frame pixels count as background.
inline BinaryMask dilate(const BinaryMask& m, int radius) {
    if (radius <= 0) return m;
    const auto off = disk_offsets(radius);
    const auto w = static_cast<std::ptrdiff_t>(m.width());
    const auto h = static_cast<std::ptrdiff_t>(m.height());
    BinaryMask out(m.width(), m.height());
    for (std::ptrdiff_t r = 0; r < h; ++r)
        for (std::ptrdiff_t c = 0; c < w; ++c) {
            if (!m(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) continue;
            for (auto [dy, dx] : off) {
                const auto rr = r + dy, cc = c + dx;
                if (rr >= 0 && rr < h && cc >= 0 && cc < w) out(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)) = 1;
            }
        }
    return out;
}

/// Out-of-frame pixels count as foreground, so a frame-filling mask survives.
inline BinaryMask erode(const BinaryMask& m, int radius) {
    if (radius <= 0) return m;
    const auto off = disk_offsets(radius);
    const auto w = static_cast<std::ptrdiff_t>(m.width());
    const auto h = static_cast<std::ptrdiff_t>(m.height());
    BinaryMask out(m.width(), m.height());
    for (std::ptrdiff_t r = 0; r < h; ++r)
        for (std::ptrdiff_t c = 0; c < w; ++c) {
            if (!m(static_cast<std::size_t>(r), static_cast<std::size_t>(c))) continue;
            bool keep = true;
            for (auto [dy, dx] : off) {
                const auto rr = r + dy, cc = c + dx;
                if (rr >= 0 && rr < h && cc >= 0 && cc < w && !m(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc))) {
                    keep = false;
                    break;
                }
            }
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = keep ? 1 : 0;
        }
    return out;
}

inline BinaryMask close(const BinaryMask& m, int radius) { return erode(dilate(m, radius), radius); }
inline BinaryMask open(const BinaryMask& m, int radius) { return dilate(erode(m, radius), radius); }

/// Component labels (0 = background, 1..n) and the size of each label.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> label_components(const BinaryMask& m, bool eight) {
    const std::size_t w = m.width();
    const std::size_t h = m.height();
    std::vector<std::size_t> labels(m.size(), 0);
    std::vector<std::size_t> sizes{0};
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < m.size(); ++start) {
        if (!m.pixels()[start] || labels[start]) continue;
        const std::size_t id = sizes.size();
        sizes.push_back(0);
        labels[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            ++sizes[id];
            const auto r = static_cast<std::ptrdiff_t>(i / w);
            const auto c = static_cast<std::ptrdiff_t>(i % w);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if ((dy == 0 && dx == 0) || (!eight && dy != 0 && dx != 0)) continue;
                    const auto rr = r + dy, cc = c + dx;
                    if (rr < 0 || cc < 0 || rr >= static_cast<std::ptrdiff_t>(h) || cc >= static_cast<std::ptrdiff_t>(w)) continue;
                    const std::size_t j = static_cast<std::size_t>(rr) * w + static_cast<std::size_t>(cc);
                    if (m.pixels()[j] && !labels[j]) {
                        labels[j] = id;
                        stack.push_back(j);
                    }
                }
        }
    }
    return {std::move(labels), std::move(sizes)};
}

/// Largest 8-connected component; ties go to the lowest label (raster order).
inline BinaryMask largest_component(const BinaryMask& m) {
    const auto [labels, sizes] = label_components(m, true);
    if (sizes.size() <= 1) return BinaryMask(m.width(), m.height());
    const auto best = static_cast<std::size_t>(std::max_element(sizes.begin() + 1, sizes.end()) - sizes.begin());
    BinaryMask out(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i) out.pixels()[i] = labels[i] == best ? 1 : 0;
    return out;
}

/// Background regions (4-connected) not touching the frame border become foreground.
inline BinaryMask fill_holes(const BinaryMask& m) {
    BinaryMask inv(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i) inv.pixels()[i] = m.pixels()[i] ? 0 : 1;
    const auto [labels, sizes] = label_components(inv, false);
    std::vector<bool> touches(sizes.size(), false);
    const std::size_t w = m.width();
    const std::size_t h = m.height();
    for (std::size_t c = 0; c < w; ++c) {
        touches[labels[c]] = true;
        touches[labels[(h - 1) * w + c]] = true;
    }
    for (std::size_t r = 0; r < h; ++r) {
        touches[labels[r * w]] = true;
        touches[labels[r * w + w - 1]] = true;
    }
    BinaryMask out = m;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (labels[i] && !touches[labels[i]]) out.pixels()[i] = 1;
    return out;
}

inline BinaryMask extract_fan_mask(const GrayImage& img, const FanMaskConfig& cfg = {}) {
    BinaryMask m(img.width(), img.height());
    std::size_t positive = 0;
    for (std::size_t i = 0; i < img.size(); ++i)
        if (img.pixels()[i] > 0.0) {
            m.pixels()[i] = 1;
            ++positive;
        }
    if (positive == 0) throw ValidationError("image has no nonzero pixels; fan mask would be empty");
    m = close(m, cfg.close_radius);
    m = largest_component(m);
    m = fill_holes(m);
    m = open(m, cfg.open_radius);
    // Opening can split a thin tip off; keep the result a single component.
    m = largest_component(m);
    if (count_positive(m) == 0) throw ValidationError("fan mask vanished after morphological opening");
    return m;
}

inline double mask_quality(const BinaryMask& mask, const BinaryMask& reference) { return dice(mask, reference); }

}  // namespace echoaug::fan
