#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "test_util.hpp"

using namespace echoaug;
using namespace echoaug::geometric;

namespace {

Sample delta_sample(std::size_t w, std::size_t h, std::size_t r, std::size_t c) {
    Sample s{GrayImage(w, h), BinaryMask(w, h), std::nullopt};
    s.image(r, c) = 1.0;
    s.lv_mask(r, c) = 1;
    return s;
}

std::pair<std::size_t, std::size_t> find_one(const BinaryMask& m) {
    for (std::size_t r = 0; r < m.height(); ++r)
        for (std::size_t c = 0; c < m.width(); ++c)
            if (m(r, c)) return {r, c};
    return {m.height(), m.width()};
}

}  // namespace

TEST(HorizontalFlip, MirrorsAllRasters) {
    Sample s{GrayImage(2, 2, std::vector<double>{.1, .2, .3, .4}), BinaryMask(2, 2, std::vector<std::uint8_t>{1, 0, 0, 0}),
             BinaryMask(2, 2, std::vector<std::uint8_t>{0, 1, 1, 1})};
    const auto f = horizontal_flip(s);
    EXPECT_EQ(f.image, GrayImage(2, 2, std::vector<double>{.2, .1, .4, .3}));
    EXPECT_EQ(f.lv_mask, BinaryMask(2, 2, std::vector<std::uint8_t>{0, 1, 0, 0}));
    EXPECT_EQ(*f.fan_mask, BinaryMask(2, 2, std::vector<std::uint8_t>{1, 0, 1, 1}));
    EXPECT_EQ(horizontal_flip(f), s);
}

TEST(Affine, ZeroIsIdentity) {
    const auto s = testutil::echo_sample(64, 1);
    EXPECT_EQ(affine_warp(s, AffineDraw{}), s);
}

TEST(Affine, QuarterTurnIndexMap) {
    // 90 deg counter-clockwise on screen about the centre of a 9x9 grid: (r,c) -> (8-c, r).
    const auto s = delta_sample(9, 9, 2, 6);
    AffineDraw d;
    d.angle_deg = 90.0;
    const auto out = affine_warp(s, d);
    EXPECT_EQ(find_one(out.lv_mask), (std::pair<std::size_t, std::size_t>{2, 2}));
    EXPECT_NEAR(out.image(2, 2), 1.0, 1e-9);
    EXPECT_EQ(count_positive(out.lv_mask), 1u);
}

TEST(ShiftScaleRotate, ShiftMovesDeltaAndZeroFills) {
    const std::size_t w = 32;
    Sample s{GrayImage(w, w, 0.5), BinaryMask(w, w), std::nullopt};
    s.image(10, 3) = 1.0;
    s.lv_mask(10, 3) = 1;
    AffineDraw d;
    d.tx = 0.25;
    imgproc::RemapOptions opt;
    const auto out = affine_warp(s, d, opt);
    EXPECT_EQ(find_one(out.lv_mask), (std::pair<std::size_t, std::size_t>{10, 3 + w / 4}));
    EXPECT_DOUBLE_EQ(out.image(10, 3 + w / 4), 1.0);
    for (std::size_t r = 0; r < w; ++r)
        for (std::size_t c = 0; c < w / 4; ++c) EXPECT_EQ(out.image(r, c), 0.0);
}

TEST(ShiftScaleRotate, PresetDrawsStayInEnvelope) {
    const auto p = preset(Transform::ShiftScaleRotate, Setting::C1);
    RngStream rng(3);
    for (int i = 0; i < 1000; ++i) {
        const auto d = draw_shift_scale_rotate(p.params, rng);
        ASSERT_LE(std::abs(d.tx), 0.25);
        ASSERT_LE(std::abs(d.ty), 0.25);
        ASSERT_LE(std::abs(d.angle_deg), 35.0);
        ASSERT_GE(d.scale, 0.65);
        ASSERT_LE(d.scale, 1.35);
    }
    const auto a = preset(Transform::Affine, Setting::H);
    for (int i = 0; i < 1000; ++i) {
        const auto d = draw_affine(a.params, rng);
        ASSERT_LE(std::abs(d.angle_deg), 30.0);
        ASSERT_GE(d.scale, 0.6);
        ASSERT_LE(d.scale, 1.5);
    }
}

TEST(Perspective, HomographyMatchesDltOracle) {
    const std::array<Point, 4> src{Point{0, 0}, Point{99, 0}, Point{99, 79}, Point{0, 79}};
    const std::array<Point, 4> dst{Point{5.5, 3.25}, Point{92, 8}, Point{96.5, 70}, Point{2, 77.75}};
    const auto h = homography_from_points(src, dst);
    ASSERT_TRUE(h);

    // Oracle: null space of the 8x9 DLT system via SVD.
    Eigen::Matrix<double, 8, 9> A;
    for (int i = 0; i < 4; ++i) {
        const double x = src[i].x, y = src[i].y, u = dst[i].x, v = dst[i].y;
        A.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
        A.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    Eigen::VectorXd n = svd.matrixV().col(8);
    n /= n(8);
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(h->m[static_cast<std::size_t>(i)], n(i), 1e-9) << i;
    for (int i = 0; i < 4; ++i) {
        const auto p = h->apply(src[static_cast<std::size_t>(i)]);
        EXPECT_NEAR(p.x, dst[static_cast<std::size_t>(i)].x, 1e-9);
        EXPECT_NEAR(p.y, dst[static_cast<std::size_t>(i)].y, 1e-9);
    }
}

TEST(Perspective, ZeroDisplacementIsIdentity) {
    const auto s = testutil::echo_sample(48, 2);
    auto p = preset(Transform::Perspective, Setting::L);
    p.params.set("scale", 0.0);
    RngStream rng(1);
    EXPECT_EQ(perspective(s, p.params, rng), s);
}

TEST(Elastic, ZeroAlphaIsIdentity) {
    const auto s = testutil::echo_sample(48, 3);
    auto p = preset(Transform::ElasticTransform, Setting::H).params;
    p.set("alpha", 0.0);
    p.set("alpha_affine", 0.0);
    RngStream rng(1);
    EXPECT_EQ(elastic(s, p, rng), s);
}

TEST(Elastic, SmoothingLengthensCorrelation) {
    auto lag1 = [](double sigma) {
        RngStream rng(11);
        const auto f = elastic_field(96, 96, 1.0, sigma, rng);
        double num = 0, den = 0;
        for (std::size_t r = 0; r < 96; ++r)
            for (std::size_t c = 0; c + 1 < 96; ++c) {
                num += f.dx(r, c) * f.dx(r, c + 1);
                den += f.dx(r, c) * f.dx(r, c);
            }
        return num / den;
    };
    const double a = lag1(1.0), b = lag1(3.0), c = lag1(6.0);
    EXPECT_LT(a, b);
    EXPECT_LT(b, c);
}

TEST(GridDistortion, CumulativeOracle) {
    const std::vector<double> f{0.8, 1.3, 0.9, 1.2};
    const double extent = 99.0;
    const auto b = grid_boundaries(extent, f);
    double total = 0;
    for (double v : f) total += v;
    double acc = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        EXPECT_NEAR(b[i], extent * acc / total, 1e-12);
        acc += f[i];
    }
    EXPECT_DOUBLE_EQ(b.back(), extent);
    // Output cell k maps linearly onto source cell k.
    const double cell = extent / 4.0;
    for (int k = 0; k < 4; ++k)
        for (double t : {0.0, 0.25, 0.5, 0.9}) {
            const double x = cell * (k + t);
            EXPECT_NEAR(grid_map(x, extent, b), b[static_cast<std::size_t>(k)] + t * (b[static_cast<std::size_t>(k) + 1] - b[static_cast<std::size_t>(k)]), 1e-9);
        }
    // Monotone.
    double prev = -1;
    for (double x = 0; x <= extent; x += 0.37) {
        const double y = grid_map(x, extent, b);
        EXPECT_GT(y, prev);
        prev = y;
    }
}

TEST(GridDistortion, ZeroLimitIsIdentity) {
    const auto s = testutil::echo_sample(48, 4);
    auto p = preset(Transform::GridDistortion, Setting::C3).params;
    p.set("distort", 0.0);
    RngStream rng(1);
    EXPECT_EQ(grid_distortion(s, p, rng), s);
}

TEST(RandomResizedCrop, FullScaleIsIdentity) {
    const auto s = testutil::echo_sample(64, 5);
    ParamSet p{{"scale", {1, 1}}, {"ratio", {1, 1}}, {"size", {512, 512}}};
    RngStream rng(1);
    EXPECT_EQ(random_resized_crop(s, p, rng), s);
}

TEST(RandomResizedCrop, AreaFractionWithinRange) {
    RngStream rng(17);
    const Range scale{0.6, 1.0}, ratio{0.8, 1.2};
    int fallback = 0;
    for (int i = 0; i < 100000; ++i) {
        const auto d = draw_resized_crop(512, 512, scale, ratio, rng);
        const double frac = static_cast<double>(d.rect.width * d.rect.height) / (512.0 * 512.0);
        if (d.fallback) {
            ++fallback;
            continue;
        }
        ASSERT_GE(frac, scale.lo);
        ASSERT_LE(frac, scale.hi);
        ASSERT_LE(d.rect.row + d.rect.height, 512u);
        ASSERT_LE(d.rect.col + d.rect.width, 512u);
    }
    EXPECT_LT(fallback, 100);
}

TEST(CenterCrop, OffsetsAndErrors) {
    const auto s = testutil::echo_sample(512, 6);
    EXPECT_EQ(center_crop(s, 512, 512), s);
    EXPECT_THROW(center_crop(s, 600, 600), ValidationError);
    // The 448 crop keeps rows/cols 32..479; with nearest mask resizing the
    // first output column samples source column 32.
    auto d = delta_sample(512, 512, 32, 32);
    const auto out = center_crop(d, 448, 448);
    EXPECT_EQ(out.lv_mask(0, 0), 1);
    Sample flat{GrayImage(512, 512, 0.4), BinaryMask(512, 512), std::nullopt};
    for (double v : center_crop(flat, 384, 384).image.pixels()) ASSERT_DOUBLE_EQ(v, 0.4);
}

TEST(CropNonEmptyMask, AdmissibleWindowsMatchBruteForce) {
    RngStream rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        BinaryMask m = testutil::random_mask(8, 8, trial % 5 == 0 ? 0.0 : 0.04, rng);
        const std::size_t ch = 1 + static_cast<std::size_t>(rng.uniform_int(0, 7));
        const std::size_t cw = 1 + static_cast<std::size_t>(rng.uniform_int(0, 7));
        std::vector<std::pair<std::size_t, std::size_t>> brute;
        const bool empty = count_positive(m) == 0;
        for (std::size_t r = 0; r + ch <= 8; ++r)
            for (std::size_t c = 0; c + cw <= 8; ++c) {
                bool hit = false;
                for (std::size_t y = r; y < r + ch; ++y)
                    for (std::size_t x = c; x < c + cw; ++x) hit = hit || m(y, x);
                if (empty || hit) brute.emplace_back(r, c);
            }
        EXPECT_EQ(admissible_windows(m, ch, cw), brute);
    }
}

TEST(CropNonEmptyMask, SinglePixelAlwaysKept) {
    auto s = delta_sample(64, 64, 50, 9);
    RngStream rng(2);
    for (int i = 0; i < 200; ++i) {
        const auto out = crop_non_empty_mask(s, 40, 40, rng);
        ASSERT_GE(count_positive(out.lv_mask), 1u);
    }
}

TEST(Geometric, ImageEqualsMaskUnderNearest) {
    // Image = mask, nearest image sampling: the warped image must equal the warped mask.
    RngStream rng(21);
    for (int i = 0; i < 20; ++i) {
        Sample s{GrayImage(40, 40), testutil::random_mask(40, 40, 0.3, rng), std::nullopt};
        for (std::size_t k = 0; k < s.image.size(); ++k) s.image.pixels()[k] = s.lv_mask.pixels()[k];
        imgproc::RemapOptions opt;
        opt.image_interp = imgproc::Interp::Nearest;
        const auto out = affine_warp(s, draw_affine(preset(Transform::Affine, Setting::H).params, rng), opt);
        for (std::size_t k = 0; k < out.image.size(); ++k) ASSERT_EQ(out.image.pixels()[k], out.lv_mask.pixels()[k]);
    }
}
