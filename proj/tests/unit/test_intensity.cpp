#include <gtest/gtest.h>

#include <numeric>

#include "test_util.hpp"

using namespace echoaug;

TEST(BrightnessContrast, Formula) {
    GrayImage img(3, 1, std::vector<double>{0.2, 0.5, 0.9});
    const auto out = photometric::brightness_contrast(img, 0.1, 0.5);
    EXPECT_NEAR(out(0, 0), (0.2 - 0.5) * 1.5 + 0.6, 1e-12);
    EXPECT_NEAR(out(0, 1), 0.6, 1e-12);
    EXPECT_DOUBLE_EQ(out(0, 2), 1.0);
    EXPECT_EQ(photometric::brightness_contrast(img, 0, 0), img);
}

TEST(Gamma, Formula) {
    GrayImage img(2, 1, std::vector<double>{0.25, 0.81});
    const auto out = photometric::gamma(img, 50);
    EXPECT_NEAR(out(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(out(0, 1), 0.9, 1e-12);
    EXPECT_EQ(photometric::gamma(img, 100), img);
}

TEST(Clahe, ConstantImageStaysConstant) {
    GrayImage img(40, 40, from_u8(90));
    const auto out = photometric::clahe(img, 2.0, 8, 8);
    for (double v : out.pixels()) ASSERT_DOUBLE_EQ(v, out(0, 0));
}

TEST(Clahe, SaturatedFrameIsFixedPoint) {
    GrayImage img(33, 21, 1.0);
    EXPECT_EQ(photometric::clahe(img, 4.0, 4, 4), img);
}

TEST(Clahe, SingleTileHugeClipIsGlobalEqualization) {
    const auto img = testutil::random_image(37, 29, 4);
    const auto out = photometric::clahe(img, 1e9, 1, 1);
    std::array<std::size_t, 256> hist{};
    for (double v : img.pixels()) ++hist[to_u8(v)];
    std::array<double, 256> cdf{};
    std::size_t cum = 0;
    for (std::size_t i = 0; i < 256; ++i) {
        cum += hist[i];
        cdf[i] = std::round(255.0 * static_cast<double>(cum) / static_cast<double>(img.size()));
    }
    for (std::size_t i = 0; i < img.size(); ++i) ASSERT_DOUBLE_EQ(out.pixels()[i], cdf[to_u8(img.pixels()[i])] / 255.0);
}

TEST(ColorJitter, Formula) {
    GrayImage img(4, 4, 0.3);
    const auto out = photometric::color_jitter(img, 2.0, 1.0);
    for (double v : out.pixels()) EXPECT_NEAR(v, 0.6, 1e-12);
    GrayImage ramp(2, 1, std::vector<double>{0.2, 0.4});
    const auto c = photometric::color_jitter(ramp, 1.0, 2.0);
    EXPECT_NEAR(c(0, 0), 0.1, 1e-12);
    EXPECT_NEAR(c(0, 1), 0.5, 1e-12);
    EXPECT_EQ(photometric::color_jitter(ramp, 1.0, 1.0), ramp);
}

TEST(Kernels, SumToOne) {
    for (int k : {3, 5, 7, 11})
        for (double s : {0.5, 1.0, 2.5}) {
            const auto g = imgproc::gaussian_kernel(k, s);
            EXPECT_NEAR(std::accumulate(g.begin(), g.end(), 0.0), 1.0, 1e-12);
        }
    for (int k : {3, 5, 9})
        for (double a : {0.0, 0.7, 2.0}) {
            const auto m = noise::motion_kernel(k, a);
            EXPECT_NEAR(std::accumulate(m.begin(), m.end(), 0.0), 1.0, 1e-12);
        }
    for (double a : {0.1, 0.5, 1.0}) {
        const auto sk = photometric::sharpen_kernel(a, 1.0);
        EXPECT_NEAR(std::accumulate(sk.begin(), sk.end(), 0.0), 1.0, 1e-12);
    }
}

TEST(UnsharpMask, ConstantImageUnchanged) {
    GrayImage img(16, 16, 0.45);
    EXPECT_EQ(photometric::unsharp_mask(img, 5, 1.0, 0.8, 0.0), img);
    const auto r = testutil::random_image(16, 16, 1);
    EXPECT_EQ(photometric::unsharp_mask(r, 5, 1.0, 0.0, 0.0), r);
}

TEST(IntensityWindow, Formula) {
    GrayImage img(3, 1, std::vector<double>{0.3, 0.5, 0.7});
    const auto out = photometric::intensity_window(img, 0.5, 0.4);
    EXPECT_NEAR(out(0, 0), 0.0, 1e-12);
    EXPECT_NEAR(out(0, 1), 0.5, 1e-12);
    EXPECT_NEAR(out(0, 2), 1.0, 1e-12);
    EXPECT_EQ(photometric::intensity_window(img, 0.5, 1.0), img);
    EXPECT_THROW(photometric::intensity_window(img, 0.5, 0.0), ValidationError);
}

TEST(GaussNoise, SmallVarianceNearIdentity) {
    // C2 preset variance 0.001 in 8-bit units: sd ~ 1.2e-4 in [0,1].
    const auto img = testutil::random_image(64, 64, 9);
    auto p = preset(Transform::GaussNoise, Setting::C2).params;
    RngStream rng(4);
    const auto out = noise::gauss_noise(img, p, rng);
    double worst = 0;
    for (std::size_t i = 0; i < img.size(); ++i) worst = std::max(worst, std::abs(out.pixels()[i] - img.pixels()[i]));
    EXPECT_LT(worst, 1.0 / 255.0);
    RngStream r2(4);
    EXPECT_EQ(noise::gauss_noise(img, 0.0, r2), img);
}

TEST(SaltAndPepper, OnlyExtremesAndRegion) {
    GrayImage img(50, 50, 0.5);
    BinaryMask region(50, 50);
    for (std::size_t c = 0; c < 25; ++c)
        for (std::size_t r = 0; r < 50; ++r) region(r, c) = 1;
    RngStream rng(6);
    const auto out = noise::salt_and_pepper(img, 0.3, 0.5, rng, &region);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < 50; ++r)
        for (std::size_t c = 0; c < 50; ++c) {
            const double v = out(r, c);
            if (c >= 25) ASSERT_EQ(v, 0.5);
            else if (v != 0.5) {
                ASSERT_TRUE(v == 0.0 || v == 1.0);
                ++hits;
            }
        }
    EXPECT_NEAR(hits / 1250.0, 0.3, 0.05);
}

TEST(Downscale, NearestCheckerboardBlocks) {
    GrayImage img(8, 8);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) img(r, c) = (r + c) % 2 ? 1.0 : 0.0;
    const auto out = noise::downscale(img, 0.5, imgproc::Interp::Nearest, imgproc::Interp::Nearest);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) ASSERT_EQ(out(r, c), img((r / 2) * 2, (c / 2) * 2));
    EXPECT_EQ(noise::downscale(img, 1.0, imgproc::Interp::Linear, imgproc::Interp::Linear), img);
}

TEST(Compression, HighQualityPsnrAndConstantBlocks) {
    // Smooth texture plus mild noise.
    GrayImage img(96, 96);
    RngStream rng(10);
    for (std::size_t r = 0; r < 96; ++r)
        for (std::size_t c = 0; c < 96; ++c)
            img(r, c) = from_u8(to_u8(0.5 + 0.3 * std::sin(r * 0.21) * std::cos(c * 0.17) + rng.uniform(-0.03, 0.03)));
    const auto out = noise::jpeg_roundtrip(img, 100);
    double mse = 0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double d = 255.0 * (out.pixels()[i] - img.pixels()[i]);
        mse += d * d;
    }
    mse /= static_cast<double>(img.size());
    const double psnr = mse == 0 ? 1e9 : 10 * std::log10(255.0 * 255.0 / mse);
    EXPECT_GE(psnr, 45.0);

    GrayImage flat(20, 13, from_u8(77));
    const auto flat_out = noise::jpeg_roundtrip(flat, 40);
    for (double v : flat_out.pixels()) {
        ASSERT_EQ(v, flat_out.pixels()[0]);
        ASSERT_NEAR(v, flat.pixels()[0], 3.0 / 255.0);
    }
    const auto low = noise::jpeg_roundtrip(img, 10);
    double mse_low = 0;
    for (std::size_t i = 0; i < img.size(); ++i) mse_low += std::pow(255.0 * (low.pixels()[i] - img.pixels()[i]), 2);
    EXPECT_GT(mse_low / static_cast<double>(img.size()), mse);
}

TEST(Compression, QuantTableScaling) {
    EXPECT_EQ(noise::quant_table(50), noise::kLumaQuant);
    for (int v : noise::quant_table(100)) EXPECT_EQ(v, 1);
    EXPECT_EQ(noise::quant_table(10)[0], 80);
}

TEST(SpeckleReduction, LargeColorSigmaIsGaussianBlur) {
    const auto img = testutil::random_image(24, 24, 12);
    BinaryMask fan(24, 24, 1);
    const auto bil = noise::bilateral_in_fan(img, fan, 5, 1.3, 1e6);
    std::vector<double> k(5);
    double sum = 0;
    for (int i = 0; i < 5; ++i) sum += k[static_cast<std::size_t>(i)] = std::exp(-(i - 2) * (i - 2) / (2 * 1.3 * 1.3));
    for (double& v : k) v /= sum;
    const auto blur = imgproc::convolve_separable(img, k, k);
    for (std::size_t i = 0; i < img.size(); ++i) ASSERT_NEAR(bil.pixels()[i], blur.pixels()[i], 1e-6);
}

TEST(SpeckleReduction, OutsideFanUntouchedAndNeedsFan) {
    auto s = testutil::echo_sample(64, 13);
    for (double& v : s.image.pixels()) v = std::max(v, 0.2);
    RngStream rng(1);
    const auto out = noise::speckle_reduction(s, preset(Transform::SpeckleReduction, Setting::L).params, rng);
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!s.fan_mask->pixels()[i]) ASSERT_EQ(out.pixels()[i], s.image.pixels()[i]);
    s.fan_mask.reset();
    EXPECT_THROW(noise::speckle_reduction(s, preset(Transform::SpeckleReduction, Setting::L).params, rng), ValidationError);
    GrayImage flat(10, 10, 0.3);
    const auto smoothed = noise::bilateral_in_fan(flat, BinaryMask(10, 10, 1), 5, 2.0, 0.2);
    for (double v : smoothed.pixels()) ASSERT_NEAR(v, 0.3, 1e-15);
}

TEST(CoarseDropout, KnownRect) {
    GrayImage img(10, 10, 0.7);
    const auto out = occlusion::coarse_dropout(img, {imgproc::Rect{2, 3, 4, 5}}, 0.2);
    for (std::size_t r = 0; r < 10; ++r)
        for (std::size_t c = 0; c < 10; ++c) {
            const bool inside = r >= 2 && r < 6 && c >= 3 && c < 8;
            ASSERT_EQ(out(r, c), inside ? 0.2 : 0.7);
        }
    ParamSet none{{"holes", {0, 0}}, {"height", {0.1, 0.2}}, {"width", {0.1, 0.2}}, {"fill", {0, 0}}};
    RngStream rng(1);
    EXPECT_EQ(occlusion::coarse_dropout(img, none, rng), img);
}

TEST(RandomErasing, AreaFractionWithinRange) {
    RngStream rng(14);
    const Range scale{0.02, 0.06}, ratio{0.6, 1.6};
    for (int i = 0; i < 100000; ++i) {
        const auto r = occlusion::draw_erasing_rect(512, 512, scale, ratio, rng);
        if (!r) continue;
        const double frac = static_cast<double>(r->width * r->height) / (512.0 * 512.0);
        ASSERT_GE(frac, scale.lo);
        ASSERT_LE(frac, scale.hi);
        ASSERT_LE(r->row + r->height, 512u);
        ASSERT_LE(r->col + r->width, 512u);
    }
}

TEST(EchoGeometry, ApexRecoveredAndDepthRange) {
    testutil::SectorSpec spec{12.0, 80.0, 0.6, 120.0};
    const auto fan = testutil::sector_mask(160, 140, spec);
    const auto g = echo::fit_fan_geometry(fan);
    EXPECT_LE(std::hypot(g.apex_row - spec.apex_row, g.apex_col - spec.apex_col), 2.0);
    double dmax = 0;
    for (std::size_t r = 0; r < fan.height(); ++r)
        for (std::size_t c = 0; c < fan.width(); ++c)
            if (fan(r, c)) {
                const double d = g.depth(static_cast<double>(r), static_cast<double>(c));
                ASSERT_GE(d, 0.0);
                ASSERT_LE(d, 1.0 + 1e-12);
                dmax = std::max(dmax, d);
            }
    EXPECT_NEAR(dmax, 1.0, 1e-12);
    EXPECT_THROW(echo::fit_fan_geometry(BinaryMask(5, 5)), ValidationError);
    const auto full = echo::fit_fan_geometry(BinaryMask(9, 7, 1));
    EXPECT_DOUBLE_EQ(full.apex_row, 0.0);
    EXPECT_DOUBLE_EQ(full.apex_col, 4.0);
}

TEST(DepthAttenuation, GainProperties) {
    RngStream rng(15);
    for (int i = 0; i < 1000; ++i) {
        const double rate = rng.uniform(0, 5), m = rng.uniform(0, 2);
        double prev = 2;
        for (double d = 0; d <= 1.0; d += 0.05) {
            const double gval = echo::attenuation_gain(d, rate, m);
            ASSERT_LE(gval, prev + 1e-15);
            ASSERT_GE(gval, 0.0);
            ASSERT_LE(gval, 1.0);
            prev = gval;
        }
        EXPECT_NEAR(echo::attenuation_gain(1e6, rate == 0 ? 1 : rate, m), 1 - std::min(m, 1.0), 1e-9);
    }
}

TEST(EchoTransforms, IdentityOutsideFanAndShadowCentre) {
    auto s = testutil::echo_sample(64, 16);
    for (double& v : s.image.pixels()) v = 0.8;
    const auto& fan = *s.fan_mask;
    const auto g = echo::fit_fan_geometry(fan);
    const auto att = echo::depth_attenuation(s.image, fan, g, 1.0, 0.6);
    const auto sh = echo::gaussian_shadow(s.image, fan, 40, 30, 0.3, 5, 7);
    const auto hz = echo::haze(s.image, fan, g, 0.5, 0.1, 0.1);
    for (std::size_t i = 0; i < fan.size(); ++i)
        if (!fan.pixels()[i]) {
            ASSERT_EQ(att.pixels()[i], 0.8);
            ASSERT_EQ(sh.pixels()[i], 0.8);
            ASSERT_EQ(hz.pixels()[i], 0.8);
        }
    ASSERT_TRUE(fan(40, 30));
    EXPECT_NEAR(sh(40, 30), 0.8 * 0.7, 1e-12);
    // Closed-form profile.
    for (std::size_t r = 0; r < 64; ++r)
        for (std::size_t c = 0; c < 64; ++c)
            if (fan(r, c)) {
                const double dx = (c - 30.0) / 5.0, dy = (r - 40.0) / 7.0;
                ASSERT_NEAR(sh(r, c), 0.8 * (1 - 0.3 * std::exp(-(dx * dx + dy * dy) / 2)), 1e-9);
            }
    EXPECT_EQ(echo::gaussian_shadow(s.image, fan, 40, 30, 0.0, 5, 7), s.image);
    EXPECT_EQ(echo::haze(s.image, fan, g, 0.5, 0.1, 0.0), s.image);
    EXPECT_EQ(echo::depth_attenuation(s.image, fan, g, 0.0, 0.6), s.image);
}

TEST(Haze, BandMassConcentrated) {
    testutil::SectorSpec spec{4.0, 128.0, 0.7, 240.0};
    const auto fan = testutil::sector_mask(256, 256, spec);
    const auto g = echo::fit_fan_geometry(fan);
    GrayImage img(256, 256, 0.0);
    const double radius = 0.5, sigma = 0.08;
    const auto out = echo::haze(img, fan, g, radius, sigma, 0.3);
    double total = 0, near = 0;
    for (std::size_t r = 0; r < 256; ++r)
        for (std::size_t c = 0; c < 256; ++c) {
            const double add = out(r, c);
            total += add;
            if (std::abs(g.depth(static_cast<double>(r), static_cast<double>(c)) - radius) <= 2 * sigma) near += add;
        }
    EXPECT_GE(near / total, 0.95);
}

TEST(EchoTransforms, RequireFanMask) {
    auto s = testutil::echo_sample(32, 1);
    s.fan_mask.reset();
    RngStream rng(1);
    for (auto t : {Transform::DepthAttenuation, Transform::GaussianShadow, Transform::HazeArtifact}) {
        const auto& reg = load_preset_registry();
        const auto it = std::find_if(reg.begin(), reg.end(), [t](const auto& kv) { return kv.first.transform == t; });
        EXPECT_THROW(apply_transform(t, s, it->second.params, rng), ValidationError);
    }
}
