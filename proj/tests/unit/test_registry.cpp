#include <gtest/gtest.h>

#include <set>

#include "test_util.hpp"

using namespace echoaug;

TEST(Registry, CoversEveryTransform) {
    const auto& reg = load_preset_registry();
    std::set<Transform> seen;
    for (const auto& [key, p] : reg) {
        EXPECT_NO_THROW(validate(p)) << to_string(key);
        seen.insert(key.transform);
    }
    EXPECT_EQ(seen.size(), kTransformCount);
    EXPECT_EQ(all_transforms().size(), 29u);
}

TEST(Registry, GroupSizes) {
    std::map<TransformGroup, int> n;
    for (auto t : all_transforms()) ++n[group_of(t)];
    EXPECT_EQ(n[TransformGroup::Geometric], 9);
    EXPECT_EQ(n[TransformGroup::Photometric], 7);
    EXPECT_EQ(n[TransformGroup::NoiseQuality], 8);
    EXPECT_EQ(n[TransformGroup::Occlusion], 2);
    EXPECT_EQ(n[TransformGroup::Echo], 3);
}

TEST(Registry, PublishedEnvelopes) {
    const auto aff = preset(Transform::Affine, Setting::H);
    EXPECT_DOUBLE_EQ(aff.probability, 0.7);
    EXPECT_EQ(aff.params.range("rotate"), (Range{-30, 30}));
    EXPECT_EQ(aff.params.range("scale"), (Range{0.6, 1.5}));

    const auto ssr = preset(Transform::ShiftScaleRotate, Setting::C1);
    EXPECT_EQ(ssr.params.range("shift"), (Range{-0.25, 0.25}));
    EXPECT_DOUBLE_EQ(ssr.params.range("scale").lo, 0.65);
    EXPECT_DOUBLE_EQ(ssr.params.range("scale").hi, 1.35);
    EXPECT_EQ(ssr.params.range("rotate"), (Range{-35, 35}));

    const auto gd = preset(Transform::GridDistortion, Setting::C3);
    EXPECT_EQ(gd.params.scalar("num_steps"), 3);
    EXPECT_EQ(gd.params.range("distort"), (Range{-0.4, 0.4}));
    EXPECT_EQ(gd.params.scalar("border_mode"), 1);

    EXPECT_EQ(preset(Transform::CenterCrop, Setting::L).params.scalar("size"), 448);
    EXPECT_EQ(preset(Transform::Perspective, Setting::H).params.range("scale"), (Range{0.08, 0.20}));
    EXPECT_DOUBLE_EQ(preset(Transform::ElasticTransform, Setting::H).params.scalar("alpha"), 30.0);
    EXPECT_DOUBLE_EQ(preset(Transform::CLAHE, Setting::H).params.scalar("clip_limit"), 4.0);
}

TEST(Registry, LookupByName) {
    EXPECT_TRUE(find_preset("Affine", "H"));
    EXPECT_TRUE(find_preset("affine", "h"));
    EXPECT_TRUE(find_preset("RandomHorizontalFlip", "L"));
    EXPECT_FALSE(find_preset("Affine", "C3"));
    EXPECT_FALSE(find_preset("VerticalFlip", "L"));
    EXPECT_THROW(preset(Transform::Affine, Setting::C3), ValidationError);
}

TEST(Registry, JsonRoundTrip) {
    const auto& reg = load_preset_registry();
    const auto j = registry_to_json(reg);
    EXPECT_EQ(j.size(), reg.size());
    const auto back = registry_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back, reg);
}

TEST(Registry, RejectsBadPresets) {
    auto p = preset(Transform::Affine, Setting::L);
    p.probability = 1.5;
    EXPECT_THROW(validate(p), ValidationError);
    p.probability = 0.5;
    p.params.set("bogus", 1.0);
    EXPECT_THROW(validate(p), ValidationError);
    auto q = preset(Transform::Affine, Setting::L);
    q.params.set("rotate", Range{5, -5});
    EXPECT_THROW(validate(q), ValidationError);
}

TEST(Rng, DeterministicAndIndependentOfOrder) {
    auto a = derive_stream(7, 3, 1);
    auto b = derive_stream(7, 3, 1);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_NE(derive_stream(7, 3, 1).key(), derive_stream(7, 3, 2).key());
    EXPECT_NE(derive_stream(7, 3, 1).key(), derive_stream(7, 4, 1).key());
    EXPECT_NE(derive_stream(7, 3, 1).key(), derive_stream(8, 3, 1).key());
}

TEST(Rng, UniformRanges) {
    RngStream r(123);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const auto k = r.uniform_int(-3, 4);
        ASSERT_GE(k, -3);
        ASSERT_LE(k, 4);
    }
    EXPECT_EQ(r.uniform(2.5, 2.5), 2.5);
}

TEST(Rng, GateFireRate) {
    RngStream r(99);
    int fired = 0;
    constexpr int n = 100000;
    for (int i = 0; i < n; ++i) fired += r.bernoulli(0.5);
    EXPECT_NEAR(fired / static_cast<double>(n), 0.5, 0.005);
}

TEST(Rng, NormalMoments) {
    RngStream r(5);
    double s = 0, s2 = 0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s += x;
        s2 += x * x;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}
