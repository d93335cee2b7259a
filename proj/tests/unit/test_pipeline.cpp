#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "test_util.hpp"

using namespace echoaug;
namespace fs = std::filesystem;

namespace {

std::vector<AugPreset> presets_of(Transform t) {
    std::vector<AugPreset> out;
    for (const auto& [k, p] : load_preset_registry())
        if (k.transform == t) out.push_back(p);
    return out;
}

std::vector<AugPreset> take(Transform t, std::size_t n) {
    auto v = presets_of(t);
    v.resize(n);
    return v;
}

}  // namespace

TEST(PairPlan, SixtyEightCrossTypePairs) {
    std::vector<AugPreset> sel;
    for (auto [t, n] : std::vector<std::pair<Transform, std::size_t>>{{Transform::Affine, 3},
                                                                     {Transform::ShiftScaleRotate, 3},
                                                                     {Transform::Perspective, 3},
                                                                     {Transform::HorizontalFlip, 2},
                                                                     {Transform::CLAHE, 1},
                                                                     {Transform::GaussNoise, 1}}) {
        auto v = take(t, n);
        sel.insert(sel.end(), v.begin(), v.end());
    }
    const auto plan = build_pairwise_plan(sel);
    EXPECT_EQ(plan.size(), 68u);
    for (const auto& [a, b] : plan) {
        EXPECT_NE(a.transform, b.transform);
        EXPECT_TRUE(canonical_less(a, b));
    }
    const auto j = plan_to_json(plan);
    EXPECT_EQ(j["count"], 68);
}

TEST(PairPlan, RandomMultisetsMatchCombinatorialOracle) {
    const auto& reg = load_preset_registry();
    std::vector<AugPreset> all;
    for (const auto& [k, p] : reg) all.push_back(p);
    RngStream rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<AugPreset> sel;
        const auto n = rng.uniform_int(0, 14);
        for (std::int64_t i = 0; i < n; ++i)
            sel.push_back(all[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(all.size()) - 1))]);
        std::set<PresetKey> uniq;
        for (const auto& p : sel) uniq.insert(p.key());
        std::map<Transform, std::size_t> mult;
        for (const auto& k : uniq) ++mult[k.transform];
        std::size_t expected = uniq.size() * (uniq.size() - (uniq.empty() ? 0 : 1)) / 2;
        for (const auto& [t, m] : mult) expected -= m * (m - 1) / 2;
        const auto plan = build_pairwise_plan(sel);
        ASSERT_EQ(plan.size(), expected);
        for (const auto& [a, b] : plan) ASSERT_NE(a.transform, b.transform);
    }
}

TEST(PipelineSpec, JsonRoundTripAndErrors) {
    const auto spec = pipeline_from_json(nlohmann::json::parse(R"({
        "seed": 42, "size": 64, "mode": "pair",
        "stages": [{"transform": "Affine", "setting": "H"},
                   {"transform": "GaussNoise", "setting": "L", "overrides": {"p": 1.0}}]})"));
    EXPECT_EQ(spec.seed, 42u);
    EXPECT_EQ(spec.size, 64u);
    EXPECT_TRUE(spec.pair_mode);
    EXPECT_EQ(spec.stages[1].probability, 1.0);
    EXPECT_EQ(pipeline_from_json(nlohmann::json::parse(pipeline_to_json(spec).dump())), spec);

    for (const char* bad : {R"({"stages": [{"transform": "Affine", "setting": "C3"}]})",
                            R"({"stages": [{"transform": "Affine", "setting": "H", "overrides": {"p": 2}}]})",
                            R"({"stages": [{"transform": "Affine", "setting": "H", "overrides": {"nope": 1}}]})",
                            R"({"mode": "pair", "stages": [{"transform": "Affine", "setting": "H"},
                                                          {"transform": "Affine", "setting": "L"}]})",
                            R"({"stages": 3})", R"({"seed": -1, "stages": []})", R"({"mode": 5, "stages": []})"})
        EXPECT_THROW(pipeline_from_json(nlohmann::json::parse(bad)), ValidationError) << bad;
}

TEST(PipelineApply, DeterministicAndSized) {
    PipelineSpec spec;
    spec.seed = 9;
    spec.size = 48;
    spec.stages = {preset(Transform::Affine, Setting::H), preset(Transform::GaussNoise, Setting::H)};
    spec.stages[0].probability = 1.0;
    const auto s = testutil::echo_sample(64, 3);
    const auto a = apply_pipeline(spec, s, 5);
    const auto b = apply_pipeline(spec, s, 5);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.image.width(), 48u);
    EXPECT_NE(apply_pipeline(spec, s, 6).image, a.image);
}

TEST(PipelineApply, GateClosedIsBitIdentical) {
    const auto s = testutil::echo_sample(64, 4);
    for (const auto& [k, p] : load_preset_registry()) {
        auto q = p;
        q.probability = 0.0;
        RngStream rng(k.setting == Setting::L ? 1 : 2);
        ASSERT_EQ(apply_preset(q, s, rng), s) << to_string(k);
    }
}

TEST(Materialize, WritesTreeAndManifest) {
    const auto in = testutil::temp_dir("mat_in");
    const auto out = testutil::temp_dir("mat_out");
    fs::create_directories(in / "images");
    fs::create_directories(in / "masks");
    for (int i = 0; i < 3; ++i) {
        const auto s = testutil::echo_sample(64, static_cast<std::uint64_t>(i));
        const std::string name = "s" + std::to_string(i) + ".png";
        png::write_image(in / "images" / name, s.image);
        png::write_mask(in / "masks" / name, s.lv_mask);
    }
    PipelineSpec spec;
    spec.seed = 1;
    spec.size = 64;
    spec.stages = {preset(Transform::DepthAttenuation, Setting::L)};
    const auto manifest = materialize_dataset(spec, in, out);
    EXPECT_EQ(manifest["files"].size(), 3u);
    EXPECT_EQ(manifest["files"][0]["stream_keys"].size(), 1u);
    EXPECT_TRUE(fs::exists(out / "images" / "s2.png"));
    EXPECT_TRUE(fs::exists(out / "fans" / "s0.png"));
    EXPECT_TRUE(fs::exists(out / "manifest.json"));
    EXPECT_THROW(materialize_dataset(spec, in / "missing", out), IoError);
}

TEST(Png, RoundTrip) {
    const auto dir = testutil::temp_dir("png");
    const auto img = testutil::random_image(13, 7, 2);
    png::write_image(dir / "a.png", img);
    EXPECT_EQ(png::read_image(dir / "a.png"), img);
    BinaryMask m(13, 7);
    m(3, 4) = 1;
    png::write_mask(dir / "m.png", m);
    EXPECT_EQ(png::read_mask(dir / "m.png"), m);
    EXPECT_THROW(png::read_image(dir / "none.png"), IoError);
    EXPECT_EQ(png::list_pngs(dir), (std::vector<std::string>{"a.png", "m.png"}));
}
