#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace echoaug;
using namespace echoaug::analysis;

namespace {

const std::string kFixtures = ECHOAUG_FIXTURES;

const AggregateTable& results() {
    static const AggregateTable t = io::load_results(kFixtures + "/results_dice.csv", Metric::Dice, false);
    return t;
}

ConfigKey key(const std::string& a, const std::string& s) { return io::make_config(a, s, "", false, "test"); }

}  // namespace

TEST(TTest, PooledOracles) {
    const auto r = t_test_pooled({0.80, 0.82, 0.84}, {0.70, 0.72, 0.74});
    EXPECT_NEAR(r.t, 6.123724356957941, 1e-9);
    EXPECT_NEAR(r.p, 0.0036022326091040124, 1e-12);
    EXPECT_EQ(r.df, 4.0);
    const auto q = t_test_pooled({0.61, 0.65, 0.60}, {0.55, 0.58, 0.62});
    EXPECT_NEAR(q.t, 1.4443707614569465, 1e-9);
    EXPECT_NEAR(q.p, 0.22213636316365148, 1e-12);
    const auto same = t_test_pooled({0.5, 0.5}, {0.5, 0.5});
    EXPECT_EQ(same.p, 1.0);
    EXPECT_THROW(t_test_pooled({0.5}, {0.5, 0.6}), ValidationError);
}

TEST(Spearman, OracleAndTies) {
    EXPECT_NEAR(spearman({1, 2, 3, 4}, {1, 3, 2, 4}), 0.8, 1e-12);
    EXPECT_NEAR(spearman({1, 2, 3}, {3, 2, 1}), -1.0, 1e-12);
    EXPECT_EQ(average_ranks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
    EXPECT_TRUE(std::isnan(spearman({1, 1, 1}, {1, 2, 3})));
}

TEST(Aggregate, RunsToCells) {
    std::vector<RunRecord> runs;
    const ConfigKey none{"NONE", "NONE", ""}, aff{"Affine", "H", ""};
    const double base[3] = {0.70, 0.72, 0.74}, up[3] = {0.80, 0.82, 0.84};
    for (int i = 0; i < 3; ++i) {
        runs.push_back({none, {"Unity", "CS"}, i, base[i], base[i] / (2 - base[i])});
        runs.push_back({aff, {"Unity", "CS"}, i, up[i], up[i] / (2 - up[i])});
    }
    const auto t = aggregate(runs);
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_TRUE(t.rows[0].config.is_baseline());
    const auto& c = t.find(aff)->cells[0];
    EXPECT_NEAR(c.mean_dice, 0.82, 1e-12);
    EXPECT_NEAR(c.t, 6.1237, 1e-3);
    EXPECT_TRUE(c.significant);
    EXPECT_NEAR(c.delta_vs_none, 0.10, 1e-12);
    EXPECT_EQ(c.runs, 3u);
    runs.push_back(runs.front());
    EXPECT_THROW(aggregate(runs), ValidationError);
}

TEST(Aggregate, BaselineMissing) {
    std::vector<RunRecord> runs;
    for (int i = 0; i < 3; ++i) runs.push_back({{"Affine", "H", ""}, {"Unity", "CS"}, i, 0.5 + 0.01 * i, 0.4});
    try {
        aggregate(runs);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("baseline missing"), std::string::npos);
    }
}

TEST(BenchmarkResults, RowMeansReproducePublished) {
    const auto& t = results();
    EXPECT_EQ(t.rows.size(), 30u);
    EXPECT_EQ(t.cells.size(), 9u);
    const auto summary = io::read_csv(kFixtures + "/results_published_summary.csv");
    const auto ia = summary.index("augmentation"), is = summary.index("setting"), ir = summary.index("row_avg"),
               ic = summary.index("sig05_count");
    ASSERT_EQ(summary.rows.size(), 30u);
    for (const auto& row : summary.rows) {
        const auto* r = t.find(key(row[ia], row[is]));
        ASSERT_NE(r, nullptr) << row[ia] << " " << row[is];
        EXPECT_NEAR(row_mean(t, *r), std::stod(row[ir]), 5e-5) << r->config.label();
        EXPECT_EQ(significant_count(*r), std::stoi(row[ic])) << r->config.label();
    }
    EXPECT_NEAR(row_mean(t, key("NONE", "NONE")), 0.6658, 5e-5);
    EXPECT_NEAR(row_mean(t, key("HorizontalFlip", "L")), 0.7759, 5e-5);
    EXPECT_NEAR(row_mean(t, key("Affine", "H")), 0.7536, 5e-5);
}

TEST(BenchmarkResults, DeltaCountsAgainstSelectionTable) {
    const auto& t = results();
    EXPECT_EQ(positive_delta_count(*t.find(key("Affine", "H"))), 9);
    EXPECT_EQ(positive_delta_count(*t.find(key("ShiftScaleRotate", "C1"))), 9);
    EXPECT_EQ(positive_delta_count(*t.find(key("GridDistortion", "C3"))), 9);
    EXPECT_EQ(positive_delta_count(*t.find(key("Perspective", "C1"))), 8);
    // The published selection table says 7 for Perspective(C1); the divergence is recorded.
    const auto div = io::read_csv(kFixtures + "/selection_divergences.csv");
    bool documented = false;
    for (const auto& r : div.rows)
        documented = documented || (r[div.index("augmentation")] == "Perspective" && r[div.index("setting")] == "C1" &&
                                    r[div.index("published")] == "7" && r[div.index("computed")] == "8");
    EXPECT_TRUE(documented);
}

TEST(BenchmarkResults, NoHarmFilter) {
    const auto& t = results();
    const auto pass = no_harm_filter(t);
    auto passes = [&](const ConfigKey& k) { return std::find(pass.begin(), pass.end(), k) != pass.end(); };
    EXPECT_TRUE(passes(key("Affine", "H")));
    EXPECT_TRUE(passes(key("ShiftScaleRotate", "C1")));
    EXPECT_TRUE(passes(key("GridDistortion", "C3")));
    EXPECT_FALSE(passes(key("RandomBrightnessContrast", "H")));
    EXPECT_FALSE(passes(key("GaussianShadow", "L")));
    EXPECT_FALSE(passes(key("NONE", "NONE")));
}

TEST(BenchmarkResults, SelectionAndHeatmaps) {
    const auto& t = results();
    const auto rep = phase1_select(t);
    EXPECT_EQ(rep.rows.size(), 29u);
    for (const auto& k : {key("Affine", "H"), key("ShiftScaleRotate", "C1"), key("GridDistortion", "C3"),
                          key("Perspective", "C1")})
        EXPECT_TRUE(rep.find(k)->by_significance) << k.label();
    std::vector<std::string> top;
    for (const auto& r : rep.rows)
        if (r.by_topk) top.push_back(r.config.label());
    std::sort(top.begin(), top.end());
    EXPECT_EQ(top, (std::vector<std::string>{"Affine(H)", "ColorJitter(H)", "HorizontalFlip(L)", "RandomErasing(H)",
                                             "ShiftScaleRotate(C1)"}));
    const auto [raw, delta] = heatmap_matrices(t);
    EXPECT_EQ(raw.values.size(), 30u);
    EXPECT_EQ(raw.col_labels.front(), "Unity_CS");
    const auto none_idx = static_cast<std::size_t>(&t.baseline() - t.rows.data());
    for (double v : delta.values[none_idx]) EXPECT_EQ(v, 0.0);
    const auto* aff = t.find(key("Affine", "H"));
    const auto idx = static_cast<std::size_t>(aff - t.rows.data());
    EXPECT_NEAR(delta.values[idx][1], 0.0930, 5e-5);
}

TEST(BenchmarkResults, SpearmanReportShape) {
    const auto rep = spearman_report(results());
    std::size_t source = 0, target = 0;
    for (const auto& e : rep) {
        (e.kind == "source" ? source : target)++;
        EXPECT_EQ(e.n, 29u);
        EXPECT_GE(e.rho, -1.0);
        EXPECT_LE(e.rho, 1.0);
    }
    EXPECT_EQ(source, 3u);
    EXPECT_EQ(target, 9u);
}

TEST(Selection, TopKTiesBreakByLabel) {
    AggregateTable t;
    t.cells = {{"Unity", "CS"}};
    auto row = [](std::string a, double v) {
        AggregateRow r{{a, a == "NONE" ? "NONE" : "L", ""}, {AggregateCell{}}};
        r.cells[0].mean_dice = v;
        return r;
    };
    t.rows = {row("NONE", 0.5), row("B", 0.6), row("A", 0.6), row("C", 0.55)};
    recompute_deltas(t);
    SelectionOptions opt;
    opt.top_k = 1;
    const auto rep = phase1_select(t, opt);
    EXPECT_TRUE(rep.find({"A", "L", ""})->by_topk);
    EXPECT_FALSE(rep.find({"B", "L", ""})->by_topk);
}
