#pragma once

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "echoaug/errors.hpp"

namespace echoaug::analysis {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// --- keys ------------------------------------------------------------------

/// Train dataset to test dataset.
struct CellId {
    std::string train;
    std::string test;
    friend auto operator<=>(const CellId&, const CellId&) = default;
    [[nodiscard]] std::string label() const { return train + "_" + test; }
};

/// The nine cells in table column order.
inline const std::vector<CellId>& benchmark_cells() {
    static const std::vector<CellId> cells{{"Unity", "CS"}, {"Unity", "CA"}, {"Unity", "ED"},
                                           {"CA", "CS"},    {"CA", "CA"},    {"CA", "ED"},
                                           {"ED", "CS"},    {"ED", "CA"},    {"ED", "ED"}};
    return cells;
}

inline bool is_benchmark_cell(const CellId& c) {
    const auto& cells = benchmark_cells();
    return std::find(cells.begin(), cells.end(), c) != cells.end();
}

/// The Consensus set stands in for Unity's own test split.
inline bool in_domain(const CellId& c) { return c.train == c.test || (c.train == "Unity" && c.test == "CS"); }

/// One result row: a single preset, a pair, or the NONE baseline.
struct ConfigKey {
    std::string augmentation;
    std::string setting;
    /// "Transform:Setting" of the second stage, empty for singles.
    std::string partner;

    friend auto operator<=>(const ConfigKey&, const ConfigKey&) = default;

    [[nodiscard]] bool is_baseline() const {
        std::string up = augmentation;
        for (auto& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        return up == "NONE";
    }
    [[nodiscard]] std::string label() const {
        if (is_baseline()) return "NONE";
        std::string s = augmentation + "(" + setting + ")";
        if (!partner.empty()) {
            const auto colon = partner.find(':');
            s += " + " + (colon == std::string::npos ? partner : partner.substr(0, colon) + "(" + partner.substr(colon + 1) + ")");
        }
        return s;
    }
};

enum class Metric { Dice, IoU };

// --- t-test ----------------------------------------------------------------

struct TTest {
    double t = 0.0;
    double p = 1.0;
    double df = 0.0;
};

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Two-sided two-sample Student t with pooled variance. Zero pooled
/// variance gives t = 0, p = 1 for equal means and t = +-inf, p = 0 otherwise.
inline TTest t_test_pooled(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw ValidationError("t-test needs at least two values per group");
    const double ma = mean(a);
    const double mb = mean(b);
    double ssa = 0, ssb = 0;
    for (double x : a) ssa += (x - ma) * (x - ma);
    for (double x : b) ssb += (x - mb) * (x - mb);
    TTest r;
    r.df = static_cast<double>(a.size() + b.size() - 2);
    const double pooled = (ssa + ssb) / r.df;
    const double diff = ma - mb;
    if (pooled == 0.0) {
        if (diff == 0.0) return r;
        r.t = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    r.t = diff / std::sqrt(pooled * (1.0 / static_cast<double>(a.size()) + 1.0 / static_cast<double>(b.size())));
    const boost::math::students_t dist(r.df);
    r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
    return r;
}

// --- aggregation -----------------------------------------------------------

struct RunRecord {
    ConfigKey config;
    CellId cell;
    int run_idx = 0;
    double dice = 0.0;
    double iou = 0.0;
};

struct AggregateCell {
    double mean_dice = kNaN;
    double mean_iou = kNaN;
    double t = kNaN;
    double p_value = kNaN;
    bool significant = false;
    double delta_vs_none = kNaN;
    std::size_t runs = 0;

    [[nodiscard]] double value(Metric m) const { return m == Metric::Dice ? mean_dice : mean_iou; }
};

struct AggregateRow {
    ConfigKey config;
    /// Aligned with AggregateTable::cells.
    std::vector<AggregateCell> cells;
};

struct AggregateTable {
    Metric metric = Metric::Dice;
    std::vector<CellId> cells;
    std::vector<AggregateRow> rows;

    [[nodiscard]] const AggregateRow* find(const ConfigKey& k) const {
        for (const auto& r : rows)
            if (r.config == k) return &r;
        return nullptr;
    }
    [[nodiscard]] const AggregateRow& baseline() const {
        for (const auto& r : rows)
            if (r.config.is_baseline()) return r;
        throw ValidationError("baseline missing: no NONE row");
    }
};

/// Table-order cells when every cell is a benchmark cell, otherwise sorted.
inline std::vector<CellId> order_cells(std::vector<CellId> cells) {
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    if (std::all_of(cells.begin(), cells.end(), is_benchmark_cell)) {
        std::vector<CellId> ordered;
        for (const auto& c : benchmark_cells())
            if (std::binary_search(cells.begin(), cells.end(), c)) ordered.push_back(c);
        return ordered;
    }
    return cells;
}

/// Deltas of the table metric against the NONE row, cell by cell.
inline void recompute_deltas(AggregateTable& table) {
    const AggregateRow base = table.baseline();
    for (auto& row : table.rows)
        for (std::size_t c = 0; c < table.cells.size(); ++c)
            row.cells[c].delta_vs_none = row.cells[c].value(table.metric) - base.cells[c].value(table.metric);
}

/// Means, pooled t-tests against NONE on the chosen metric, significance at
/// `alpha`, and deltas. Every row must cover every cell that appears.
inline AggregateTable aggregate(const std::vector<RunRecord>& runs, Metric metric = Metric::Dice, double alpha = 0.05) {
    std::map<std::pair<ConfigKey, CellId>, std::map<int, const RunRecord*>> groups;
    std::vector<ConfigKey> configs;
    std::vector<CellId> cells;
    for (const auto& r : runs) {
        auto& g = groups[{r.config, r.cell}];
        if (!g.emplace(r.run_idx, &r).second)
            throw ValidationError("duplicate run " + std::to_string(r.run_idx) + " for " + r.config.label() + " in " + r.cell.label());
        configs.push_back(r.config);
        cells.push_back(r.cell);
    }
    std::sort(configs.begin(), configs.end());
    configs.erase(std::unique(configs.begin(), configs.end()), configs.end());
    AggregateTable table;
    table.metric = metric;
    table.cells = order_cells(cells);
    auto base_it = std::find_if(configs.begin(), configs.end(), [](const ConfigKey& k) { return k.is_baseline(); });
    if (base_it == configs.end()) throw ValidationError("baseline missing: runs contain no NONE rows");
    // Baseline first, then the rest in key order.
    std::rotate(configs.begin(), base_it, base_it + 1);

    auto values = [&](const ConfigKey& k, const CellId& c, Metric m) {
        auto it = groups.find({k, c});
        if (it == groups.end()) throw ValidationError("missing runs for " + k.label() + " in " + c.label());
        std::vector<double> v;
        for (const auto& [idx, rec] : it->second) v.push_back(m == Metric::Dice ? rec->dice : rec->iou);
        return v;
    };
    for (const auto& k : configs) {
        AggregateRow row{k, {}};
        for (const auto& c : table.cells) {
            AggregateCell cell;
            const auto dice = values(k, c, Metric::Dice);
            const auto iou = values(k, c, Metric::IoU);
            cell.runs = dice.size();
            cell.mean_dice = mean(dice);
            cell.mean_iou = mean(iou);
            const auto base = values(configs.front(), c, metric);
            const auto tt = t_test_pooled(metric == Metric::Dice ? dice : iou, base);
            cell.t = tt.t;
            cell.p_value = tt.p;
            cell.significant = tt.p < alpha;
            row.cells.push_back(cell);
        }
        table.rows.push_back(std::move(row));
    }
    recompute_deltas(table);
    return table;
}

// --- summaries -------------------------------------------------------------

/// Unweighted mean over the row's cells.
inline double row_mean(const AggregateTable& table, const AggregateRow& row) {
    double s = 0;
    for (const auto& c : row.cells) s += c.value(table.metric);
    return s / static_cast<double>(row.cells.size());
}

inline double row_mean(const AggregateTable& table, const ConfigKey& k) {
    const auto* row = table.find(k);
    if (!row) throw ValidationError("no row " + k.label());
    return row_mean(table, *row);
}

inline int significant_count(const AggregateRow& row) {
    return static_cast<int>(std::count_if(row.cells.begin(), row.cells.end(), [](const AggregateCell& c) { return c.significant; }));
}

inline int positive_delta_count(const AggregateRow& row) {
    return static_cast<int>(std::count_if(row.cells.begin(), row.cells.end(), [](const AggregateCell& c) { return c.delta_vs_none > 0.0; }));
}

struct SelectionOptions {
    int min_positive = 6;
    int min_significant = 5;
    std::size_t top_k = 5;
};

struct SelectionRow {
    ConfigKey config;
    int sig05_count = 0;
    int delta_score = 0;
    double row_mean = 0.0;
    bool by_significance = false;
    bool by_topk = false;
    [[nodiscard]] bool selected() const { return by_significance || by_topk; }
};

struct SelectionReport {
    /// Every non-baseline row, ordered by significance count, positive-delta
    /// count and row mean (all descending), then label.
    std::vector<SelectionRow> rows;

    [[nodiscard]] std::vector<SelectionRow> selected() const {
        std::vector<SelectionRow> out;
        for (const auto& r : rows)
            if (r.selected()) out.push_back(r);
        return out;
    }
    [[nodiscard]] const SelectionRow* find(const ConfigKey& k) const {
        for (const auto& r : rows)
            if (r.config == k) return &r;
        return nullptr;
    }
};

inline SelectionReport phase1_select(const AggregateTable& table, const SelectionOptions& opt = {}) {
    SelectionReport rep;
    for (const auto& row : table.rows) {
        if (row.config.is_baseline()) continue;
        SelectionRow s;
        s.config = row.config;
        s.sig05_count = significant_count(row);
        s.delta_score = positive_delta_count(row);
        s.row_mean = row_mean(table, row);
        s.by_significance = s.delta_score >= opt.min_positive && s.sig05_count >= opt.min_significant;
        rep.rows.push_back(s);
    }
    std::vector<std::size_t> order(rep.rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rep.rows[a].row_mean != rep.rows[b].row_mean) return rep.rows[a].row_mean > rep.rows[b].row_mean;
        return rep.rows[a].config.label() < rep.rows[b].config.label();
    });
    for (std::size_t i = 0; i < order.size() && i < opt.top_k; ++i) rep.rows[order[i]].by_topk = true;
    std::sort(rep.rows.begin(), rep.rows.end(), [](const SelectionRow& a, const SelectionRow& b) {
        if (a.sig05_count != b.sig05_count) return a.sig05_count > b.sig05_count;
        if (a.delta_score != b.delta_score) return a.delta_score > b.delta_score;
        if (a.row_mean != b.row_mean) return a.row_mean > b.row_mean;
        return a.config.label() < b.config.label();
    });
    return rep;
}

struct Matrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::vector<double>> values;
};

/// Raw metric means and the same minus the NONE row, rows in table order.
inline std::pair<Matrix, Matrix> heatmap_matrices(const AggregateTable& table) {
    Matrix raw, delta;
    for (const auto& c : table.cells) raw.col_labels.push_back(c.label());
    delta.col_labels = raw.col_labels;
    const auto& base = table.baseline();
    for (const auto& row : table.rows) {
        raw.row_labels.push_back(row.config.label());
        delta.row_labels.push_back(row.config.label());
        std::vector<double> r, d;
        for (std::size_t c = 0; c < row.cells.size(); ++c) {
            r.push_back(row.cells[c].value(table.metric));
            d.push_back(row.cells[c].value(table.metric) - base.cells[c].value(table.metric));
        }
        raw.values.push_back(std::move(r));
        delta.values.push_back(std::move(d));
    }
    return {raw, delta};
}

struct NoHarmRow {
    ConfigKey config;
    bool passes = false;
    double min_cross_delta = kNaN;
};

/// Strictly positive delta in every cross-dataset cell. NONE never passes.
inline std::vector<NoHarmRow> no_harm_report(const AggregateTable& table) {
    const auto& base = table.baseline();
    std::vector<NoHarmRow> out;
    for (const auto& row : table.rows) {
        NoHarmRow r{row.config, true, std::numeric_limits<double>::infinity()};
        for (std::size_t c = 0; c < table.cells.size(); ++c) {
            if (in_domain(table.cells[c])) continue;
            const double d = row.cells[c].value(table.metric) - base.cells[c].value(table.metric);
            r.min_cross_delta = std::min(r.min_cross_delta, d);
            if (!(d > 0.0)) r.passes = false;
        }
        out.push_back(r);
    }
    return out;
}

inline std::vector<ConfigKey> no_harm_filter(const AggregateTable& table) {
    std::vector<ConfigKey> out;
    for (const auto& r : no_harm_report(table))
        if (r.passes) out.push_back(r.config);
    return out;
}

// --- rank correlation ------------------------------------------------------

/// 1-based ranks, ties get the average of the positions they span.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = (static_cast<double>(i + j) / 2.0) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return kNaN;
    return sab / std::sqrt(saa * sbb);
}

/// Pearson correlation of average ranks; NaN when either input is constant.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("spearman inputs differ in length");
    if (a.size() < 2) throw ValidationError("spearman needs at least two points");
    return pearson(average_ranks(a), average_ranks(b));
}

struct SpearmanEntry {
    std::string kind;   // "source" or "target"
    std::string group;  // target dataset for "target", empty for "source"
    std::string a;
    std::string b;
    double rho = kNaN;
    std::size_t n = 0;
};

/// Ranking agreement across training datasets, NONE excluded. "source"
/// compares per-train row means; "target" compares the columns of two
/// training sets on one test set.
inline std::vector<SpearmanEntry> spearman_report(const AggregateTable& table) {
    std::vector<std::string> trains;
    std::vector<std::string> tests;
    for (const auto& c : table.cells) {
        if (std::find(trains.begin(), trains.end(), c.train) == trains.end()) trains.push_back(c.train);
        if (std::find(tests.begin(), tests.end(), c.test) == tests.end()) tests.push_back(c.test);
    }
    std::vector<const AggregateRow*> rows;
    for (const auto& r : table.rows)
        if (!r.config.is_baseline()) rows.push_back(&r);
    std::vector<SpearmanEntry> out;
    if (rows.size() < 2) return out;

    auto source_vec = [&](const std::string& train) {
        std::vector<double> v;
        for (const auto* r : rows) {
            double s = 0;
            int n = 0;
            for (std::size_t c = 0; c < table.cells.size(); ++c)
                if (table.cells[c].train == train) {
                    s += r->cells[c].value(table.metric);
                    ++n;
                }
            v.push_back(s / n);
        }
        return v;
    };
    for (std::size_t i = 0; i < trains.size(); ++i)
        for (std::size_t j = i + 1; j < trains.size(); ++j)
            out.push_back({"source", "", trains[i], trains[j], spearman(source_vec(trains[i]), source_vec(trains[j])), rows.size()});

    auto column = [&](const CellId& id) -> std::optional<std::vector<double>> {
        auto it = std::find(table.cells.begin(), table.cells.end(), id);
        if (it == table.cells.end()) return std::nullopt;
        const auto c = static_cast<std::size_t>(it - table.cells.begin());
        std::vector<double> v;
        for (const auto* r : rows) v.push_back(r->cells[c].value(table.metric));
        return v;
    };
    for (const auto& test : tests)
        for (std::size_t i = 0; i < trains.size(); ++i)
            for (std::size_t j = i + 1; j < trains.size(); ++j) {
                const auto a = column({trains[i], test});
                const auto b = column({trains[j], test});
                if (a && b) out.push_back({"target", test, trains[i], trains[j], spearman(*a, *b), rows.size()});
            }
    return out;
}

}  // namespace echoaug::analysis
