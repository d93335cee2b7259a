#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "echoaug/analysis.hpp"
#include "echoaug/errors.hpp"
#include "echoaug/metrics.hpp"
#include "echoaug/preset.hpp"

// CSV formats: runs.csv, aggregate tables, analysis reports.

namespace echoaug::io {

using namespace analysis;

// --- low level -------------------------------------------------------------

/// Comma-separated fields; double quotes group and "" escapes a quote.
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
    }
    return out;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based source line of each row, for diagnostics.
    std::vector<std::size_t> lines;

    [[nodiscard]] std::optional<std::size_t> column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }
    [[nodiscard]] std::size_t index(const std::string& name) const {
        if (const auto c = column(name)) return *c;
        throw ValidationError("missing column '" + name + "'");
    }
};

inline CsvTable parse_csv(std::istream& in, const std::string& what) {
    CsvTable t;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size())
            throw ValidationError(what + " line " + std::to_string(n) + ": expected " + std::to_string(t.header.size()) +
                                  " fields, found " + std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
        t.lines.push_back(n);
    }
    if (t.header.empty()) throw ValidationError(what + " is empty");
    return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_csv(in, path.string());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("short write on " + path.string());
}

/// Round-trip precision; "nan" / "inf" / "-inf" for non-finite values.
inline std::string fmt_full(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Four decimals, as in the published tables; never prints "-0.0000".
inline std::string fmt4(double v) {
    if (!std::isfinite(v)) return fmt_full(v);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    if (s == "-0.0000") s = "0.0000";
    return s;
}

inline double parse_double(const std::string& s, const std::string& where) {
    if (s == "nan") return kNaN;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ValidationError(where + ": '" + s + "' is not a number");
    return v;
}

inline long parse_int(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size()) throw ValidationError(where + ": '" + s + "' is not an integer");
    return v;
}

inline bool parse_bool(const std::string& s, const std::string& where) {
    if (s == "1" || s == "true" || s == "True" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "False" || s == "no") return false;
    throw ValidationError(where + ": '" + s + "' is not a boolean");
}

// --- labels ----------------------------------------------------------------

/// Canonical transform and setting names; with free labels unknown names
/// pass through verbatim.
inline ConfigKey make_config(const std::string& aug, const std::string& setting, const std::string& partner,
                             bool free_labels, const std::string& where) {
    ConfigKey k{aug, setting, ""};
    if (k.is_baseline()) return {"NONE", "NONE", ""};
    auto canon = [&](const std::string& t, const std::string& s) -> std::pair<std::string, std::string> {
        const auto pt = parse_transform(t);
        const auto ps = parse_setting(s);
        if (pt && ps) return {std::string(to_string(*pt)), std::string(to_string(*ps))};
        if (free_labels) return {t, s};
        throw ValidationError(where + ": unknown augmentation " + t + "(" + s + "); use free labels for names outside the benchmark");
    };
    std::tie(k.augmentation, k.setting) = canon(aug, setting);
    if (!partner.empty()) {
        const auto colon = partner.find(':');
        if (colon == std::string::npos) throw ValidationError(where + ": pair_partner must be Transform:Setting");
        const auto [pt, ps] = canon(partner.substr(0, colon), partner.substr(colon + 1));
        if (pt == k.augmentation) throw ValidationError(where + ": pair of one transform with itself");
        k.partner = pt + ":" + ps;
    }
    return k;
}

inline CellId make_cell(const std::string& train, const std::string& test, bool free_labels, const std::string& where) {
    CellId c{train, test};
    if (!free_labels && !is_benchmark_cell(c))
        throw ValidationError(where + ": cell " + c.label() + " is not one of the nine train/test cells");
    if (train.empty() || test.empty()) throw ValidationError(where + ": empty dataset label");
    return c;
}

inline std::size_t require_column(const CsvTable& t, const std::string& name, const std::string& what) {
    const auto c = t.column(name);
    if (!c) throw ValidationError(what + ": missing column '" + name + "'");
    return *c;
}

// --- runs.csv --------------------------------------------------------------

inline std::vector<RunRecord> parse_runs(const CsvTable& t, bool free_labels, const std::string& what) {
    const auto c_aug = require_column(t, "augmentation", what);
    const auto c_set = require_column(t, "setting", what);
    const auto c_partner = t.column("pair_partner");
    const auto c_train = require_column(t, "train_ds", what);
    const auto c_test = require_column(t, "test_ds", what);
    const auto c_run = require_column(t, "run_idx", what);
    const auto c_dice = require_column(t, "dice", what);
    const auto c_iou = require_column(t, "iou", what);
    std::vector<RunRecord> runs;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        const std::string where = what + " line " + std::to_string(t.lines[i]);
        RunRecord rec;
        rec.config = make_config(r[c_aug], r[c_set], c_partner ? r[*c_partner] : std::string{}, free_labels, where);
        rec.cell = make_cell(r[c_train], r[c_test], free_labels, where);
        const long idx = parse_int(r[c_run], where);
        if (idx < 0 || idx > 2) throw ValidationError(where + ": run_idx must be 0, 1 or 2");
        rec.run_idx = static_cast<int>(idx);
        rec.dice = parse_double(r[c_dice], where);
        rec.iou = parse_double(r[c_iou], where);
        if (!(rec.dice >= 0.0 && rec.dice <= 1.0)) throw ValidationError(where + ": dice outside [0,1]");
        if (!(rec.iou >= 0.0 && rec.iou <= 1.0)) throw ValidationError(where + ": iou outside [0,1]");
        if (rec.iou > rec.dice + 1e-12) throw ValidationError(where + ": iou exceeds dice");
        runs.push_back(rec);
    }
    return runs;
}

inline std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path, bool free_labels = false) {
    return parse_runs(read_csv(path), free_labels, path.string());
}

inline std::string runs_header() { return "augmentation,setting,pair_partner,train_ds,test_ds,run_idx,dice,iou\n"; }

inline std::string format_run(const RunRecord& r) {
    return csv_field(r.config.augmentation) + "," + csv_field(r.config.setting) + "," + csv_field(r.config.partner) + "," +
           csv_field(r.cell.train) + "," + csv_field(r.cell.test) + "," + std::to_string(r.run_idx) + "," +
           fmt_full(r.dice) + "," + fmt_full(r.iou) + "\n";
}

// --- aggregate tables ------------------------------------------------------

inline std::string aggregate_header() {
    return "augmentation,setting,pair_partner,train_ds,test_ds,mean_dice,mean_iou,p_value,significant,delta_vs_none\n";
}

/// Aggregate rows as written by write_aggregate_csv (or transcribed from a
/// published table). Empty means read as NaN; an empty `significant` falls
/// back to p_value < alpha. Deltas are recomputed against the NONE row.
inline AggregateTable parse_aggregate(const CsvTable& t, Metric metric, bool free_labels, const std::string& what,
                                      double alpha = 0.05) {
    const auto c_aug = require_column(t, "augmentation", what);
    const auto c_set = require_column(t, "setting", what);
    const auto c_partner = t.column("pair_partner");
    const auto c_train = require_column(t, "train_ds", what);
    const auto c_test = require_column(t, "test_ds", what);
    const auto c_dice = require_column(t, "mean_dice", what);
    const auto c_iou = t.column("mean_iou");
    const auto c_p = t.column("p_value");
    const auto c_sig = t.column("significant");
    std::map<std::pair<ConfigKey, CellId>, AggregateCell> cells_by_key;
    std::vector<ConfigKey> order;
    std::vector<CellId> cells;
    auto opt_double = [](const std::string& s, const std::string& where) { return s.empty() ? kNaN : parse_double(s, where); };
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        const std::string where = what + " line " + std::to_string(t.lines[i]);
        const auto key = make_config(r[c_aug], r[c_set], c_partner ? r[*c_partner] : std::string{}, free_labels, where);
        const auto cell = make_cell(r[c_train], r[c_test], free_labels, where);
        AggregateCell a;
        a.mean_dice = opt_double(r[c_dice], where);
        a.mean_iou = c_iou ? opt_double(r[*c_iou], where) : kNaN;
        a.p_value = c_p ? opt_double(r[*c_p], where) : kNaN;
        const bool has_sig = c_sig && !r[*c_sig].empty();
        if (has_sig) a.significant = parse_bool(r[*c_sig], where);
        else a.significant = !std::isnan(a.p_value) && a.p_value < alpha;
        if (has_sig && !std::isnan(a.p_value) && a.significant != (a.p_value < alpha))
            throw ValidationError(where + ": significant flag disagrees with p_value");
        if (!cells_by_key.emplace(std::make_pair(key, cell), a).second)
            throw ValidationError(where + ": duplicate row for " + key.label() + " in " + cell.label());
        if (std::find(order.begin(), order.end(), key) == order.end()) order.push_back(key);
        cells.push_back(cell);
    }
    AggregateTable table;
    table.metric = metric;
    table.cells = order_cells(cells);
    for (const auto& k : order) {
        AggregateRow row{k, {}};
        for (const auto& c : table.cells) {
            auto it = cells_by_key.find({k, c});
            if (it == cells_by_key.end()) throw ValidationError(what + ": missing " + k.label() + " in " + c.label());
            if (std::isnan(it->second.value(metric)))
                throw ValidationError(what + ": no " + std::string(metric == Metric::Dice ? "dice" : "iou") + " value for " +
                                      k.label() + " in " + c.label());
            row.cells.push_back(it->second);
        }
        table.rows.push_back(std::move(row));
    }
    recompute_deltas(table);
    return table;
}

/// runs.csv (has run_idx) or an aggregate table (has mean_dice).
inline AggregateTable load_results(const std::filesystem::path& path, Metric metric, bool free_labels, double alpha = 0.05) {
    const auto t = read_csv(path);
    if (t.column("run_idx")) return aggregate(parse_runs(t, free_labels, path.string()), metric, alpha);
    if (t.column("mean_dice")) return parse_aggregate(t, metric, free_labels, path.string(), alpha);
    throw ValidationError(path.string() + ": neither a runs file (run_idx column) nor an aggregate table (mean_dice column)");
}

inline std::string format_aggregate(const AggregateTable& t) {
    std::string s = aggregate_header();
    for (const auto& row : t.rows)
        for (std::size_t c = 0; c < t.cells.size(); ++c) {
            const auto& a = row.cells[c];
            s += csv_field(row.config.augmentation) + "," + csv_field(row.config.setting) + "," + csv_field(row.config.partner) +
                 "," + csv_field(t.cells[c].train) + "," + csv_field(t.cells[c].test) + "," + fmt_full(a.mean_dice) + "," +
                 fmt_full(a.mean_iou) + "," + fmt_full(a.p_value) + "," + (a.significant ? "1" : "0") + "," +
                 fmt_full(a.delta_vs_none) + "\n";
        }
    return s;
}

inline std::string format_selection(const SelectionReport& rep) {
    std::string s = "augmentation,setting,pair_partner,sig05_count,delta_dice_score,row_mean,selected_by_significance,"
                    "selected_by_topk,selected\n";
    for (const auto& r : rep.rows)
        s += csv_field(r.config.augmentation) + "," + csv_field(r.config.setting) + "," + csv_field(r.config.partner) + "," +
             std::to_string(r.sig05_count) + "," + std::to_string(r.delta_score) + "," + fmt4(r.row_mean) + "," +
             (r.by_significance ? "1" : "0") + "," + (r.by_topk ? "1" : "0") + "," + (r.selected() ? "1" : "0") + "\n";
    return s;
}

/// Selected rows of a selection CSV as (transform, setting) name pairs.
inline std::vector<std::pair<std::string, std::string>> read_selected(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    const std::string what = path.string();
    const auto c_aug = require_column(t, "augmentation", what);
    const auto c_set = require_column(t, "setting", what);
    const auto c_sel = require_column(t, "selected", what);
    const auto c_partner = t.column("pair_partner");
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        if (!parse_bool(r[c_sel], what + " line " + std::to_string(t.lines[i]))) continue;
        if (c_partner && !r[*c_partner].empty())
            throw ValidationError(what + " line " + std::to_string(t.lines[i]) + ": pairs cannot be paired again");
        out.emplace_back(r[c_aug], r[c_set]);
    }
    return out;
}

inline std::string format_matrix(const Matrix& m, bool four_decimals = true) {
    std::string s = "config";
    for (const auto& c : m.col_labels) s += "," + csv_field(c);
    s += "\n";
    for (std::size_t r = 0; r < m.row_labels.size(); ++r) {
        s += csv_field(m.row_labels[r]);
        for (double v : m.values[r]) s += "," + (four_decimals ? fmt4(v) : fmt_full(v));
        s += "\n";
    }
    return s;
}

inline std::string format_no_harm(const std::vector<NoHarmRow>& rows) {
    std::string s = "config,passes,min_cross_delta\n";
    for (const auto& r : rows) s += csv_field(r.config.label()) + "," + (r.passes ? "1" : "0") + "," + fmt4(r.min_cross_delta) + "\n";
    return s;
}

inline std::string format_spearman(const std::vector<SpearmanEntry>& rows) {
    std::string s = "kind,target,train_a,train_b,rho,n\n";
    for (const auto& r : rows)
        s += r.kind + "," + csv_field(r.group) + "," + csv_field(r.a) + "," + csv_field(r.b) + "," + fmt4(r.rho) + "," +
             std::to_string(r.n) + "\n";
    return s;
}

// --- image statistics and metrics -----------------------------------------

inline std::string format_stats(const std::vector<std::pair<std::string, ImageStatsRecord>>& rows) {
    std::string s = "image";
    for (const auto& c : stats_columns()) s += "," + c;
    s += "\n";
    for (const auto& [name, rec] : rows) {
        s += csv_field(name);
        for (const auto& v : stats_values(rec)) s += "," + (v ? fmt_full(*v) : std::string{});
        s += "\n";
    }
    return s;
}

}  // namespace echoaug::io
