#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "echoaug/echoaug.hpp"

namespace fs = std::filesystem;
using namespace echoaug;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) { io::write_text(path, j.dump(2) + "\n"); }

int run_augment(const std::string& pipeline, const std::string& input, const std::string& output,
                const std::optional<std::uint64_t>& seed) {
    PipelineSpec spec = pipeline_from_json(read_json(pipeline));
    if (seed) spec.seed = *seed;
    const auto manifest = materialize_dataset(spec, input, output);
    std::cout << "augmented " << manifest["files"].size() << " samples into " << output << "\n";
    return 0;
}

int run_fanmask(const std::string& input, const std::string& output, const fan::FanMaskConfig& cfg) {
    ensure_dir(output);
    const auto names = png::list_pngs(input);
    for (const auto& name : names) png::write_mask(fs::path(output) / name, fan::extract_fan_mask(png::read_image(fs::path(input) / name), cfg));
    std::cout << "wrote " << names.size() << " fan masks to " << output << "\n";
    return 0;
}

int run_stats(const std::string& input, const std::string& masks, const std::string& out) {
    std::vector<std::pair<std::string, ImageStatsRecord>> rows;
    std::vector<ImageStatsRecord> recs;
    for (const auto& name : png::list_pngs(input)) {
        const GrayImage img = png::read_image(fs::path(input) / name);
        std::optional<BinaryMask> lv;
        if (!masks.empty()) lv = png::read_mask(fs::path(masks) / name);
        const auto rec = image_stats(img, lv ? &*lv : nullptr);
        rows.emplace_back(name, rec);
        recs.push_back(rec);
    }
    if (!rows.empty()) rows.emplace_back("MEAN", mean_stats(recs));
    io::write_text(out, io::format_stats(rows));
    return 0;
}

int run_metrics(const std::string& pred, const std::string& truth, const std::string& out) {
    std::string s = "image,dice,iou\n";
    double sd = 0, si = 0;
    const auto names = png::list_pngs(truth);
    for (const auto& name : names) {
        const auto t = png::read_mask(fs::path(truth) / name);
        const auto p = png::read_mask(fs::path(pred) / name);
        const double d = dice(p, t);
        const double u = iou(p, t);
        sd += d;
        si += u;
        s += io::csv_field(name) + "," + io::fmt_full(d) + "," + io::fmt_full(u) + "\n";
    }
    if (!names.empty()) {
        const auto n = static_cast<double>(names.size());
        s += "MEAN," + io::fmt_full(sd / n) + "," + io::fmt_full(si / n) + "\n";
    }
    io::write_text(out, s);
    return 0;
}

int run_analyze(const std::string& runs, const std::string& out_dir, const analysis::SelectionOptions& opt,
                const std::string& metric_name, double alpha, bool free_labels) {
    if (metric_name != "dice" && metric_name != "iou") throw ValidationError("--metric must be dice or iou");
    const auto metric = metric_name == "dice" ? analysis::Metric::Dice : analysis::Metric::IoU;
    const auto table = io::load_results(runs, metric, free_labels, alpha);
    ensure_dir(out_dir);
    const fs::path dir(out_dir);
    const auto [raw, delta] = analysis::heatmap_matrices(table);
    io::write_text(dir / "aggregate.csv", io::format_aggregate(table));
    io::write_text(dir / "selection.csv", io::format_selection(analysis::phase1_select(table, opt)));
    io::write_text(dir / "heatmap_raw.csv", io::format_matrix(raw));
    io::write_text(dir / "heatmap_delta.csv", io::format_matrix(delta));
    io::write_text(dir / "no_harm.csv", io::format_no_harm(analysis::no_harm_report(table)));
    io::write_text(dir / "spearman.csv", io::format_spearman(analysis::spearman_report(table)));
    std::cout << "analyzed " << table.rows.size() << " configurations over " << table.cells.size() << " cells\n";
    return 0;
}

int run_pairs(const std::string& selection, const std::string& out) {
    std::vector<AugPreset> chosen;
    for (const auto& [t, s] : io::read_selected(selection)) {
        auto p = find_preset(t, s);
        if (!p) throw ValidationError("selected " + t + "(" + s + ") has no registry preset");
        chosen.push_back(*p);
    }
    const auto plan = build_pairwise_plan(chosen);
    write_json(out, plan_to_json(plan));
    std::cout << plan.size() << " pairs\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ultrasound augmentation engine and benchmark analysis"};
    app.require_subcommand(1);

    std::string pipeline, input, output, masks, pred, truth, out, runs, selection;
    std::optional<std::uint64_t> seed;
    fan::FanMaskConfig fan_cfg;
    analysis::SelectionOptions sel;
    std::string metric = "dice";
    double alpha = 0.05;
    bool free_labels = false;

    auto* augment = app.add_subcommand("augment", "Materialize an augmented dataset");
    augment->add_option("--pipeline", pipeline, "PipelineSpec JSON")->required();
    augment->add_option("--input", input, "Directory with images/ and masks/")->required();
    augment->add_option("--output", output, "Output directory")->required();
    augment->add_option("--seed", seed, "Overrides the spec seed");

    auto* fanmask = app.add_subcommand("fanmask", "Extract fan-sector masks");
    fanmask->add_option("--input", input, "Image directory")->required();
    fanmask->add_option("--output", output, "Mask directory")->required();
    fanmask->add_option("--close-radius", fan_cfg.close_radius);
    fanmask->add_option("--open-radius", fan_cfg.open_radius);

    auto* stats = app.add_subcommand("stats", "Intensity statistics per image");
    stats->add_option("--input", input, "Image directory")->required();
    stats->add_option("--masks", masks, "LV mask directory");
    stats->add_option("--out", out, "Output CSV")->required();

    auto* metrics = app.add_subcommand("metrics", "Dice and IoU per mask pair");
    metrics->add_option("--pred", pred)->required();
    metrics->add_option("--truth", truth)->required();
    metrics->add_option("--out", out)->required();

    auto* analyze = app.add_subcommand("analyze", "Aggregate runs and select augmentations");
    analyze->add_option("--runs", runs, "runs.csv or aggregate table")->required();
    analyze->add_option("--out-dir", output, "Report directory")->required();
    analyze->add_option("--topk", sel.top_k);
    analyze->add_option("--min-sig", sel.min_significant);
    analyze->add_option("--min-pos", sel.min_positive);
    analyze->add_option("--metric", metric);
    analyze->add_option("--alpha", alpha);
    analyze->add_flag("--free-labels", free_labels, "Accept dataset and augmentation names outside the benchmark set");

    auto* pairs = app.add_subcommand("pairs", "Cross-type pair plan from a selection");
    pairs->add_option("--selection", selection)->required();
    pairs->add_option("--out", out)->required();

    auto* registry = app.add_subcommand("registry", "Export the preset registry as JSON");
    registry->add_option("--out", out, "Output file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*augment) return run_augment(pipeline, input, output, seed);
        if (*fanmask) return run_fanmask(input, output, fan_cfg);
        if (*stats) return run_stats(input, masks, out);
        if (*metrics) return run_metrics(pred, truth, out);
        if (*analyze) return run_analyze(runs, output, sel, metric, alpha, free_labels);
        if (*pairs) return run_pairs(selection, out);
        if (*registry) {
            const auto j = registry_to_json(load_preset_registry());
            if (out.empty()) std::cout << j.dump(2) << "\n";
            else write_json(out, j);
            return 0;
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
