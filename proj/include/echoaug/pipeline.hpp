#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "echoaug/errors.hpp"
#include "echoaug/fan_mask.hpp"
#include "echoaug/image.hpp"
#include "echoaug/imgproc.hpp"
#include "echoaug/png_io.hpp"
#include "echoaug/preset.hpp"
#include "echoaug/rng.hpp"
#include "echoaug/transforms.hpp"

namespace echoaug {

struct PipelineSpec {
    std::vector<AugPreset> stages;
    std::uint64_t seed = 0;
    /// Working size; every output is size x size.
    std::size_t size = 512;
    /// Pair mode requires distinct transforms across stages.
    bool pair_mode = false;

    friend bool operator==(const PipelineSpec&, const PipelineSpec&) = default;
};

inline void validate(const PipelineSpec& spec) {
    if (spec.size == 0) throw ValidationError("pipeline size must be positive");
    for (const auto& st : spec.stages) validate(st);
    if (spec.pair_mode)
        for (std::size_t i = 0; i < spec.stages.size(); ++i)
            for (std::size_t j = i + 1; j < spec.stages.size(); ++j)
                if (spec.stages[i].transform == spec.stages[j].transform)
                    throw ValidationError("pair mode: two stages use " + std::string(to_string(spec.stages[i].transform)));
}

/// Registry preset with per-stage overrides applied. "p" overrides the
/// probability; every other key must name a parameter of the transform.
inline AugPreset resolve_stage(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("pipeline stage must be an object");
    if (!j.contains("transform") || !j["transform"].is_string() || !j.contains("setting") || !j["setting"].is_string())
        throw ValidationError("pipeline stage needs string fields 'transform' and 'setting'");
    const auto tname = j["transform"].get<std::string>();
    const auto sname = j["setting"].get<std::string>();
    auto p = find_preset(tname, sname);
    if (!p) throw ValidationError("no preset " + tname + "(" + sname + ") in registry");
    if (j.contains("overrides")) {
        const auto& ov = j["overrides"];
        if (!ov.is_object()) throw ValidationError("stage overrides must be an object");
        for (const auto& [name, value] : ov.items()) {
            if (name == "p" || name == "probability") {
                if (!value.is_number()) throw ValidationError("override 'p' must be a number");
                p->probability = value.get<double>();
            } else {
                p->params.set(name, range_from_json(value, name));
            }
        }
        validate(*p);
    }
    return *p;
}

inline PipelineSpec pipeline_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object()) throw ValidationError("pipeline spec must be a JSON object");
        PipelineSpec spec;
        if (j.contains("seed")) {
            if (!j["seed"].is_number_unsigned()) throw ValidationError("'seed' must be a non-negative integer");
            spec.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("size")) {
            if (!j["size"].is_number_unsigned()) throw ValidationError("'size' must be a positive integer");
            spec.size = j["size"].get<std::size_t>();
        }
        if (j.contains("mode")) {
            const auto mode = j["mode"].get<std::string>();
            if (mode != "single" && mode != "pair") throw ValidationError("'mode' must be \"single\" or \"pair\"");
            spec.pair_mode = mode == "pair";
        }
        if (!j.contains("stages") || !j["stages"].is_array()) throw ValidationError("pipeline spec needs a 'stages' array");
        for (const auto& st : j["stages"]) spec.stages.push_back(resolve_stage(st));
        validate(spec);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed pipeline spec: ") + e.what());
    }
}

/// Full form: every stage carries its resolved parameters, so the document
/// alone reproduces the run even if the registry changes.
inline nlohmann::ordered_json pipeline_to_json(const PipelineSpec& spec) {
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& st : spec.stages) {
        nlohmann::ordered_json ov = nlohmann::ordered_json::object();
        ov["p"] = st.probability;
        for (const auto& [name, r] : st.params.values()) ov[name] = {r.lo, r.hi};
        stages.push_back({{"transform", std::string(to_string(st.transform))},
                          {"setting", std::string(to_string(st.setting))},
                          {"overrides", ov}});
    }
    return {{"stages", stages}, {"seed", spec.seed}, {"size", spec.size}, {"mode", spec.pair_mode ? "pair" : "single"}};
}

inline bool needs_fan_mask(const PipelineSpec& spec) {
    return std::any_of(spec.stages.begin(), spec.stages.end(), [](const AugPreset& p) { return needs_fan_mask(p.transform); });
}

/// Resize to the working size, then run the stages in order. Stage i draws
/// from derive_stream(seed, sample_index, i).
inline Sample apply_pipeline(const PipelineSpec& spec, const Sample& sample, std::uint64_t sample_index) {
    validate(sample);
    Sample s = imgproc::resize(sample, spec.size, spec.size);
    for (std::size_t i = 0; i < spec.stages.size(); ++i) {
        RngStream rng = derive_stream(spec.seed, sample_index, i);
        s = apply_preset(spec.stages[i], s, rng);
    }
    if (s.image.width() != spec.size || s.image.height() != spec.size) s = imgproc::resize(s, spec.size, spec.size);
    return s;
}

// --- pairwise plan ---------------------------------------------------------

/// Canonical order: transform name, then setting code, both lexicographic.
inline bool canonical_less(const AugPreset& a, const AugPreset& b) {
    const auto ta = to_string(a.transform);
    const auto tb = to_string(b.transform);
    if (ta != tb) return ta < tb;
    return to_string(a.setting) < to_string(b.setting);
}

/// Every unordered pair of distinct transforms, each pair in canonical order
/// and the list sorted canonically. Duplicate keys in `selected` count once.
inline std::vector<std::pair<AugPreset, AugPreset>> build_pairwise_plan(std::vector<AugPreset> selected) {
    std::sort(selected.begin(), selected.end(), canonical_less);
    selected.erase(std::unique(selected.begin(), selected.end(),
                               [](const AugPreset& a, const AugPreset& b) { return a.key() == b.key(); }),
                   selected.end());
    std::vector<std::pair<AugPreset, AugPreset>> plan;
    for (std::size_t i = 0; i < selected.size(); ++i)
        for (std::size_t j = i + 1; j < selected.size(); ++j)
            if (selected[i].transform != selected[j].transform) plan.emplace_back(selected[i], selected[j]);
    return plan;
}

inline nlohmann::ordered_json plan_to_json(const std::vector<std::pair<AugPreset, AugPreset>>& plan) {
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (const auto& [a, b] : plan)
        pairs.push_back({{"stages",
                          {{{"transform", std::string(to_string(a.transform))}, {"setting", std::string(to_string(a.setting))}},
                           {{"transform", std::string(to_string(b.transform))}, {"setting", std::string(to_string(b.setting))}}}}});
    return {{"pairs", pairs}, {"count", plan.size()}};
}

// --- dataset materialization -----------------------------------------------

/// ECHOAUG_THREADS when set to a positive integer, otherwise the hardware count.
inline unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ECHOAUG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = std::min(n, static_cast<unsigned>(v));
    }
    return n;
}

inline std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Reads input_dir/images/*.png with same-named masks in input_dir/masks
/// and optional fan masks in input_dir/fans; writes the same layout to
/// output_dir plus manifest.json. Fan masks are extracted from the image when
/// a stage needs one and none is supplied. Sample indices follow sorted
/// file-name order.
inline nlohmann::ordered_json materialize_dataset(const PipelineSpec& spec, const std::filesystem::path& input_dir,
                                                  const std::filesystem::path& output_dir) {
    namespace fs = std::filesystem;
    validate(spec);
    const auto names = png::list_pngs(input_dir / "images");
    const fs::path fans_in = input_dir / "fans";
    const bool have_fans = fs::is_directory(fans_in);
    const bool want_fans = needs_fan_mask(spec);
    std::error_code ec;
    for (const char* sub : {"images", "masks"}) {
        fs::create_directories(output_dir / sub, ec);
        if (ec) throw IoError("cannot create " + (output_dir / sub).string() + ": " + ec.message());
    }
    const bool write_fans = have_fans || want_fans;
    if (write_fans) fs::create_directories(output_dir / "fans", ec);

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::string first_error;
    bool io_failure = false;
    auto work = [&] {
        for (std::size_t i = next++; i < names.size(); i = next++) {
            try {
                const auto& name = names[i];
                Sample s{png::read_image(input_dir / "images" / name), png::read_mask(input_dir / "masks" / name), std::nullopt};
                if (!s.image.same_shape(s.lv_mask)) throw ValidationError(name + ": mask dimensions differ from image");
                if (have_fans && fs::exists(fans_in / name)) s.fan_mask = png::read_mask(fans_in / name);
                else if (want_fans) s.fan_mask = fan::extract_fan_mask(s.image);
                const Sample out = apply_pipeline(spec, s, i);
                png::write_image(output_dir / "images" / name, out.image);
                png::write_mask(output_dir / "masks" / name, out.lv_mask);
                if (write_fans && out.fan_mask) png::write_mask(output_dir / "fans" / name, *out.fan_mask);
            } catch (const Error& e) {
                std::lock_guard lock(err_mu);
                if (first_error.empty()) {
                    first_error = e.what();
                    io_failure = dynamic_cast<const IoError*>(&e) != nullptr;
                }
                next = names.size();
            }
        }
    };
    const unsigned n_workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, names.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (!first_error.empty()) {
        if (io_failure) throw IoError(first_error);
        throw ValidationError(first_error);
    }

    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        nlohmann::ordered_json keys = nlohmann::ordered_json::array();
        for (std::size_t st = 0; st < spec.stages.size(); ++st) keys.push_back(hex64(derive_stream(spec.seed, i, st).key()));
        files.push_back({{"name", names[i]}, {"sample_index", i}, {"stream_keys", keys}});
    }
    nlohmann::ordered_json manifest{{"pipeline", pipeline_to_json(spec)}, {"seed", spec.seed}, {"files", files}};
    const fs::path mpath = output_dir / "manifest.json";
    std::FILE* f = std::fopen(mpath.string().c_str(), "wb");
    if (!f) throw IoError("cannot write " + mpath.string());
    const std::string text = manifest.dump(2) + "\n";
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    std::fclose(f);
    if (!ok) throw IoError("short write on " + mpath.string());
    return manifest;
}

}  // namespace echoaug
