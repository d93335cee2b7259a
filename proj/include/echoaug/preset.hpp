#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "echoaug/errors.hpp"

namespace echoaug {

enum class Transform {
    // geometric
    HorizontalFlip,
    Affine,
    ShiftScaleRotate,
    Perspective,
    ElasticTransform,
    GridDistortion,
    RandomResizedCrop,
    CenterCrop,
    CropNonEmptyMaskIfExists,
    // photometric
    RandomBrightnessContrast,
    RandomGamma,
    CLAHE,
    ColorJitter,
    Sharpen,
    UnsharpMask,
    IntensityWindowing,
    // noise and quality
    GaussNoise,
    MultiplicativeNoise,
    SaltAndPepper,
    GaussianBlur,
    MotionBlur,
    Downscale,
    ImageCompression,
    SpeckleReduction,
    // occlusion
    CoarseDropout,
    RandomErasing,
    // ultrasound-specific
    DepthAttenuation,
    GaussianShadow,
    HazeArtifact,
};

inline constexpr std::size_t kTransformCount = 29;

enum class TransformGroup { Geometric, Photometric, NoiseQuality, Occlusion, Echo };

/// Setting codes are opaque labels.
enum class Setting { L, H, C1, C2, C3, CH };

namespace detail {

struct TransformInfo {
    Transform kind;
    std::string_view name;
    TransformGroup group;
    bool needs_fan;
};

inline constexpr std::array<TransformInfo, kTransformCount> kTransforms{{
    {Transform::HorizontalFlip, "HorizontalFlip", TransformGroup::Geometric, false},
    {Transform::Affine, "Affine", TransformGroup::Geometric, false},
    {Transform::ShiftScaleRotate, "ShiftScaleRotate", TransformGroup::Geometric, false},
    {Transform::Perspective, "Perspective", TransformGroup::Geometric, false},
    {Transform::ElasticTransform, "ElasticTransform", TransformGroup::Geometric, false},
    {Transform::GridDistortion, "GridDistortion", TransformGroup::Geometric, false},
    {Transform::RandomResizedCrop, "RandomResizedCrop", TransformGroup::Geometric, false},
    {Transform::CenterCrop, "CenterCrop", TransformGroup::Geometric, false},
    {Transform::CropNonEmptyMaskIfExists, "CropNonEmptyMaskIfExists", TransformGroup::Geometric, false},
    {Transform::RandomBrightnessContrast, "RandomBrightnessContrast", TransformGroup::Photometric, false},
    {Transform::RandomGamma, "RandomGamma", TransformGroup::Photometric, false},
    {Transform::CLAHE, "CLAHE", TransformGroup::Photometric, false},
    {Transform::ColorJitter, "ColorJitter", TransformGroup::Photometric, false},
    {Transform::Sharpen, "Sharpen", TransformGroup::Photometric, false},
    {Transform::UnsharpMask, "UnsharpMask", TransformGroup::Photometric, false},
    {Transform::IntensityWindowing, "IntensityWindowing", TransformGroup::Photometric, false},
    {Transform::GaussNoise, "GaussNoise", TransformGroup::NoiseQuality, false},
    {Transform::MultiplicativeNoise, "MultiplicativeNoise", TransformGroup::NoiseQuality, false},
    {Transform::SaltAndPepper, "SaltAndPepper", TransformGroup::NoiseQuality, false},
    {Transform::GaussianBlur, "GaussianBlur", TransformGroup::NoiseQuality, false},
    {Transform::MotionBlur, "MotionBlur", TransformGroup::NoiseQuality, false},
    {Transform::Downscale, "Downscale", TransformGroup::NoiseQuality, false},
    {Transform::ImageCompression, "ImageCompression", TransformGroup::NoiseQuality, false},
    {Transform::SpeckleReduction, "SpeckleReduction", TransformGroup::NoiseQuality, true},
    {Transform::CoarseDropout, "CoarseDropout", TransformGroup::Occlusion, false},
    {Transform::RandomErasing, "RandomErasing", TransformGroup::Occlusion, false},
    {Transform::DepthAttenuation, "DepthAttenuation", TransformGroup::Echo, true},
    {Transform::GaussianShadow, "GaussianShadow", TransformGroup::Echo, true},
    {Transform::HazeArtifact, "HazeArtifact", TransformGroup::Echo, true},
}};

inline std::string lower_alnum(std::string_view s) {
    std::string out;
    for (char c : s)
        if (std::isalnum(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

}  // namespace detail

inline constexpr std::array<Transform, kTransformCount> all_transforms() {
    std::array<Transform, kTransformCount> out{};
    for (std::size_t i = 0; i < kTransformCount; ++i) out[i] = detail::kTransforms[i].kind;
    return out;
}

constexpr const detail::TransformInfo& info(Transform t) {
    return detail::kTransforms[static_cast<std::size_t>(t)];
}

constexpr std::string_view to_string(Transform t) { return info(t).name; }
constexpr TransformGroup group_of(Transform t) { return info(t).group; }
constexpr bool needs_fan_mask(Transform t) { return info(t).needs_fan; }

/// Accepts canonical names plus the spellings used in result tables
/// (e.g. "RandomHorizontalFlip", "saltandpepper", "salt-and-pepper").
inline std::optional<Transform> parse_transform(std::string_view name) {
    const std::string key = detail::lower_alnum(name);
    for (const auto& t : detail::kTransforms)
        if (detail::lower_alnum(t.name) == key) return t.kind;
    if (key == "randomhorizontalflip" || key == "hflip") return Transform::HorizontalFlip;
    if (key == "saltandpeppernoise" || key == "saltandpepperonmask" || key == "spnoise")
        return Transform::SaltAndPepper;
    if (key == "cropnonemptymask") return Transform::CropNonEmptyMaskIfExists;
    return std::nullopt;
}

constexpr std::string_view to_string(Setting s) {
    switch (s) {
        case Setting::L: return "L";
        case Setting::H: return "H";
        case Setting::C1: return "C1";
        case Setting::C2: return "C2";
        case Setting::C3: return "C3";
        case Setting::CH: return "CH";
    }
    return "?";
}

/// "harsh" is the long form used for CH in result tables; "H1" appears once as
/// a caption typo for H.
inline std::optional<Setting> parse_setting(std::string_view code) {
    const std::string key = detail::lower_alnum(code);
    if (key == "l") return Setting::L;
    if (key == "h" || key == "h1") return Setting::H;
    if (key == "c1") return Setting::C1;
    if (key == "c2") return Setting::C2;
    if (key == "c3") return Setting::C3;
    if (key == "ch" || key == "harsh") return Setting::CH;
    return std::nullopt;
}

struct PresetKey {
    Transform transform;
    Setting setting;
    friend auto operator<=>(const PresetKey&, const PresetKey&) = default;
};

inline std::string to_string(const PresetKey& k) {
    return std::string(to_string(k.transform)) + "(" + std::string(to_string(k.setting)) + ")";
}

/// Closed interval. Scalars are stored as lo == hi.
struct Range {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Range&, const Range&) = default;
    [[nodiscard]] bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

/// Named parameter ranges of one preset, in internal units (intensities on
/// [0,1], lengths as fractions of the 512-pixel working size unless noted).
class ParamSet {
public:
    ParamSet() = default;
    ParamSet(std::initializer_list<std::pair<const std::string, Range>> init) : values_(init) {}

    void set(const std::string& name, Range r) { values_[name] = r; }
    void set(const std::string& name, double v) { values_[name] = Range{v, v}; }

    [[nodiscard]] bool has(const std::string& name) const { return values_.contains(name); }

    [[nodiscard]] Range range(const std::string& name) const {
        auto it = values_.find(name);
        if (it == values_.end()) throw ValidationError("missing parameter '" + name + "'");
        return it->second;
    }
    [[nodiscard]] Range range_or(const std::string& name, Range fallback) const {
        auto it = values_.find(name);
        return it == values_.end() ? fallback : it->second;
    }
    [[nodiscard]] double scalar(const std::string& name) const { return range(name).lo; }
    [[nodiscard]] double scalar_or(const std::string& name, double fallback) const {
        auto it = values_.find(name);
        return it == values_.end() ? fallback : it->second.lo;
    }

    [[nodiscard]] const std::map<std::string, Range>& values() const noexcept { return values_; }

    friend bool operator==(const ParamSet&, const ParamSet&) = default;

private:
    std::map<std::string, Range> values_;
};

struct AugPreset {
    Transform transform = Transform::HorizontalFlip;
    Setting setting = Setting::L;
    ParamSet params;
    double probability = 1.0;
    /// Parameter string as published, kept verbatim for audit.
    std::string source;

    [[nodiscard]] PresetKey key() const noexcept { return {transform, setting}; }
    friend bool operator==(const AugPreset&, const AugPreset&) = default;
};

/// Parameter names each transform understands; overrides outside this list are rejected.
inline std::vector<std::string_view> parameter_names(Transform t) {
    switch (t) {
        case Transform::HorizontalFlip: return {};
        case Transform::Affine: return {"rotate", "translate", "scale"};
        case Transform::ShiftScaleRotate: return {"shift", "scale", "rotate", "fill"};
        case Transform::Perspective: return {"scale"};
        case Transform::ElasticTransform: return {"alpha", "sigma", "alpha_affine"};
        case Transform::GridDistortion:
            return {"num_steps", "distort", "interpolation", "border_mode", "normalized"};
        case Transform::RandomResizedCrop: return {"scale", "ratio", "size"};
        case Transform::CenterCrop: return {"size"};
        case Transform::CropNonEmptyMaskIfExists: return {"size"};
        case Transform::RandomBrightnessContrast: return {"brightness", "contrast"};
        case Transform::RandomGamma: return {"gamma"};
        case Transform::CLAHE: return {"clip_limit", "tile_grid"};
        case Transform::ColorJitter: return {"brightness", "contrast"};
        case Transform::Sharpen: return {"alpha", "lightness"};
        case Transform::UnsharpMask: return {"blur", "sigma", "alpha", "threshold"};
        case Transform::IntensityWindowing: return {"center", "width"};
        case Transform::GaussNoise: return {"var"};
        case Transform::MultiplicativeNoise: return {"multiplier"};
        case Transform::SaltAndPepper: return {"amount", "ratio", "on_mask"};
        case Transform::GaussianBlur: return {"blur", "sigma"};
        case Transform::MotionBlur: return {"blur"};
        case Transform::Downscale: return {"scale", "interp_down", "interp_up"};
        case Transform::ImageCompression: return {"quality"};
        case Transform::SpeckleReduction: return {"sigma_spatial", "sigma_color", "window"};
        case Transform::CoarseDropout: return {"holes", "height", "width", "fill"};
        case Transform::RandomErasing: return {"scale", "ratio", "fill", "random_fill"};
        case Transform::DepthAttenuation: return {"rate", "max_attenuation"};
        case Transform::GaussianShadow: return {"strength", "sigma_x", "sigma_y"};
        case Transform::HazeArtifact: return {"radius", "sigma", "amplitude"};
    }
    return {};
}

inline void validate(const AugPreset& p) {
    if (!(p.probability >= 0.0 && p.probability <= 1.0))
        throw ValidationError(to_string(p.key()) + ": probability outside [0,1]");
    const auto names = parameter_names(p.transform);
    for (const auto& [name, r] : p.params.values()) {
        if (std::find(names.begin(), names.end(), name) == names.end())
            throw ValidationError(to_string(p.key()) + ": unknown parameter '" + name + "'");
        if (!(r.lo <= r.hi))
            throw ValidationError(to_string(p.key()) + ": parameter '" + name + "' has low > high");
    }
    // Every declared parameter must be present so transforms never fall back silently.
    for (auto name : names)
        if (!p.params.has(std::string(name)))
            throw ValidationError(to_string(p.key()) + ": missing parameter '" + std::string(name) + "'");
}

using PresetRegistry = std::map<PresetKey, AugPreset>;

namespace detail {

inline constexpr double k255 = 255.0;

inline Range sym(double v) { return {-v, v}; }

// Interpolation codes follow the OpenCV numbering used in the source strings.
inline constexpr double kInterNearest = 0;
inline constexpr double kInterLinear = 1;
inline constexpr double kInterArea = 3;
inline constexpr double kBorderConstant = 0;
inline constexpr double kBorderReplicate = 1;

inline PresetRegistry build_registry() {
    PresetRegistry reg;
    auto add = [&reg](Transform t, Setting s, double p, ParamSet params, std::string src) {
        AugPreset preset{t, s, std::move(params), p, std::move(src)};
        validate(preset);
        reg.emplace(preset.key(), std::move(preset));
    };
    using T = Transform;
    using S = Setting;

    // --- geometric -------------------------------------------------------
    add(T::HorizontalFlip, S::L, 0.5, {}, "A.HorizontalFlip(p=0.5)");
    add(T::HorizontalFlip, S::H, 0.75, {}, "A.HorizontalFlip(p=0.75)");
    add(T::HorizontalFlip, S::C1, 0.30, {}, "A.HorizontalFlip(p=0.30)");

    add(T::Affine, S::L, 1.0, {{"rotate", {-15, 15}}, {"translate", sym(0.1)}, {"scale", {0.7, 1.3}}},
        "A.Affine(rotate=(-15, 15), translate_percent=(0.1, 0.1), scale=(0.7, 1.3), p=1.0)");
    add(T::Affine, S::H, 0.7, {{"rotate", {-30, 30}}, {"translate", sym(0.2)}, {"scale", {0.6, 1.5}}},
        "A.Affine(rotate=(-30, 30), translate_percent=(0.2, 0.2), scale=(0.6, 1.5), p=0.7)");
    add(T::Affine, S::C1, 0.85,
        {{"rotate", {-25, 25}}, {"translate", sym(0.15)}, {"scale", {0.75, 1.35}}},
        "A.Affine(rotate=(-25, 25), translate_percent=(0.15, 0.15), scale=(0.75, 1.35), p=0.85)");

    auto ssr = [](double shift, double scale, double rotate) {
        return ParamSet{{"shift", sym(shift)},
                        {"scale", {1.0 - scale, 1.0 + scale}},
                        {"rotate", sym(rotate)},
                        {"fill", {0, 0}}};
    };
    add(T::ShiftScaleRotate, S::L, 0.9, ssr(0.05, 0.10, 10),
        "A.ShiftScaleRotate(shift_limit=0.05, scale_limit=0.10, rotate_limit=10, border_mode=0,value=0, mask_value=0, p=0.9)");
    add(T::ShiftScaleRotate, S::H, 0.7, ssr(0.15, 0.25, 30),
        "A.ShiftScaleRotate(shift_limit=0.15, scale_limit=0.25, rotate_limit=30, border_mode=0,value=0, mask_value=0, p=0.7)");
    add(T::ShiftScaleRotate, S::C1, 0.6, ssr(0.25, 0.35, 35),
        "A.ShiftScaleRotate(shift_limit=0.25, scale_limit=0.35, rotate_limit=35, border_mode=0,value=0, mask_value=0, p=0.6)");

    add(T::Perspective, S::L, 1.0, {{"scale", {0.05, 0.1}}}, "A.Perspective(scale=(0.05, 0.1), p=1.0)");
    add(T::Perspective, S::H, 0.7, {{"scale", {0.08, 0.20}}}, "A.Perspective(scale=(0.08, 0.20), p=0.7)");
    add(T::Perspective, S::C1, 0.6, {{"scale", {0.07, 0.15}}}, "A.Perspective(scale=(0.07, 0.15), p=0.6)");

    auto elastic = [](double a, double s, double aa) {
        return ParamSet{{"alpha", {a, a}}, {"sigma", {s, s}}, {"alpha_affine", {aa, aa}}};
    };
    add(T::ElasticTransform, S::L, 0.15, elastic(5.0, 10.0, 2.0),
        "A.ElasticTransform(alpha=5.0, sigma=10.0, alpha_affine=2.0, p=0.15)");
    add(T::ElasticTransform, S::H, 0.25, elastic(30.0, 20.0, 10.0),
        "A.ElasticTransform( alpha=30.0, sigma=20.0, alpha_affine=10.0, p=0.25 )p=0.15)");
    add(T::ElasticTransform, S::C1, 0.15, elastic(7.5, 13.0, 2.0),
        "A.ElasticTransform( alpha=7.5, sigma=13.0, alpha_affine=2.0, p=0.15 )");

    auto grid = [](double steps, Range distort, double interp, double border, double normalized) {
        return ParamSet{{"num_steps", {steps, steps}},
                        {"distort", distort},
                        {"interpolation", {interp, interp}},
                        {"border_mode", {border, border}},
                        {"normalized", {normalized, normalized}}};
    };
    add(T::GridDistortion, S::L, 0.4, grid(5, sym(0.2), kInterLinear, kBorderConstant, 0),
        "A.GridDistortion(num_steps=5, distort_limit=0.2, p=0.4)");
    add(T::GridDistortion, S::H, 0.6, grid(8, sym(0.35), kInterLinear, kBorderConstant, 0),
        "A.GridDistortion(num_steps=8, distort_limit=0.35, p=0.6)");
    add(T::GridDistortion, S::C1, 0.35, grid(7, sym(0.25), kInterLinear, kBorderConstant, 0),
        "A.GridDistortion(num_steps=7, distort_limit=0.25,p=0.35)");
    add(T::GridDistortion, S::C2, 0.55, grid(9, sym(0.38), kInterLinear, kBorderConstant, 0),
        "GridDistortion(num_steps=9, distort_limit=0.38, p=0.55)");
    // No probability in the source string; the library default of 0.5 applies.
    add(T::GridDistortion, S::C3, 0.5, grid(3, {-0.4, 0.4}, kInterArea, kBorderReplicate, 1),
        "GridDistortion(num_steps=3, distort_limit=[-0.4, 0.4], interpolation=cv2.INTER_AREA, "
        "normalized=True, mask_interpolation=cv2.INTER_AREA, keypoint_remapping_method=\"mask\", "
        "border_mode=cv2.BORDER_REPLICATE, fill=0,  fill_mask=0)");

    auto rrc = [](Range scale, Range ratio) {
        return ParamSet{{"scale", scale}, {"ratio", ratio}, {"size", {512, 512}}};
    };
    add(T::RandomResizedCrop, S::L, 1.0, rrc({0.9, 1.0}, {0.95, 1.05}),
        "A.RandomResizedCrop(size=(512, 512), scale=(0.9, 1.0), ratio=(0.95, 1.05), p=1.0)");
    add(T::RandomResizedCrop, S::H, 0.7, rrc({0.6, 1.0}, {0.8, 1.2}),
        "A.RandomResizedCrop(size=(512, 512), scale=(0.6, 1.0), ratio=(0.8, 1.2), p=0.7)");
    add(T::RandomResizedCrop, S::C1, 0.9, rrc({0.5, 0.9}, {0.7, 1.3}),
        "A.RandomResizedCrop(size=(512, 512),scale=(0.50, 0.9),ratio=(0.7, 1.3),p=0.9)");

    add(T::CenterCrop, S::L, 1.0, {{"size", {448, 448}}}, "A.CenterCrop(448, 448, p=1.0)");
    add(T::CenterCrop, S::H, 1.0, {{"size", {384, 384}}}, "A.CenterCrop(384, 384, p=1.0)");
    add(T::CenterCrop, S::C1, 1.0, {{"size", {480, 480}}}, "A.CenterCrop(480, 480, p=1.0)");

    add(T::CropNonEmptyMaskIfExists, S::L, 1.0, {{"size", {448, 448}}},
        "A.CropNonEmptyMaskIfExists(height=448, width=448,p=1.0)");
    add(T::CropNonEmptyMaskIfExists, S::H, 1.0, {{"size", {384, 384}}},
        "A.CropNonEmptyMaskIfExists(height=384, width=384, p=1.0)");
    add(T::CropNonEmptyMaskIfExists, S::C1, 0.7, {{"size", {480, 480}}},
        "A.CropNonEmptyMaskIfExists(height=480, width=480,p=0.7)");

    // --- photometric -----------------------------------------------------
    add(T::RandomBrightnessContrast, S::L, 0.6, {{"brightness", sym(0.10)}, {"contrast", sym(0.10)}},
        "A.RandomBrightnessContrast(brightness_limit=0.10, contrast_limit=0.10, p=0.6)");
    add(T::RandomBrightnessContrast, S::H, 0.7, {{"brightness", sym(0.4)}, {"contrast", sym(0.4)}},
        "A.RandomBrightnessContrast(brightness_limit=0.4, contrast_limit=0.4, p=0.7)");
    add(T::RandomBrightnessContrast, S::C1, 0.45,
        {{"brightness", {-0.25, 0.35}}, {"contrast", {-0.08, 0.12}}},
        "A.RandomBrightnessContrast(brightness_limit=(-0.25, 0.35), contrast_limit=(-0.08, 0.12),brightness_by_max=True, p=0.45)");

    add(T::RandomGamma, S::L, 0.4, {{"gamma", {80, 120}}}, "A.RandomGamma(gamma_limit=(80, 120), p=0.4)");
    add(T::RandomGamma, S::H, 0.5, {{"gamma", {40, 160}}}, "A.RandomGamma(gamma_limit=(40, 160), p=0.5)");
    add(T::RandomGamma, S::C1, 0.30, {{"gamma", {90, 110}}}, "A.RandomGamma(gamma_limit=(90, 110), p=0.30)");

    add(T::CLAHE, S::L, 0.2, {{"clip_limit", {2.0, 2.0}}, {"tile_grid", {8, 8}}},
        "A.CLAHE(clip_limit=2.0, tile_grid_size=(8, 8), p=0.2)");
    add(T::CLAHE, S::H, 0.4, {{"clip_limit", {4.0, 4.0}}, {"tile_grid", {4, 4}}},
        "A.CLAHE(clip_limit=4.0, tile_grid_size=(4, 4), p=0.4)");
    add(T::CLAHE, S::C1, 0.25, {{"clip_limit", {1.8, 1.8}}, {"tile_grid", {8, 8}}},
        "A.CLAHE(clip_limit=1.8, tile_grid_size=(8, 8), p=0.25)");

    // Factor ranges [max(0,1-b), 1+b].
    auto jitter = [](double b) {
        const Range r{std::max(0.0, 1.0 - b), 1.0 + b};
        return ParamSet{{"brightness", r}, {"contrast", r}};
    };
    add(T::ColorJitter, S::L, 0.8, jitter(0.8),
        "ColorJitter(brightness=0.8, contrast=0.8, saturation=0.0, hue=0.0, p=0.8)");
    add(T::ColorJitter, S::H, 0.8, jitter(1.0),
        "A.ColorJitter(brightness=1.0, contrast=1.0, saturation=0.0, hue=0.0, p=0.8))");
    add(T::ColorJitter, S::C1, 0.35, jitter(1.5),
        "A.ColorJitter(brightness=1.5, contrast=1.5, saturation=0.0, hue=0.0, p=0.35)");
    add(T::ColorJitter, S::C2, 0.5, jitter(0.2),
        "A.ColorJitter(brightness=0.2, contrast=0.2, saturation=0.0, hue=0.0, p=0.5)");

    add(T::Sharpen, S::L, 0.15, {{"alpha", {0.05, 0.10}}, {"lightness", {1.0, 1.0}}},
        "A.Sharpen(alpha=(0.05, 0.10), lightness=(1.0, 1.0), p=0.15)");
    add(T::Sharpen, S::H, 0.4, {{"alpha", {0.15, 0.35}}, {"lightness", {0.8, 1.2}}},
        "A.Sharpen(alpha=(0.15, 0.35), lightness=(0.8, 1.2), p=0.4)");
    add(T::Sharpen, S::C1, 0.25, {{"alpha", {0.06, 0.12}}, {"lightness", {1.0, 1.0}}},
        "A.Sharpen(alpha=(0.06, 0.12), lightness=(1.0, 1.0), p=0.25)");

    // sigma 0 derives the Gaussian sigma from the kernel size; threshold default 10 (8-bit).
    auto unsharp = [](Range blur, Range sigma, Range alpha, double threshold8) {
        return ParamSet{{"blur", blur},
                        {"sigma", sigma},
                        {"alpha", alpha},
                        {"threshold", {threshold8 / k255, threshold8 / k255}}};
    };
    add(T::UnsharpMask, S::L, 0.20, unsharp({3, 5}, {0, 0}, {0.10, 0.25}, 10),
        "A.UnsharpMask(blur_limit=(3, 5), alpha=(0.10, 0.25),p=0.20)");
    add(T::UnsharpMask, S::H, 0.60, unsharp({5, 13}, {0, 0}, {0.30, 0.70}, 10),
        "A.UnsharpMask(blur_limit=(5, 13), alpha=(0.30, 0.70), p=0.60)");
    add(T::UnsharpMask, S::C1, 0.30, unsharp({3, 7}, {0, 0}, {0.15, 0.40}, 10),
        "A.UnsharpMask(blur_limit=(3,7), alpha=(0.15,0.40), p=0.30)");
    add(T::UnsharpMask, S::C2, 0.30, unsharp({3, 7}, {0, 0}, {0.15, 0.40}, 10),
        "A.UnsharpMask(blur_limit=(3,7), alpha=( 0.15,0.40), p=0.30)");
    add(T::UnsharpMask, S::CH, 0.30, unsharp({10, 20}, {0, 10}, {1, 1}, 1),
        "A.UnsharpMask(blur_limit=(10,20), sigma_limit=10, alpha=(1,1), threshold=1, p=0.30)");

    add(T::IntensityWindowing, S::L, 0.5, {{"center", {0.35, 0.65}}, {"width", {0.25, 0.55}}},
        "IntensityWindowing( window_center=(0.35, 0.65),  window_width=(0.25,0.55),  p=0.5 )");
    add(T::IntensityWindowing, S::H, 0.5, {{"center", {-0.20, 1.20}}, {"width", {0.08, 1.40}}},
        "IntensityWindowing(window_center=(-0.20, 1.20),window_width=(0.08, 1.40),p=0.5)");
    add(T::IntensityWindowing, S::C1, 0.15, {{"center", {0.48, 0.55}}, {"width", {0.38, 0.48}}},
        "IntensityWindowing(window_center=(0.48,0.55), window_width=(0.38, 0.48),p=0.15)");

    // --- noise and quality -----------------------------------------------
    auto var = [](double lo, double hi) {
        return ParamSet{{"var", {lo / (k255 * k255), hi / (k255 * k255)}}};
    };
    add(T::GaussNoise, S::L, 0.4, var(5.0, 20.0), "A.GaussNoise(var_limit=(5.0, 20.0), p=0.4)");
    add(T::GaussNoise, S::H, 0.5, var(15.0, 50.0), "A.GaussNoise(var_limit=(15.0, 50.0), p=0.5)");
    add(T::GaussNoise, S::C1, 0.35, var(3.0, 15.0),
        "A.GaussNoise(var_limit=(3.0, 15.0), p=0.35, per_channel=False))");
    add(T::GaussNoise, S::C2, 0.3, var(0.001, 0.001), "A.GaussNoise(var_limit=(0.001, 0.001),  p=0.3)");

    add(T::MultiplicativeNoise, S::L, 0.5, {{"multiplier", {0.9, 1.1}}},
        "A.MultiplicativeNoise(multiplier=(0.9, 1.1), per_channel=False, p=0.5)");
    add(T::MultiplicativeNoise, S::H, 0.6, {{"multiplier", {0.8, 1.2}}},
        "A.MultiplicativeNoise(multiplier=(0.8, 1.2), per_channel=False, p=0.6)");
    add(T::MultiplicativeNoise, S::C1, 0.7, {{"multiplier", {0.70, 1.3}}},
        "A.MultiplicativeNoise(multiplier=(0.70, 1.3)), per_channel=False, p=0.7)");

    auto sp = [](Range amount, Range ratio, double on_mask) {
        return ParamSet{{"amount", amount}, {"ratio", ratio}, {"on_mask", {on_mask, on_mask}}};
    };
    add(T::SaltAndPepper, S::L, 0.25, sp({0.003, 0.003}, {0.5, 0.5}, 0),
        "_sp_noise_uint8(img, amount=0.003,ratio=0.5, p=0.25)");
    add(T::SaltAndPepper, S::H, 0.5, sp({0.008, 0.030}, {0.35, 0.65}, 0),
        "_sp_noise_uint8(img, amount=float(np.random.uniform(0.008, 0.030)), ratio=float(np.random.uniform(0.35, 0.65)), p=0.5)");
    add(T::SaltAndPepper, S::C1, 0.20, sp({0.004, 0.012}, {0.45, 0.55}, 0),
        "_sp_noise_uint8(img, amount=float(np.random.uniform(0.004, 0.012)), ratio=float(np.random.uniform(0.45, 0.55)) , p=0.20)");
    add(T::SaltAndPepper, S::C2, 0.20, sp({0.001, 0.004}, {0.48, 0.52}, 0),
        "_sp_noise_uint8(img, amount=float(np.random.uniform(0.001, 0.004)), ratio=float(np.random.uniform(0.48, 0.52)) , p=0.20)");
    add(T::SaltAndPepper, S::C3, 1.0, sp({0.03, 0.06}, {0.48, 0.52}, 1),
        "SaltAndPepperOnMask(amount=(0.03, 0.06), ratio=(0.48, 0.52), p=1.0) {mask-based}");

    add(T::GaussianBlur, S::L, 0.15, {{"blur", {3, 3}}, {"sigma", {0, 0}}},
        "A.GaussianBlur(blur_limit=(3, 3), p=0.15)");
    add(T::GaussianBlur, S::H, 0.35, {{"blur", {5, 9}}, {"sigma", {0, 0}}},
        "A.GaussianBlur(blur_limit=(5, 9), p=0.35)");
    add(T::GaussianBlur, S::C1, 0.15, {{"blur", {3, 5}}, {"sigma", {0.1, 0.6}}},
        "A.GaussianBlur(blur_limit=(3, 5),sigma_limit=(0.1, 0.6), p=0.15)");

    // A scalar blur_limit k means kernel sizes in [3, k].
    add(T::MotionBlur, S::L, 0.2, {{"blur", {3, 3}}}, "A.MotionBlur(blur_limit=3, p=0.2)");
    add(T::MotionBlur, S::H, 0.4, {{"blur", {5, 10}}}, "A.MotionBlur(blur_limit=(5, 10), p=0.4))");
    add(T::MotionBlur, S::C1, 0.30, {{"blur", {3, 4}}}, "A.MotionBlur(blur_limit=4, p=0.30)");

    auto down = [](Range scale, double interp_down, double interp_up) {
        return ParamSet{{"scale", scale},
                        {"interp_down", {interp_down, interp_down}},
                        {"interp_up", {interp_up, interp_up}}};
    };
    add(T::Downscale, S::L, 0.25, down({0.65, 0.85}, kInterLinear, kInterLinear),
        "A.Downscale(scale_min=0.65, scale_max=0.85, interpolation=1, p=0.25)");
    add(T::Downscale, S::H, 0.35, down({0.4, 0.8}, kInterLinear, kInterLinear),
        "A.Downscale(scale_min=0.4, scale_max=0.8, interpolation=1, p=0.35)");
    add(T::Downscale, S::C1, 0.45, down({0.5, 0.80}, kInterLinear, kInterLinear),
        "A.Downscale(scale_min=0.5, scale_max=0.80, interpolation=1, p=0.45)");
    // No probability in the source string; the library default of 0.5 applies.
    add(T::Downscale, S::C2, 0.5, down({0.35, 0.6}, kInterNearest, kInterNearest),
        "A.Downscale(scale_range=[0.35, 0.6], interpolation_pair={\"upscale\":0,\"downscale\":0})");

    add(T::ImageCompression, S::L, 0.30, {{"quality", {40, 70}}},
        "A.ImageCompression(quality_lower=40, quality_upper=70,p=0.30)");
    add(T::ImageCompression, S::H, 0.40, {{"quality", {10, 50}}},
        "A.ImageCompression(quality_lower=10, quality_upper=50, p=0.40)");
    add(T::ImageCompression, S::C1, 0.35, {{"quality", {30, 80}}},
        "A.ImageCompression(quality_lower=30, quality_upper=80, p=0.35)");

    const ParamSet speckle{{"sigma_spatial", {0.2, 0.2}}, {"sigma_color", {0.2, 0.2}}, {"window", {5, 5}}};
    add(T::SpeckleReduction, S::L, 0.3, speckle,
        "SpeckleReduction(sigma_spatial=0.2, sigma_color=0.2, window_size=5, p=0.3)");
    add(T::SpeckleReduction, S::C1, 0.3, speckle,
        "SpeckleReduction(sigma_spatial=0.2, sigma_color=0.2, window_size=5, p=0.3)");

    // --- occlusion -------------------------------------------------------
    auto dropout = [](Range holes, Range side, double fill) {
        return ParamSet{{"holes", holes}, {"height", side}, {"width", side}, {"fill", {fill, fill}}};
    };
    add(T::CoarseDropout, S::L, 0.15, dropout({1, 2}, {0.03, 0.08}, 0),
        "A.CoarseDropout( max_holes=2, max_height=int(0.08*H),max_width=int(0.08*W), min_holes=1, "
        "min_height=int(0.03*H),min_width=int(0.03*W), fill_value=0, p=0.15 )");
    add(T::CoarseDropout, S::H, 0.25, dropout({2, 4}, {0.05, 0.15}, 0),
        "A.CoarseDropout(max_holes=4, max_height=int(0.15 * H), max_width=int(0.15 * W), min_holes=2, "
        "min_height=int(0.05 * H), min_width=int(0.05 * W), fill_value=0, p=0.25)");
    add(T::CoarseDropout, S::C1, 0.05, dropout({1, 1}, {0.02, 0.04}, 0.2),
        "A.CoarseDropout(max_holes=1, min_holes=1, min_height=int(0.02 * H), min_width=int(0.02 * W), "
        "max_height=int(0.04 * H), max_width=int(0.04 * W), fill_value=0.2, p=0.05)");
    // The published caption for this slot repeats the CLAHE(C1) string; the
    // parameter envelope of L is used.
    add(T::CoarseDropout, S::C2, 0.15, dropout({1, 2}, {0.03, 0.08}, 0),
        "[caption shows A.CLAHE(clip_limit=1.8, tile_grid_size=(8, 8), p=0.25); parameters of L used]");

    // Inner and outer probabilities in the source string multiply.
    auto erasing = [](Range scale, Range ratio, bool random_fill) {
        return ParamSet{{"scale", scale},
                        {"ratio", ratio},
                        {"fill", {0, 0}},
                        {"random_fill", {random_fill ? 1.0 : 0.0, random_fill ? 1.0 : 0.0}}};
    };
    add(T::RandomErasing, S::L, 1.0 * 0.25, erasing({0.02, 0.06}, {0.6, 1.6}, false),
        "T.RandomErasing( p=1.0, scale=(0.02, 0.06), ratio=(0.6, 1.6), value=0.0, inplace=False, p=0.25)");
    add(T::RandomErasing, S::H, 1.0 * 0.45, erasing({0.02, 0.06}, {0.6, 1.6}, false),
        "T.RandomErasing( p=1.0, scale=(0.02, 0.06), ratio=(0.6, 1.6), value=0.0, inplace=False, p=0.45)");
    add(T::RandomErasing, S::C1, 0.30 * 0.45, erasing({0.01, 0.07}, {0.15, 4.5}, true),
        "T.RandomErasing( p=0.30, scale=(0.01, 0.07), ratio=(0.15, 4.5), value=\"random\",inplace=False, p=0.45)");
    add(T::RandomErasing, S::C2, 0.35 * 0.25, erasing({0.01, 0.08}, {0.2, 3.0}, true),
        "T.RandomErasing( p=0.35, scale=(0.01, 0.08), ratio=(0.2, 3.0), value=\"random\",inplace=False, p=0.25)");

    // --- ultrasound-specific ---------------------------------------------
    add(T::DepthAttenuation, S::L, 0.3, {{"rate", {1.0, 1.0}}, {"max_attenuation", {0.6, 0.6}}},
        "DepthAttenuation(attenuation_rate=1.0,max_attenuation=0.6, p=0.3)");
    add(T::DepthAttenuation, S::C1, 0.2, {{"rate", {0.25, 0.9}}, {"max_attenuation", {0.08, 0.08}}},
        "DepthAttenuation(attenuation_rate=(0.25, 0.9),max_attenuation=0.08, p=0.2)");
    // max_attenuation is clipped to 1 when applied.
    add(T::DepthAttenuation, S::C2, 0.3, {{"rate", {1.0, 1.0}}, {"max_attenuation", {2.0, 2.0}}},
        "DepthAttenuation(attenuation_rate=1,max_attenuation=2, p=0.3)");

    add(T::GaussianShadow, S::L, 0.3,
        {{"strength", {0.2, 0.2}}, {"sigma_x", {0.3, 0.3}}, {"sigma_y", {0.3, 0.3}}},
        "GaussianShadow(strength=0.2, sigma_x=0.3,sigma_y=0.3, p=0.3)");
    add(T::GaussianShadow, S::C1, 0.1,
        {{"strength", {0.12, 0.28}}, {"sigma_x", {0.05, 0.12}}, {"sigma_y", {0.05, 0.12}}},
        "GaussianShadow(strength=(0.12, 0.28), sigma_x=(0.05, 0.12), sigma_y=(0.05, 0.12), p=0.1)");

    add(T::HazeArtifact, S::L, 0.2, {{"radius", {0.2, 0.2}}, {"sigma", {0.2, 0.2}}, {"amplitude", {0.3, 0.3}}},
        "HazeArtifact(radius=0.2, sigma=0.2,p=0.2)");
    add(T::HazeArtifact, S::C1, 0.15,
        {{"radius", {0.15, 0.45}}, {"sigma", {0.03, 0.06}}, {"amplitude", {0.3, 0.3}}},
        "HazeArtifact(radius=(0.15, 0.45), sigma=(0.03, 0.06), p=0.15)");

    return reg;
}

}  // namespace detail

/// The compiled-in preset table. Built once; immutable afterwards.
inline const PresetRegistry& load_preset_registry() {
    static const PresetRegistry registry = detail::build_registry();
    return registry;
}

inline std::optional<AugPreset> find_preset(Transform t, Setting s) {
    const auto& reg = load_preset_registry();
    auto it = reg.find({t, s});
    if (it == reg.end()) return std::nullopt;
    return it->second;
}

inline AugPreset preset(Transform t, Setting s) {
    auto p = find_preset(t, s);
    if (!p) throw ValidationError("no preset " + to_string(PresetKey{t, s}) + " in registry");
    return *p;
}

/// String-keyed lookup tolerant of table spellings; nullopt on unknown names or keys.
inline std::optional<AugPreset> find_preset(std::string_view transform, std::string_view setting) {
    auto t = parse_transform(transform);
    auto s = parse_setting(setting);
    if (!t || !s) return std::nullopt;
    return find_preset(*t, *s);
}

// --- JSON -----------------------------------------------------------------

inline nlohmann::ordered_json to_json(const AugPreset& p) {
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [name, r] : p.params.values()) params[name] = {r.lo, r.hi};
    return {{"transform", std::string(to_string(p.transform))},
            {"setting", std::string(to_string(p.setting))},
            {"probability", p.probability},
            {"params", params},
            {"source", p.source}};
}

inline Range range_from_json(const nlohmann::json& j, const std::string& name) {
    if (j.is_number()) return {j.get<double>(), j.get<double>()};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ValidationError("parameter '" + name + "' must be a number or a [low, high] pair");
}

inline AugPreset preset_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("preset entry must be an object");
    AugPreset p;
    auto t = parse_transform(j.at("transform").get<std::string>());
    auto s = parse_setting(j.at("setting").get<std::string>());
    if (!t) throw ValidationError("unknown transform '" + j.at("transform").get<std::string>() + "'");
    if (!s) throw ValidationError("unknown setting '" + j.at("setting").get<std::string>() + "'");
    p.transform = *t;
    p.setting = *s;
    p.probability = j.at("probability").get<double>();
    for (const auto& [name, value] : j.at("params").items()) p.params.set(name, range_from_json(value, name));
    p.source = j.value("source", std::string{});
    validate(p);
    return p;
}

/// Registry as a JSON array, one object per (transform, setting), in key order.
inline nlohmann::ordered_json registry_to_json(const PresetRegistry& reg) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [key, p] : reg) arr.push_back(to_json(p));
    return arr;
}

inline PresetRegistry registry_from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) throw ValidationError("registry document must be a JSON array");
    PresetRegistry reg;
    for (const auto& item : arr) {
        auto p = preset_from_json(item);
        if (!reg.emplace(p.key(), p).second)
            throw ValidationError("duplicate preset " + to_string(p.key()));
    }
    return reg;
}

}  // namespace echoaug
