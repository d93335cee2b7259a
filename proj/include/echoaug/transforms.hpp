#pragma once

#include "echoaug/echo.hpp"
#include "echoaug/geometric.hpp"
#include "echoaug/image.hpp"
#include "echoaug/noise.hpp"
#include "echoaug/occlusion.hpp"
#include "echoaug/photometric.hpp"
#include "echoaug/preset.hpp"
#include "echoaug/rng.hpp"

namespace echoaug {

/// Run one transform with already-resolved parameters, no gate.
/// `image_interp` selects image resampling for the geometric transforms.
inline Sample apply_transform(Transform t, const Sample& s, const ParamSet& p, RngStream& rng,
                              imgproc::Interp image_interp = imgproc::Interp::Linear) {
    auto image_only = [&s](GrayImage img) {
        Sample out = s;
        out.image = std::move(img);
        return out;
    };
    switch (t) {
        case Transform::HorizontalFlip: return geometric::horizontal_flip(s);
        case Transform::Affine: return geometric::affine(s, p, rng, image_interp);
        case Transform::ShiftScaleRotate: return geometric::shift_scale_rotate(s, p, rng, image_interp);
        case Transform::Perspective: return geometric::perspective(s, p, rng, image_interp);
        case Transform::ElasticTransform: return geometric::elastic(s, p, rng, image_interp);
        case Transform::GridDistortion: return geometric::grid_distortion(s, p, rng, image_interp);
        case Transform::RandomResizedCrop: return geometric::random_resized_crop(s, p, rng, image_interp);
        case Transform::CenterCrop: return geometric::center_crop(s, p, image_interp);
        case Transform::CropNonEmptyMaskIfExists: return geometric::crop_non_empty_mask(s, p, rng, image_interp);

        case Transform::RandomBrightnessContrast: return image_only(photometric::random_brightness_contrast(s.image, p, rng));
        case Transform::RandomGamma: return image_only(photometric::random_gamma(s.image, p, rng));
        case Transform::CLAHE: return image_only(photometric::clahe(s.image, p, rng));
        case Transform::ColorJitter: return image_only(photometric::color_jitter(s.image, p, rng));
        case Transform::Sharpen: return image_only(photometric::sharpen(s.image, p, rng));
        case Transform::UnsharpMask: return image_only(photometric::unsharp_mask(s.image, p, rng));
        case Transform::IntensityWindowing: return image_only(photometric::intensity_windowing(s.image, p, rng));

        case Transform::GaussNoise: return image_only(noise::gauss_noise(s.image, p, rng));
        case Transform::MultiplicativeNoise: return image_only(noise::multiplicative_noise(s.image, p, rng));
        case Transform::SaltAndPepper: return image_only(noise::salt_and_pepper(s, p, rng));
        case Transform::GaussianBlur: return image_only(noise::gaussian_blur(s.image, p, rng));
        case Transform::MotionBlur: return image_only(noise::motion_blur(s.image, p, rng));
        case Transform::Downscale: return image_only(noise::downscale(s.image, p, rng));
        case Transform::ImageCompression: return image_only(noise::image_compression(s.image, p, rng));
        case Transform::SpeckleReduction: return image_only(noise::speckle_reduction(s, p, rng));

        case Transform::CoarseDropout: return image_only(occlusion::coarse_dropout(s.image, p, rng));
        case Transform::RandomErasing: return image_only(occlusion::random_erasing(s.image, p, rng));

        case Transform::DepthAttenuation: return image_only(echo::depth_attenuation(s, p, rng));
        case Transform::GaussianShadow: return image_only(echo::gaussian_shadow(s, p, rng));
        case Transform::HazeArtifact: return image_only(echo::haze_artifact(s, p, rng));
    }
    return s;
}

/// Gate draw first, then the transform's own draws from the same stream.
/// A closed gate returns the input unchanged.
inline Sample apply_preset(const AugPreset& preset, const Sample& s, RngStream& rng) {
    if (!rng.bernoulli(preset.probability)) return s;
    return apply_transform(preset.transform, s, preset.params, rng);
}

}  // namespace echoaug
