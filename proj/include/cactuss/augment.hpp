#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "cactuss/metrics.hpp"
#include "cactuss/probe_geometry.hpp"

namespace cactuss {

struct AugmentConfig {
    double rotation_deg = 10.0;                  // max |angle|
    double translation_frac = 0.0625;            // max shift as a fraction of width / height
    std::array<double, 2> scale_range{0.9, 1.1};
    double noise_sd = 0.02;                      // additive Gaussian, image only
    bool enabled = false;

    void validate() const;
};

/// One concrete draw of the augmentation parameters.
struct AugmentParams {
    double angle_deg = 0.0;
    double tx_frac = 0.0;
    double ty_frac = 0.0;
    double scale = 1.0;
    double noise_sd = 0.0;
    std::uint64_t noise_seed = 0;
};

AugmentParams draw_augment(const AugmentConfig& cfg, std::uint64_t seed);

/// Applies one similarity transform about the image centre to image (bilinear)
/// and masks (nearest), then adds noise inside the sector and clamps to [0, 1].
std::pair<BModeImage, SegMask> apply_augment(const BModeImage& image, const SegMask& mask,
                                             const AugmentParams& params);

std::pair<BModeImage, SegMask> augment_pair(const BModeImage& image, const SegMask& mask, const AugmentConfig& cfg,
                                            std::uint64_t seed);

}  // namespace cactuss
