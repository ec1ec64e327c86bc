#pragma once

#include <array>

#include "cactuss/grid.hpp"
#include "cactuss/probe_geometry.hpp"

namespace cactuss {

/// CT-like intensity image on the slice grid.
struct IntensitySlice {
    ImageF values;
    std::array<double, 2> spacing{1.0, 1.0};
};

struct BilateralParams {
    double sigma_spatial = 2.0;  // px
    double sigma_range = 0.1;    // intensity units
};

struct CannyParams {
    double sigma = 1.4;          // px, Gaussian pre-smoothing
    double low_fraction = 0.1;   // of max gradient magnitude
    double high_fraction = 0.2;  // of max gradient magnitude
};

ImageF gaussian_blur(const ImageF& img, double sigma);
ImageF bilateral_filter(const ImageF& img, const BilateralParams& params = {});
/// Binary edge map (0 / 1).
ImageF canny(const ImageF& img, const CannyParams& params = {});

/// Resamples the slice onto the Cartesian output grid of `probe` (bilinear,
/// clamped at the slice border), using the renderer's probe placement.
ImageF resample_to_probe_grid(const IntensitySlice& ct, const ProbeConfig& probe, OutSize out);

/// Edge-based alternative representation: bilateral -> Canny -> convex sector mask.
BModeImage render_edge_ir(const IntensitySlice& ct, const ProbeConfig& probe, OutSize out,
                          const BilateralParams& bilateral = {}, const CannyParams& canny_params = {});

}  // namespace cactuss
