#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cactuss/probe_geometry.hpp"
#include "cactuss/volume_io.hpp"

namespace cactuss {

enum class RenderMode { cactuss_ir, realistic_us, edge_ir };

RenderMode parse_render_mode(const std::string& s);
const char* render_mode_name(RenderMode m) noexcept;

/// Simulation parameters. Field names follow the simulator's parameter table.
struct SimConfig {
    int elevational_rays = 10;
    double rf_noise = 0.0;
    double scale_exponent_1 = 1.0;  // exponent on interface reflection terms
    double scale_exponent_2 = 0.2;  // exponent on tissue brightness terms
    double tgc_alpha = 0.65;
    double tgc_scale = 0.2;
    RenderMode mode = RenderMode::cactuss_ir;
    std::uint64_t rng_seed = 0;
    double elevational_spread_deg = 2.0;

    void validate() const;
};

struct RayProfile {
    std::vector<double> samples;
    double depth_step = 0.0;  // mm
};

/// Energy bookkeeping at one tissue interface.
struct InterfaceEvent {
    int sample = 0;
    Label from = 0;
    Label to = 0;
    double reflection = 0.0;   // R
    double incident = 0.0;     // T before the interface
    double reflected = 0.0;    // R * T
    double transmitted = 0.0;  // (1 - R) * T
};

/// Full per-sample record of one march.
struct RayTrace {
    RayProfile profile;
    std::vector<double> transmission;  // T after each step
    std::vector<int> labels;           // -1 where the sample lies outside the slice
    std::vector<InterfaceEvent> interfaces;
};

/// Intensity reflection coefficient ((z2 - z1) / (z2 + z1))^2.
double reflection_coefficient(double z1, double z2);

/// Intensity transmitted after `distance_cm` of tissue: 10^(-alpha f d / 10).
double attenuation_factor(double alpha_db_cm_mhz, double freq_mhz, double distance_cm);

/// Probe-frame -> slice-frame offset: the face centre sits on the top edge of
/// the slice, centred laterally.
Vec3 probe_origin_in_slice(const LabelSlice& slice) noexcept;

/// Translates rays from the probe frame into the slice frame.
Ray to_slice_frame(const Ray& ray, const LabelSlice& slice) noexcept;

/// Marches `ray` (slice frame) through the slice. Sample i is taken at
/// distance (i + 0.5) * depth_step from the origin.
RayTrace trace_ray(const LabelSlice& slice, const TissueTable& table, const Ray& ray, const ProbeConfig& probe,
                   const SimConfig& sim);

RayProfile march_ray(const LabelSlice& slice, const TissueTable& table, const Ray& ray, const ProbeConfig& probe,
                     const SimConfig& sim);

/// Gain g(u) = 1 + scale * (exp(alpha u) - 1) at normalized depth u in [0, 1].
double tgc_gain(double u, const SimConfig& sim) noexcept;
RayProfile apply_tgc(const RayProfile& profile, const SimConfig& sim);

/// Unclamped fan after elevational averaging, speckle, TGC and RF noise.
FanImage render_fan(const LabelSlice& slice, const TissueTable& table, const ProbeConfig& probe,
                    const SimConfig& sim);

/// Fan clamped by min(1, x) and scan converted.
BModeImage render(const LabelSlice& slice, const TissueTable& table, const ProbeConfig& probe, const SimConfig& sim,
                  OutSize out);

/// 1 where the central scanline sample lies on a pixel selected by `mask`
/// (same sampling positions as the renderer), else 0.
FanImage mask_fan(const Grid2D<std::uint8_t>& mask, std::array<double, 2> spacing, const ProbeConfig& probe);

}  // namespace cactuss
