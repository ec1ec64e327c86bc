#pragma once

#include <array>
#include <cstdint>

#include "cactuss/metrics.hpp"
#include "cactuss/volume_io.hpp"

namespace cactuss {

/// Fixed label ids emitted by the phantom generator.
namespace labels {
inline constexpr Label kGel = 0;
inline constexpr Label kSkin = 1;
inline constexpr Label kFat = 2;
inline constexpr Label kMuscle = 3;
inline constexpr Label kBone = 4;
inline constexpr Label kLung = 5;
inline constexpr Label kLiver = 6;
inline constexpr Label kBlood = 7;  // aorta lumen
inline constexpr Label kVesselWall = 8;
}  // namespace labels

inline constexpr double kAortaWallMm = 1.5;

/// Procedural abdomen. Positions are in mm in the volume frame (voxel i spans
/// [i*s, (i+1)*s)); y runs anterior to posterior, the aorta runs along z.
struct PhantomSpec {
    std::array<int, 3> dims{256, 256, 32};
    std::array<double, 3> spacing{0.5, 0.5, 0.5};
    struct Layers {
        double skin = 2.0;
        double fat = 12.0;
        double muscle = 10.0;
    } layers;
    struct Aorta {
        std::array<double, 2> center_mm{64.0, 62.0};
        double diameter_mm = 20.0;
    } aorta;
    struct Vertebra {
        std::array<double, 2> center_mm{64.0, 98.0};
        double radius_mm = 16.0;
        bool present = true;
    } vertebra;
    std::uint64_t rng_seed = 0;
    double perturbation = 0.0;  // boundary jitter amplitude, mm

    /// Throws ValidationError on any violated invariant.
    void validate() const;
};

LabelVolume generate_phantom(const PhantomSpec& spec);

/// Binary mask of aorta-lumen pixels of one slice, spacing taken from the
/// slice's row (depth) spacing.
SegMask aorta_mask_slice(const LabelVolume& volume, Axis axis, int index, Label aorta_id = labels::kBlood);

}  // namespace cactuss
