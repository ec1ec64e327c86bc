#include "cactuss/phantom.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cactuss/error.hpp"
#include "cactuss/rng.hpp"

namespace cactuss {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Smooth periodic perturbation: amplitude * sum_k w_k cos(k t + phase_k),
/// with sum |w_k| == 1 so |value| <= amplitude.
class SmoothJitter {
public:
    SmoothJitter(std::uint64_t seed, int first_harmonic, int harmonics, double amplitude)
        : first_(first_harmonic), amplitude_(amplitude) {
        std::mt19937_64 eng(seed);
        double total = 0.0;
        for (int k = 0; k < harmonics; ++k) {
            weights_.push_back(0.25 + uniform01(eng));
            phases_.push_back(kTwoPi * uniform01(eng));
            total += weights_.back();
        }
        for (auto& w : weights_) w /= total;
    }

    [[nodiscard]] double operator()(double t) const {
        if (amplitude_ == 0.0) return 0.0;
        double v = 0.0;
        for (std::size_t k = 0; k < weights_.size(); ++k)
            v += weights_[k] * std::cos((first_ + static_cast<int>(k)) * t + phases_[k]);
        return amplitude_ * v;
    }

private:
    int first_;
    double amplitude_;
    std::vector<double> weights_;
    std::vector<double> phases_;
};

bool inside_ellipse(double x, double y, double cx, double cy, double rx, double ry) {
    const double dx = (x - cx) / rx;
    const double dy = (y - cy) / ry;
    return dx * dx + dy * dy < 1.0;
}

}  // namespace

void PhantomSpec::validate() const {
    for (int d = 0; d < 3; ++d) {
        if (dims[d] < 1) throw ValidationError("phantom dims must be >= 1");
        if (!(spacing[d] > 0.0)) throw ValidationError("phantom spacing must be positive");
    }
    if (layers.skin < 0 || layers.fat < 0 || layers.muscle < 0)
        throw ValidationError("layer thicknesses must be >= 0");
    if (!(perturbation >= 0.0)) throw ValidationError("perturbation must be >= 0");
    const double width = dims[0] * spacing[0];
    const double depth = dims[1] * spacing[1];
    if (!(layers.skin + layers.fat + layers.muscle + 3 * perturbation < depth))
        throw ValidationError("body wall layers do not fit inside the volume depth");
    if (!(aorta.diameter_mm > 0.0)) throw ValidationError("aorta diameter must be > 0");
    const double outer = aorta.diameter_mm / 2.0 + kAortaWallMm + perturbation;
    const auto& c = aorta.center_mm;
    if (c[0] - outer < 0.0 || c[0] + outer > width || c[1] - outer < 0.0 || c[1] + outer > depth)
        throw ValidationError("aorta does not lie fully inside the volume");
    if (vertebra.present && !(vertebra.radius_mm > 0.0)) throw ValidationError("vertebra radius must be > 0");
}

LabelVolume generate_phantom(const PhantomSpec& spec) {
    spec.validate();
    using namespace labels;
    const auto [nx, ny, nz] = spec.dims;
    const auto [sx, sy, sz] = spec.spacing;
    const double width = nx * sx;
    const double depth = ny * sy;
    const double amp = spec.perturbation;

    // Layer boundaries wander laterally; one period spans the volume width.
    const SmoothJitter skin_j(derive_seed(spec.rng_seed, {1}), 1, 3, amp);
    const SmoothJitter fat_j(derive_seed(spec.rng_seed, {2}), 1, 3, amp);
    const SmoothJitter muscle_j(derive_seed(spec.rng_seed, {3}), 1, 3, amp);
    // Radial jitter of round structures; harmonics >= 2 leave the centroid in place.
    const SmoothJitter aorta_j(derive_seed(spec.rng_seed, {4}), 2, 3, amp);
    const SmoothJitter vert_j(derive_seed(spec.rng_seed, {5}), 2, 3, amp);

    const double aorta_r = spec.aorta.diameter_mm / 2.0;
    const auto [ax, ay] = spec.aorta.center_mm;
    const auto [vx, vy] = spec.vertebra.center_mm;
    const double lung_rx = 0.12 * width;
    const double lung_ry = 0.10 * depth;

    // Every axial slice is identical; paint one and replicate along z.
    Grid2D<Label> axial(nx, ny, kGel);
    for (int i = 0; i < nx; ++i) {
        const double x = (i + 0.5) * sx;
        const double t = kTwoPi * x / width;
        const double b_skin = std::max(0.0, spec.layers.skin + skin_j(t));
        const double b_fat = std::max(b_skin, b_skin + spec.layers.fat + fat_j(t));
        const double b_muscle = std::max(b_fat, b_fat + spec.layers.muscle + muscle_j(t));
        for (int j = 0; j < ny; ++j) {
            const double y = (j + 0.5) * sy;
            Label l = kLiver;
            if (y < b_skin)
                l = kSkin;
            else if (y < b_fat)
                l = kFat;
            else if (y < b_muscle)
                l = kMuscle;
            else if (inside_ellipse(x, y, 0.15 * width, 0.85 * depth, lung_rx, lung_ry) ||
                     inside_ellipse(x, y, 0.85 * width, 0.85 * depth, lung_rx, lung_ry))
                l = kLung;

            if (spec.vertebra.present) {
                const double d = std::hypot(x - vx, y - vy);
                if (d < spec.vertebra.radius_mm + vert_j(std::atan2(y - vy, x - vx))) l = kBone;
            }
            const double d = std::hypot(x - ax, y - ay);
            const double r = aorta_r + aorta_j(std::atan2(y - ay, x - ax));
            if (d < r)
                l = kBlood;
            else if (d < r + kAortaWallMm)
                l = kVesselWall;
            axial(i, j) = l;
        }
    }

    LabelVolume vol(spec.dims, spec.spacing, kGel);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) vol.set(i, j, k, axial(i, j));
    (void)sz;
    return vol;
}

SegMask aorta_mask_slice(const LabelVolume& volume, Axis axis, int index, Label aorta_id) {
    const LabelSlice slice = extract_slice(volume, axis, index);
    Grid2D<std::uint8_t> px(slice.width(), slice.height(), 0);
    const auto& src = slice.labels.values();
    auto& dst = px.values();
    for (std::size_t n = 0; n < src.size(); ++n) dst[n] = src[n] == aorta_id ? 1 : 0;
    return SegMask(std::move(px), slice.spacing[1]);
}

}  // namespace cactuss
