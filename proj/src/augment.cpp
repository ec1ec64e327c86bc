#include "cactuss/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cactuss/error.hpp"
#include "cactuss/rng.hpp"

namespace cactuss {

void AugmentConfig::validate() const {
    if (!(rotation_deg >= 0.0) || !(translation_frac >= 0.0) || !(noise_sd >= 0.0))
        throw ValidationError("augmentation bounds must be >= 0");
    if (!(scale_range[0] > 0.0) || !(scale_range[1] >= scale_range[0]))
        throw ValidationError("scale_range must be positive and ordered");
}

AugmentParams draw_augment(const AugmentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    AugmentParams p;
    if (!cfg.enabled) return p;
    std::mt19937_64 eng(seed);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(eng); };
    p.angle_deg = uniform(-cfg.rotation_deg, cfg.rotation_deg);
    p.tx_frac = uniform(-cfg.translation_frac, cfg.translation_frac);
    p.ty_frac = uniform(-cfg.translation_frac, cfg.translation_frac);
    p.scale = uniform(cfg.scale_range[0], cfg.scale_range[1]);
    p.noise_sd = cfg.noise_sd;
    p.noise_seed = mix64(seed ^ 0x6e6f697365ULL);
    return p;
}

namespace {

/// Cosine / sine with exact values at multiples of 90 degrees.
std::pair<double, double> exact_cos_sin(double deg) {
    const double q = deg / 90.0;
    if (std::abs(q - std::round(q)) < 1e-12) {
        static constexpr double kCos[4] = {1, 0, -1, 0};
        static constexpr double kSin[4] = {0, 1, 0, -1};
        const int k = ((static_cast<int>(std::llround(q)) % 4) + 4) % 4;
        return {kCos[k], kSin[k]};
    }
    const double a = deg * std::numbers::pi / 180.0;
    return {std::cos(a), std::sin(a)};
}

}  // namespace

std::pair<BModeImage, SegMask> apply_augment(const BModeImage& image, const SegMask& mask,
                                             const AugmentParams& params) {
    const int w = image.width();
    const int h = image.height();
    if (mask.width() != w || mask.height() != h) throw ValidationError("augment: image and mask sizes differ");
    if (!(params.scale > 0.0)) throw ValidationError("augment: scale must be > 0");

    const auto [c, s] = exact_cos_sin(params.angle_deg);
    const double tx = params.tx_frac * w;
    const double ty = params.ty_frac * h;
    const double cx = w / 2.0;
    const double cy = h / 2.0;

    BModeImage out{ImageF(w, h, 0.0), Grid2D<std::uint8_t>(w, h, 0), image.spacing};
    SegMask seg(Grid2D<std::uint8_t>(w, h, 0), mask.spacing);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // Inverse map: output centre -> source continuous coordinates.
            const double px = (x + 0.5 - cx - tx) / params.scale;
            const double py = (y + 0.5 - cy - ty) / params.scale;
            const double sx = c * px + s * py + cx;
            const double sy = -s * px + c * py + cy;

            const int nx = static_cast<int>(std::floor(sx));
            const int ny = static_cast<int>(std::floor(sy));
            if (nx >= 0 && ny >= 0 && nx < w && ny < h) {
                out.mask(x, y) = image.mask(nx, ny);
                seg.pixels(x, y) = mask.pixels(nx, ny);
            }
            if (!out.mask(x, y)) continue;

            const double fx = sx - 0.5;
            const double fy = sy - 0.5;
            const int x0 = static_cast<int>(std::floor(fx));
            const int y0 = static_cast<int>(std::floor(fy));
            const double ax = fx - x0, ay = fy - y0;
            auto at = [&](int xx, int yy) {
                return (xx >= 0 && yy >= 0 && xx < w && yy < h) ? image.pixels(xx, yy) : 0.0;
            };
            double v = at(x0, y0);
            if (ax != 0.0 || ay != 0.0)
                v = (1 - ay) * ((1 - ax) * at(x0, y0) + ax * at(x0 + 1, y0)) +
                    ay * ((1 - ax) * at(x0, y0 + 1) + ax * at(x0 + 1, y0 + 1));
            out.pixels(x, y) = v;
        }
    }

    if (params.noise_sd > 0.0) {
        std::mt19937_64 eng(params.noise_seed);
        std::normal_distribution<double> normal(0.0, params.noise_sd);
        for (std::size_t i = 0; i < out.pixels.size(); ++i) {
            const double n = normal(eng);
            if (out.mask.values()[i]) out.pixels.values()[i] = std::clamp(out.pixels.values()[i] + n, 0.0, 1.0);
        }
    }
    return {std::move(out), std::move(seg)};
}

std::pair<BModeImage, SegMask> augment_pair(const BModeImage& image, const SegMask& mask, const AugmentConfig& cfg,
                                            std::uint64_t seed) {
    if (!cfg.enabled) {
        cfg.validate();
        return {image, mask};
    }
    return apply_augment(image, mask, draw_augment(cfg, seed));
}

}  // namespace cactuss
