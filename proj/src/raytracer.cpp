#include "cactuss/raytracer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "cactuss/error.hpp"
#include "cactuss/rng.hpp"

namespace cactuss {

RenderMode parse_render_mode(const std::string& s) {
    if (s == "cactuss_ir") return RenderMode::cactuss_ir;
    if (s == "realistic_us") return RenderMode::realistic_us;
    if (s == "edge_ir") return RenderMode::edge_ir;
    throw ValidationError("unknown render mode '" + s + "'");
}

const char* render_mode_name(RenderMode m) noexcept {
    switch (m) {
        case RenderMode::cactuss_ir: return "cactuss_ir";
        case RenderMode::realistic_us: return "realistic_us";
        case RenderMode::edge_ir: return "edge_ir";
    }
    return "?";
}

void SimConfig::validate() const {
    if (elevational_rays < 1) throw ValidationError("elevational_rays must be >= 1");
    if (!(rf_noise >= 0.0 && rf_noise <= 1.0)) throw ValidationError("rf_noise must be in [0, 1]");
    if (!(scale_exponent_1 > 0.0) || !(scale_exponent_2 > 0.0))
        throw ValidationError("scale exponents must be > 0");
    if (!(tgc_alpha >= 0.0) || !(tgc_scale >= 0.0)) throw ValidationError("TGC parameters must be >= 0");
    if (!(elevational_spread_deg >= 0.0)) throw ValidationError("elevational_spread_deg must be >= 0");
}

double reflection_coefficient(double z1, double z2) {
    if (!(z1 > 0.0) || !(z2 > 0.0)) throw ValidationError("acoustic impedance must be > 0");
    const double r = (z2 - z1) / (z2 + z1);
    return r * r;
}

double attenuation_factor(double alpha_db_cm_mhz, double freq_mhz, double distance_cm) {
    if (!(distance_cm >= 0.0)) throw ValidationError("attenuation distance must be >= 0");
    if (!(alpha_db_cm_mhz >= 0.0)) throw ValidationError("attenuation coefficient must be >= 0");
    if (!(freq_mhz > 0.0)) throw ValidationError("frequency must be > 0");
    return std::pow(10.0, -alpha_db_cm_mhz * freq_mhz * distance_cm / 10.0);
}

Vec3 probe_origin_in_slice(const LabelSlice& slice) noexcept {
    return {slice.width() * slice.spacing[0] / 2.0, 0.0, 0.0};
}

Ray to_slice_frame(const Ray& ray, const LabelSlice& slice) noexcept {
    Ray r = ray;
    r.origin = ray.origin + probe_origin_in_slice(slice);
    return r;
}

double tgc_gain(double u, const SimConfig& sim) noexcept {
    return 1.0 + sim.tgc_scale * (std::exp(sim.tgc_alpha * u) - 1.0);
}

RayProfile apply_tgc(const RayProfile& profile, const SimConfig& sim) {
    RayProfile out = profile;
    const std::size_t n = out.samples.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double u = n > 1 ? double(i) / double(n - 1) : 0.0;
        out.samples[i] *= tgc_gain(u, sim);
    }
    return out;
}

namespace {

/// Per-label constants for one (table, probe, sim) combination.
struct MarchContext {
    std::array<bool, 256> known{};
    std::array<double, 256> z{};
    std::array<double, 256> att_step{};    // attenuation over one step
    std::array<double, 256> brightness{};  // L^e2
    double step = 0.0;
    int samples = 0;
    double exponent_1 = 1.0;

    MarchContext(const TissueTable& table, const ProbeConfig& probe, const SimConfig& sim) {
        probe.validate();
        sim.validate();
        step = probe.depth_step();
        samples = probe.axial_resolution;
        exponent_1 = sim.scale_exponent_1;
        for (const auto& [label, p] : table.entries()) {
            known[label] = true;
            z[label] = p.z;
            att_step[label] = attenuation_factor(p.alpha, probe.center_frequency_mhz, step / 10.0);
            brightness[label] = std::pow(p.echogenicity, sim.scale_exponent_2);
        }
    }
};

/// Projects a possibly out-of-plane direction onto the slice plane by turning
/// its elevational component into a lateral one (thin-slab footprint).
std::array<double, 2> in_plane_direction(const Vec3& d) {
    const double planar = std::hypot(d.x, d.y);
    if (planar < 1e-12) return {0.0, 1.0};
    const double nx = d.y / planar;
    const double ny = -d.x / planar;
    const double x = d.x + d.z * nx;
    const double y = d.y + d.z * ny;
    const double len = std::hypot(x, y);
    return {x / len, y / len};
}

/// Core march. `transmission`, `labels` and `events` may be null.
void march(const MarchContext& ctx, const LabelSlice& slice, const TissueTable& table, const Ray& ray,
           double* samples, double* transmission, int* labels, std::vector<InterfaceEvent>* events) {
    const auto dir = in_plane_direction(ray.direction);
    const double inv_sx = 1.0 / slice.spacing[0];
    const double inv_sy = 1.0 / slice.spacing[1];
    const int w = slice.width();
    const int h = slice.height();
    const auto& grid = slice.labels.values();
    const int n = std::min(ctx.samples, static_cast<int>(std::ceil(ray.max_length / ctx.step - 1e-9)));

    double T = 1.0;
    bool entered = false;
    Label prev = 0;
    int i = 0;
    for (; i < n; ++i) {
        const double t = (i + 0.5) * ctx.step;
        const double px = (ray.origin.x + t * dir[0]) * inv_sx;
        const double py = (ray.origin.y + t * dir[1]) * inv_sy;
        const bool inside = px >= 0.0 && py >= 0.0 && px < w && py < h;
        if (!inside) {
            if (entered) break;
            samples[i] = 0.0;
            if (transmission) transmission[i] = T;
            if (labels) labels[i] = -1;
            continue;
        }
        const Label l = grid[static_cast<std::size_t>(py) * w + static_cast<std::size_t>(px)];
        if (!ctx.known[l]) (void)table.at(l);

        double echo = 0.0;
        if (entered && l != prev) {
            const double zp = ctx.z[prev];
            const double zc = ctx.z[l];
            const double rr = (zc - zp) / (zc + zp);
            const double R = rr * rr;
            echo = std::pow(R, ctx.exponent_1) * T;
            if (events) events->push_back({i, prev, l, R, T, R * T, (1.0 - R) * T});
            T *= 1.0 - R;
        }
        entered = true;
        prev = l;
        T *= ctx.att_step[l];
        samples[i] = echo + ctx.brightness[l] * T;
        if (transmission) transmission[i] = T;
        if (labels) labels[i] = l;
    }
    for (; i < ctx.samples; ++i) {
        samples[i] = 0.0;
        if (transmission) transmission[i] = 0.0;
        if (labels) labels[i] = -1;
    }
}

// Speckle point-spread function, in units of the centre wavelength / scanline pitch.
constexpr double kSoundSpeedMmPerUs = 1.54;
constexpr double kAxialSigmaWavelengths = 0.5;
constexpr double kLateralSigmaLines = 1.0;

std::vector<double> gaussian_taps(double sigma, int radius) {
    std::vector<double> g(static_cast<std::size_t>(2 * radius + 1));
    for (int k = -radius; k <= radius; ++k) g[k + radius] = std::exp(-0.5 * (k / sigma) * (k / sigma));
    return g;
}

/// Adds the envelope of a scatterer field convolved with a separable PSF:
/// axial cosine-modulated Gaussian, lateral Gaussian widening away from focus.
void add_speckle(FanImage& fan, const std::vector<double>& transmission, const std::vector<int>& labels,
                 const TissueTable& table, const SimConfig& sim) {
    const ProbeConfig& probe = fan.probe;
    const int nl = probe.scan_lines;
    const int ns = probe.axial_resolution;
    const double step = probe.depth_step();

    // Scatterer field: Bernoulli(mu0) * Normal(mu1, sigma0^2), weighted by local T.
    std::vector<double> field(static_cast<std::size_t>(nl) * ns, 0.0);
    for (int k = 0; k < nl; ++k) {
        std::mt19937_64 eng(derive_seed(sim.rng_seed, {static_cast<std::uint64_t>(k), 0x5eccULL}));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int i = 0; i < ns; ++i) {
            const std::size_t idx = static_cast<std::size_t>(k) * ns + i;
            const double u = uniform01(eng);
            const double g = normal(eng);
            const int l = labels[idx];
            if (l < 0) continue;
            const AcousticProps& p = table.at(static_cast<Label>(l));
            if (u < p.mu0) field[idx] = (p.mu1 + p.sigma0 * g) * transmission[idx];
        }
    }

    // Axial I/Q filtering, energy-normalised.
    const double wavelength = kSoundSpeedMmPerUs / probe.center_frequency_mhz;
    const double sigma_a = kAxialSigmaWavelengths * wavelength / step;
    const int ra = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_a)));
    std::vector<double> hi(2 * ra + 1), hq(2 * ra + 1);
    double energy = 0.0;
    for (int m = -ra; m <= ra; ++m) {
        const double env = std::exp(-0.5 * (m / sigma_a) * (m / sigma_a));
        const double ph = 2.0 * std::numbers::pi * m * step / wavelength;
        hi[m + ra] = env * std::cos(ph);
        hq[m + ra] = env * std::sin(ph);
        energy += env * env;
    }
    const double norm_a = 1.0 / std::sqrt(energy / 2.0);
    for (auto& v : hi) v *= norm_a;
    for (auto& v : hq) v *= norm_a;

    std::vector<double> ci(field.size(), 0.0), cq(field.size(), 0.0);
    for (int k = 0; k < nl; ++k) {
        const double* f = &field[static_cast<std::size_t>(k) * ns];
        double* oi = &ci[static_cast<std::size_t>(k) * ns];
        double* oq = &cq[static_cast<std::size_t>(k) * ns];
        for (int i = 0; i < ns; ++i) {
            double si = 0.0, sq = 0.0;
            const int lo = std::max(-ra, -i);
            const int hi_m = std::min(ra, ns - 1 - i);
            for (int m = lo; m <= hi_m; ++m) {
                si += hi[m + ra] * f[i + m];
                sq += hq[m + ra] * f[i + m];
            }
            oi[i] = si;
            oq[i] = sq;
        }
    }

    // Lateral Gaussian; beam width grows linearly with distance from the focus.
    for (int i = 0; i < ns; ++i) {
        const double depth = (i + 0.5) * step;
        const double sigma_l = kLateralSigmaLines * (1.0 + std::abs(depth - probe.focus_depth) / probe.image_depth);
        const int rl = static_cast<int>(std::ceil(3.0 * sigma_l));
        const auto g = gaussian_taps(sigma_l, rl);
        double e = 0.0;
        for (double v : g) e += v * v;
        const double norm_l = 1.0 / std::sqrt(e);
        for (int k = 0; k < nl; ++k) {
            double si = 0.0, sq = 0.0;
            for (int m = std::max(-rl, -k); m <= std::min(rl, nl - 1 - k); ++m) {
                const std::size_t idx = static_cast<std::size_t>(k + m) * ns + i;
                si += g[m + rl] * ci[idx];
                sq += g[m + rl] * cq[idx];
            }
            fan.data(k, i) += norm_l * std::hypot(si, sq);
        }
    }
}

}  // namespace

RayTrace trace_ray(const LabelSlice& slice, const TissueTable& table, const Ray& ray, const ProbeConfig& probe,
                   const SimConfig& sim) {
    const MarchContext ctx(table, probe, sim);
    RayTrace tr;
    const auto n = static_cast<std::size_t>(ctx.samples);
    tr.profile.samples.assign(n, 0.0);
    tr.profile.depth_step = ctx.step;
    tr.transmission.assign(n, 0.0);
    tr.labels.assign(n, -1);
    march(ctx, slice, table, ray, tr.profile.samples.data(), tr.transmission.data(), tr.labels.data(),
          &tr.interfaces);
    return tr;
}

RayProfile march_ray(const LabelSlice& slice, const TissueTable& table, const Ray& ray, const ProbeConfig& probe,
                     const SimConfig& sim) {
    const MarchContext ctx(table, probe, sim);
    RayProfile p;
    p.samples.assign(static_cast<std::size_t>(ctx.samples), 0.0);
    p.depth_step = ctx.step;
    march(ctx, slice, table, ray, p.samples.data(), nullptr, nullptr, nullptr);
    return p;
}

FanImage render_fan(const LabelSlice& slice, const TissueTable& table, const ProbeConfig& probe,
                    const SimConfig& sim) {
    if (sim.mode != RenderMode::cactuss_ir && sim.mode != RenderMode::realistic_us)
        throw ValidationError(std::string("render does not support mode ") + render_mode_name(sim.mode));
    const MarchContext ctx(table, probe, sim);
    const bool speckle = sim.mode == RenderMode::realistic_us;
    const int nl = probe.scan_lines;
    const int ns = probe.axial_resolution;
    const auto lines = scanline_fan(probe);

    FanImage fan(probe, 0.0);
    std::vector<double> buf(static_cast<std::size_t>(ns));
    std::vector<double> tbuf(static_cast<std::size_t>(ns));
    std::vector<double> acc(static_cast<std::size_t>(ns));
    std::vector<double> transmission;
    std::vector<int> labels;
    if (speckle) {
        transmission.assign(static_cast<std::size_t>(nl) * ns, 0.0);
        labels.assign(static_cast<std::size_t>(nl) * ns, -1);
    }

    const double inv = 1.0 / sim.elevational_rays;
    for (int k = 0; k < nl; ++k) {
        const Ray central = to_slice_frame(lines[static_cast<std::size_t>(k)], slice);
        std::fill(acc.begin(), acc.end(), 0.0);
        double* tsum = speckle ? &transmission[static_cast<std::size_t>(k) * ns] : nullptr;
        for (const Ray& r : elevational_fan(central, sim.elevational_rays, sim.elevational_spread_deg)) {
            march(ctx, slice, table, r, buf.data(), speckle ? tbuf.data() : nullptr, nullptr, nullptr);
            for (int i = 0; i < ns; ++i) acc[i] += buf[i];
            if (speckle)
                for (int i = 0; i < ns; ++i) tsum[i] += tbuf[i] * inv;
        }
        for (int i = 0; i < ns; ++i) fan.data(k, i) = acc[i] * inv;
        if (speckle) march(ctx, slice, table, central, buf.data(), nullptr, &labels[static_cast<std::size_t>(k) * ns], nullptr);
    }

    if (speckle) add_speckle(fan, transmission, labels, table, sim);

    for (int k = 0; k < nl; ++k) {
        std::mt19937_64 eng(derive_seed(sim.rng_seed, {static_cast<std::uint64_t>(k), 0x40153ULL}));
        for (int i = 0; i < ns; ++i) {
            const double u = ns > 1 ? double(i) / double(ns - 1) : 0.0;
            double v = fan.data(k, i) * tgc_gain(u, sim);
            if (sim.rf_noise > 0.0) v += sim.rf_noise * uniform01(eng);
            fan.data(k, i) = v;
        }
    }
    return fan;
}

BModeImage render(const LabelSlice& slice, const TissueTable& table, const ProbeConfig& probe, const SimConfig& sim,
                  OutSize out) {
    FanImage fan = render_fan(slice, table, probe, sim);
    for (auto& v : fan.data.values()) v = std::min(1.0, v);
    return scan_convert(fan, out, Interp::bilinear);
}

FanImage mask_fan(const Grid2D<std::uint8_t>& mask, std::array<double, 2> spacing, const ProbeConfig& probe) {
    probe.validate();
    FanImage fan(probe, 0.0);
    const Vec3 origin{mask.width() * spacing[0] / 2.0, 0.0, 0.0};
    const double step = probe.depth_step();
    const auto rays = scanline_fan(probe);
    for (int k = 0; k < probe.scan_lines; ++k) {
        const Ray& r = rays[static_cast<std::size_t>(k)];
        for (int i = 0; i < probe.axial_resolution; ++i) {
            const double t = (i + 0.5) * step;
            const double px = (origin.x + r.origin.x + t * r.direction.x) / spacing[0];
            const double py = (origin.y + r.origin.y + t * r.direction.y) / spacing[1];
            if (px < 0.0 || py < 0.0 || px >= mask.width() || py >= mask.height()) continue;
            if (mask(static_cast<int>(px), static_cast<int>(py))) fan.data(k, i) = 1.0;
        }
    }
    return fan;
}

}  // namespace cactuss
