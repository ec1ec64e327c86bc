#include "cactuss/probe_geometry.hpp"

#include <algorithm>

#include "cactuss/error.hpp"

namespace cactuss {

void ProbeConfig::validate() const {
    if (!(probe_width > 0.0)) throw ValidationError("probe_width must be > 0");
    if (!(probe_angle > 0.0 && probe_angle < 180.0)) throw ValidationError("probe_angle must be in (0, 180)");
    if (!(image_depth > 0.0)) throw ValidationError("image_depth must be > 0");
    if (!(focus_depth > 0.0)) throw ValidationError("focus_depth must be > 0");
    if (scan_lines < 2) throw ValidationError("scan_lines must be >= 2");
    if (axial_resolution < 1) throw ValidationError("axial_resolution must be >= 1");
    if (!(center_frequency_mhz > 0.0)) throw ValidationError("center_frequency_mhz must be > 0");
}

std::vector<Ray> scanline_fan(const ProbeConfig& probe) {
    probe.validate();
    const double r0 = probe.face_radius();
    std::vector<Ray> rays;
    rays.reserve(static_cast<std::size_t>(probe.scan_lines));
    for (int k = 0; k < probe.scan_lines; ++k) {
        const double phi = probe.line_angle(k);
        const double s = std::sin(phi);
        const double c = std::cos(phi);
        rays.push_back(Ray{{r0 * s, r0 * c - r0, 0.0}, {s, c, 0.0}, probe.image_depth});
    }
    return rays;
}

std::vector<Ray> elevational_fan(const Ray& ray, int count, double spread_deg) {
    if (count < 1) throw ValidationError("elevational ray count must be >= 1");
    if (!(spread_deg >= 0.0)) throw ValidationError("elevational spread must be >= 0");
    if (count == 1) return {ray};

    // Elevational unit vector: z with its component along the ray removed.
    const Vec3& d = ray.direction;
    Vec3 e{-d.z * d.x, -d.z * d.y, 1.0 - d.z * d.z};
    const double en = e.norm();
    if (en < 1e-12)
        e = {1.0, 0.0, 0.0};
    else
        e = (1.0 / en) * e;

    const double spread = spread_deg * std::numbers::pi / 180.0;
    std::vector<Ray> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int m = 0; m < count; ++m) {
        const double psi = -spread / 2.0 + m * spread / (count - 1);
        Ray r = ray;
        r.direction = std::cos(psi) * d + std::sin(psi) * e;
        out.push_back(r);
    }
    return out;
}

double pixel_spacing(const ProbeConfig& probe, OutSize out) {
    probe.validate();
    if (out.width < 1 || out.height < 1) throw ValidationError("output size must be positive");
    return (probe.image_depth + probe.face_drop()) / out.height;
}

ScanConverter::ScanConverter(const ProbeConfig& probe, OutSize out)
    : probe_(probe), out_(out), spacing_(0.0), top_(0.0), mask_(out.width, out.height, 0) {
    if (out.width < 2 || out.height < 2) throw ValidationError("output size must be at least 2x2");
    spacing_ = pixel_spacing(probe, out);
    const double r0 = probe.face_radius();
    const double half = probe.angle_rad() / 2.0;
    const double dphi = probe.angle_rad() / (probe.scan_lines - 1);
    const double step = probe.depth_step();
    top_ = r0 * std::cos(half);

    taps_.resize(static_cast<std::size_t>(out.width) * out.height);
    for (int row = 0; row < out.height; ++row) {
        const double y = top_ + (row + 0.5) * spacing_;
        for (int col = 0; col < out.width; ++col) {
            const double x = (col + 0.5 - out.width / 2.0) * spacing_;
            const double r = std::hypot(x, y);
            const double phi = std::atan2(x, y);
            const double t = r - r0;
            if (std::abs(phi) > half || t < 0.0 || t > probe.image_depth) continue;
            mask_(col, row) = 1;
            Tap& tap = taps_[static_cast<std::size_t>(row) * out.width + col];
            tap.line = std::clamp((phi + half) / dphi, 0.0, double(probe.scan_lines - 1));
            // Sample i is centred at depth (i + 0.5) * step.
            tap.sample = std::clamp(t / step - 0.5, 0.0, double(probe.axial_resolution - 1));
        }
    }
}

Vec3 ScanConverter::pixel_to_probe(int col, int row) const noexcept {
    const double x = (col + 0.5 - out_.width / 2.0) * spacing_;
    const double y = top_ + (row + 0.5) * spacing_ - probe_.face_radius();
    return {x, y, 0.0};
}

BModeImage ScanConverter::convert(const FanImage& fan, Interp interp) const {
    if (fan.data.width() != probe_.scan_lines || fan.data.height() != probe_.axial_resolution)
        throw ValidationError("fan dimensions do not match the probe configuration");
    BModeImage img{ImageF(out_.width, out_.height, 0.0), mask_, spacing_};
    const int nl = probe_.scan_lines;
    const int ns = probe_.axial_resolution;
    for (int row = 0; row < out_.height; ++row) {
        for (int col = 0; col < out_.width; ++col) {
            if (!mask_(col, row)) continue;
            const Tap& tap = taps_[static_cast<std::size_t>(row) * out_.width + col];
            if (interp == Interp::nearest) {
                const int l = static_cast<int>(std::lround(tap.line));
                const int s = static_cast<int>(std::lround(tap.sample));
                img.pixels(col, row) = fan.data(l, s);
                continue;
            }
            const int l0 = std::min(static_cast<int>(tap.line), nl - 2);
            const int s0 = std::min(static_cast<int>(tap.sample), std::max(ns - 2, 0));
            const double fl = tap.line - l0;
            const int s1 = ns > 1 ? s0 + 1 : s0;
            const double fs = ns > 1 ? tap.sample - s0 : 0.0;
            const double a = fan.data(l0, s0) * (1.0 - fs) + fan.data(l0, s1) * fs;
            const double b = fan.data(l0 + 1, s0) * (1.0 - fs) + fan.data(l0 + 1, s1) * fs;
            img.pixels(col, row) = a * (1.0 - fl) + b * fl;
        }
    }
    return img;
}

BModeImage scan_convert(const FanImage& fan, OutSize out, Interp interp) {
    return ScanConverter(fan.probe, out).convert(fan, interp);
}

Grid2D<std::uint8_t> sector_mask(const ProbeConfig& probe, OutSize out) {
    return ScanConverter(probe, out).mask();
}

}  // namespace cactuss
