#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cactuss/grid.hpp"

namespace cactuss {

/// Convex probe scan parameters. Lengths in mm, angles in degrees.
struct ProbeConfig {
    double probe_width = 59.0;  // arc length of the convex face
    double probe_angle = 40.0;  // full opening angle of the fan
    double image_depth = 100.0;
    double focus_depth = 50.0;
    int scan_lines = 196;
    int axial_resolution = 1024;  // samples per scanline
    double center_frequency_mhz = 3.5;

    void validate() const;

    [[nodiscard]] double angle_rad() const noexcept { return probe_angle * std::numbers::pi / 180.0; }
    /// Radius of the convex face arc, r0 = width / angle.
    [[nodiscard]] double face_radius() const noexcept { return probe_width / angle_rad(); }
    /// Vertical distance between the face centre and the face edges.
    [[nodiscard]] double face_drop() const noexcept { return face_radius() * (1.0 - std::cos(angle_rad() / 2.0)); }
    [[nodiscard]] double depth_step() const noexcept { return image_depth / axial_resolution; }
    /// In-plane angle of scanline k from the vertical, radians.
    [[nodiscard]] double line_angle(int k) const noexcept {
        const double theta = angle_rad();
        return -theta / 2.0 + k * theta / (scan_lines - 1);
    }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator*(double s, Vec3 a) noexcept { return {s * a.x, s * a.y, s * a.z}; }
    [[nodiscard]] double norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }
    bool operator==(const Vec3&) const = default;
};

/// Straight acoustic ray. x is lateral, y is depth (down), z is elevational.
struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length
    double max_length = 0.0;
};

/// Pre-scan-conversion buffer; data(line, sample).
struct FanImage {
    Grid2D<double> data;
    ProbeConfig probe;

    FanImage() = default;
    explicit FanImage(const ProbeConfig& p, double fill = 0.0)
        : data(p.scan_lines, p.axial_resolution, fill), probe(p) {}
};

/// Cartesian image with its convex sector mask. Pixels outside the mask are 0.
struct BModeImage {
    ImageF pixels;
    Grid2D<std::uint8_t> mask;
    double spacing = 1.0;  // mm per pixel, isotropic

    [[nodiscard]] int width() const noexcept { return pixels.width(); }
    [[nodiscard]] int height() const noexcept { return pixels.height(); }
};

struct OutSize {
    int width = 256;
    int height = 256;
};

enum class Interp { bilinear, nearest };

/// Rays of the convex fan in the probe frame: face centre at the origin,
/// arc centre (apex) at (0, -r0).
std::vector<Ray> scanline_fan(const ProbeConfig& probe);

/// `count` rays tilted out of plane, evenly spanning +/- spread/2 about `ray`.
std::vector<Ray> elevational_fan(const Ray& ray, int count, double spread_deg);

double pixel_spacing(const ProbeConfig& probe, OutSize out);

/// Precomputed pixel -> (line, sample) map for one probe / output size pair.
class ScanConverter {
public:
    ScanConverter(const ProbeConfig& probe, OutSize out);

    [[nodiscard]] BModeImage convert(const FanImage& fan, Interp interp = Interp::bilinear) const;
    [[nodiscard]] const Grid2D<std::uint8_t>& mask() const noexcept { return mask_; }
    [[nodiscard]] double spacing() const noexcept { return spacing_; }
    [[nodiscard]] OutSize size() const noexcept { return out_; }

    /// Probe-frame coordinates (mm) of the centre of output pixel (col, row).
    [[nodiscard]] Vec3 pixel_to_probe(int col, int row) const noexcept;

private:
    struct Tap {
        double line = 0.0;    // fractional scanline index
        double sample = 0.0;  // fractional sample index
    };
    ProbeConfig probe_;
    OutSize out_;
    double spacing_;
    double top_;  // apex-frame depth of the top image edge
    Grid2D<std::uint8_t> mask_;
    std::vector<Tap> taps_;
};

BModeImage scan_convert(const FanImage& fan, OutSize out, Interp interp = Interp::bilinear);

/// Convex sector mask for a probe at the given output size.
Grid2D<std::uint8_t> sector_mask(const ProbeConfig& probe, OutSize out);

}  // namespace cactuss
