#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "cactuss/error.hpp"
#include "cactuss/probe_geometry.hpp"

using namespace cactuss;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double in_plane_angle(const Ray& r) { return std::atan2(r.direction.x, r.direction.y); }

FanImage random_fan(const ProbeConfig& p, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FanImage f(p);
    for (auto& v : f.data.values()) v = u(eng);
    return f;
}

}  // namespace

TEST_CASE("default fan spans +/-20 degrees with 196 lines") {
    const ProbeConfig p;
    const auto rays = scanline_fan(p);
    REQUIRE(rays.size() == 196);
    CHECK(in_plane_angle(rays.front()) == doctest::Approx(-20.0 * kDeg).epsilon(1e-12));
    CHECK(in_plane_angle(rays.back()) == doctest::Approx(20.0 * kDeg).epsilon(1e-12));
    for (std::size_t k = 1; k < rays.size(); ++k) CHECK(in_plane_angle(rays[k]) > in_plane_angle(rays[k - 1]));
    for (const Ray& r : rays) {
        CHECK(std::abs(r.direction.norm() - 1.0) < 1e-9);
        CHECK(r.max_length == 100.0);
    }
}

TEST_CASE("fan is mirror symmetric and origins lie on the face arc") {
    const ProbeConfig p;
    const auto rays = scanline_fan(p);
    const double r0 = p.face_radius();
    CHECK(r0 == doctest::Approx(84.51).epsilon(1e-4));
    const std::size_t n = rays.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Ray& a = rays[k];
        const Ray& b = rays[n - 1 - k];
        CHECK(a.origin.x == doctest::Approx(-b.origin.x));
        CHECK(a.origin.y == doctest::Approx(b.origin.y));
        CHECK(a.direction.x == doctest::Approx(-b.direction.x));
        // Apex sits at (0, -r0), above the image.
        CHECK(std::hypot(a.origin.x, a.origin.y + r0) == doctest::Approx(r0).epsilon(1e-12));
    }
}

TEST_CASE("probe validation") {
    ProbeConfig p;
    p.scan_lines = 1;
    CHECK_THROWS_AS(scanline_fan(p), ValidationError);
    p = {};
    p.probe_angle = 180.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.image_depth = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("elevational fan") {
    const Ray center = scanline_fan(ProbeConfig{})[40];
    SUBCASE("count 1 is the identity") {
        const auto one = elevational_fan(center, 1, 2.0);
        REQUIRE(one.size() == 1);
        CHECK(one[0].direction == center.direction);
        CHECK(one[0].origin == center.origin);
    }
    SUBCASE("count 10 spans +/-1 degree") {
        const auto rays = elevational_fan(center, 10, 2.0);
        REQUIRE(rays.size() == 10);
        auto tilt = [&](const Ray& r) {
            const double dot = r.direction.x * center.direction.x + r.direction.y * center.direction.y +
                               r.direction.z * center.direction.z;
            return std::copysign(std::acos(std::min(1.0, dot)), r.direction.z);
        };
        CHECK(tilt(rays.front()) == doctest::Approx(-1.0 * kDeg).epsilon(1e-9));
        CHECK(tilt(rays.back()) == doctest::Approx(1.0 * kDeg).epsilon(1e-9));
        Vec3 mean{};
        for (const Ray& r : rays) {
            CHECK(std::abs(r.direction.norm() - 1.0) < 1e-12);
            mean = mean + 0.1 * r.direction;
        }
        mean = (1.0 / mean.norm()) * mean;
        CHECK(mean.x == doctest::Approx(center.direction.x).epsilon(1e-12));
        CHECK(mean.y == doctest::Approx(center.direction.y).epsilon(1e-12));
        CHECK(std::abs(mean.z) < 1e-12);
    }
    CHECK_THROWS_AS(elevational_fan(center, 0, 2.0), ValidationError);
}

TEST_CASE("pixel spacing") {
    ProbeConfig flat;
    flat.probe_angle = 1e-7;  // r0 -> infinity
    CHECK(pixel_spacing(flat, {256, 256}) == doctest::Approx(0.390625).epsilon(1e-9));
    const ProbeConfig p;
    CHECK(pixel_spacing(p, {256, 512}) == doctest::Approx(pixel_spacing(p, {256, 256}) / 2.0));
    CHECK(pixel_spacing(p, {256, 256}) > 0.390625);
    CHECK(pixel_spacing(p, {256, 256}) == doctest::Approx(105.09665349613209 / 256.0));
}

TEST_CASE("scan conversion of a constant fan fills exactly the mask") {
    const ProbeConfig p;
    const BModeImage img = scan_convert(FanImage(p, 1.0), {256, 256});
    std::size_t inside = 0;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        if (img.mask.values()[i]) {
            CHECK(img.pixels.values()[i] == 1.0);
            ++inside;
        } else {
            CHECK(img.pixels.values()[i] == 0.0);
        }
    }
    CHECK(inside > 256 * 256 / 2);
    CHECK(sector_mask(p, {256, 256}) == img.mask);
}

TEST_CASE("single scanline re-projects onto its radial line") {
    const ProbeConfig p;
    const int line = 150;
    FanImage fan(p, 0.0);
    for (int i = 0; i < p.axial_resolution; ++i) fan.data(line, i) = 1.0;
    const OutSize out{256, 256};
    const BModeImage img = scan_convert(fan, out);

    // Independent re-projection of pixel centres to the apex frame.
    const double s = (p.image_depth + p.face_radius() * (1 - std::cos(p.angle_rad() / 2))) / out.height;
    const double top = p.face_radius() * std::cos(p.angle_rad() / 2);
    const double line_angle = -p.angle_rad() / 2 + line * p.angle_rad() / (p.scan_lines - 1);
    const double pitch = p.angle_rad() / (p.scan_lines - 1);
    int lit = 0;
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            if (img.pixels(x, y) == 0.0) continue;
            ++lit;
            const double px = (x + 0.5 - out.width / 2.0) * s;
            const double py = top + (y + 0.5) * s;
            CHECK(std::abs(std::atan2(px, py) - line_angle) < pitch);
        }
    CHECK(lit > 100);
}

TEST_CASE("mirrored fan gives the mirrored image") {
    const ProbeConfig p;
    const FanImage fan = random_fan(p, 4);
    FanImage flipped(p);
    for (int k = 0; k < p.scan_lines; ++k)
        for (int i = 0; i < p.axial_resolution; ++i) flipped.data(k, i) = fan.data(p.scan_lines - 1 - k, i);
    const BModeImage a = scan_convert(fan, {256, 256});
    const BModeImage b = scan_convert(flipped, {256, 256});
    double worst = 0.0;
    for (int y = 0; y < 256; ++y)
        for (int x = 0; x < 256; ++x) {
            worst = std::max(worst, std::abs(a.pixels(x, y) - b.pixels(255 - x, y)));
            CHECK(a.mask(x, y) == b.mask(255 - x, y));
        }
    CHECK(worst < 1e-6);
}

TEST_CASE("scan conversion is intensity bounded and deterministic") {
    const ProbeConfig p;
    const FanImage fan = random_fan(p, 9);
    double lo = 1e9, hi = -1e9;
    for (double v : fan.data.values()) lo = std::min(lo, v), hi = std::max(hi, v);
    const BModeImage img = scan_convert(fan, {200, 240});
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        if (img.mask.values()[i]) {
            CHECK(img.pixels.values()[i] >= lo);
            CHECK(img.pixels.values()[i] <= hi);
        }
    CHECK(scan_convert(fan, {200, 240}).pixels == img.pixels);
}

TEST_CASE("sector mask columns are single contiguous runs") {
    for (OutSize out : {OutSize{256, 256}, OutSize{64, 128}, OutSize{300, 150}}) {
        const auto m = sector_mask(ProbeConfig{}, out);
        for (int x = 0; x < out.width; ++x) {
            int runs = 0;
            for (int y = 0; y < out.height; ++y)
                if (m(x, y) && (y == 0 || !m(x, y - 1))) ++runs;
            CHECK(runs <= 1);
        }
    }
}

TEST_CASE("nearest-neighbour conversion keeps binary data binary") {
    const ProbeConfig p;
    FanImage fan(p);
    std::mt19937_64 eng(1);
    for (auto& v : fan.data.values()) v = double(eng() & 1);
    const BModeImage img = scan_convert(fan, {128, 128}, Interp::nearest);
    for (double v : img.pixels.values()) CHECK((v == 0.0 || v == 1.0));
}
