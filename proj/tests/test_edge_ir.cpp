#include <cmath>

#include "doctest.h"

#include "cactuss/edge_ir.hpp"
#include "cactuss/error.hpp"
#include "cactuss/phantom.hpp"

using namespace cactuss;

namespace {

ImageF disk(int n, double cx, double cy, double r, double inside, double outside) {
    ImageF img(n, n, outside);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            if (std::hypot(x + 0.5 - cx, y + 0.5 - cy) <= r) img(x, y) = inside;
    return img;
}

}  // namespace

TEST_CASE("gaussian blur preserves constants and mass") {
    ImageF c(40, 30, 0.3);
    const ImageF b = gaussian_blur(c, 2.0);
    for (double v : b.values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));

    ImageF d(41, 41, 0.0);
    d(20, 20) = 1.0;
    const ImageF e = gaussian_blur(d, 1.5);
    double sum = 0.0;
    for (double v : e.values()) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(e(19, 20) == doctest::Approx(e(21, 20)));
    CHECK(e(20, 19) == doctest::Approx(e(20, 21)));
}

TEST_CASE("bilateral filter keeps a step edge") {
    ImageF img(40, 40, 0.2);
    for (int y = 0; y < 40; ++y)
        for (int x = 20; x < 40; ++x) img(x, y) = 0.8;
    const ImageF f = bilateral_filter(img);
    CHECK(f(19, 20) == doctest::Approx(0.2).epsilon(1e-3));
    CHECK(f(20, 20) == doctest::Approx(0.8).epsilon(1e-3));
}

TEST_CASE("constant image has no edges") {
    const ImageF e = canny(ImageF(64, 64, 0.42));
    for (double v : e.values()) CHECK(v == 0.0);
}

TEST_CASE("disk edges lie on the analytic circle") {
    const double cx = 64.0, cy = 60.0, r = 30.0;
    const ImageF e = canny(bilateral_filter(disk(128, cx, cy, r, 0.9, 0.1)));
    int count = 0;
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 128; ++x) {
            CHECK((e(x, y) == 0.0 || e(x, y) == 1.0));
            if (e(x, y) > 0) {
                ++count;
                CHECK(std::abs(std::hypot(x + 0.5 - cx, y + 0.5 - cy) - r) <= 1.0);
            }
        }
    // Roughly one closed ring.
    CHECK(count > 0.8 * 2 * M_PI * r);
    CHECK(count < 1.6 * 2 * M_PI * r);
}

TEST_CASE("edge IR is sparse and confined to the sector") {
    const LabelVolume v = generate_phantom(PhantomSpec{.dims = {256, 256, 1}});
    const LabelSlice s = extract_slice(v, Axis::z, 0);
    const IntensitySlice ct{synth_ct_slice(s, default_tissue_table()), s.spacing};
    const BModeImage img = render_edge_ir(ct, ProbeConfig{}, {256, 256});
    std::size_t inside = 0, lit = 0;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        if (!img.mask.values()[i]) {
            CHECK(img.pixels.values()[i] == 0.0);
            continue;
        }
        ++inside;
        lit += img.pixels.values()[i] > 0;
    }
    CHECK(lit > 0);
    CHECK(double(lit) / double(inside) < 0.05);
    CHECK(render_edge_ir(ct, ProbeConfig{}, {256, 256}).pixels == img.pixels);
}

TEST_CASE("edge IR rejects out-of-range intensities") {
    ImageF bad(10, 10, 0.5);
    bad(3, 3) = 1.5;
    CHECK_THROWS_AS(render_edge_ir(IntensitySlice{bad, {1.0, 1.0}}, ProbeConfig{}, {32, 32}), ValidationError);
}
