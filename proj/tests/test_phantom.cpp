#include "doctest.h"

#include "cactuss/error.hpp"
#include "cactuss/phantom.hpp"

using namespace cactuss;

namespace {

PhantomSpec small_spec() {
    PhantomSpec s;
    s.dims = {256, 256, 4};
    return s;
}

/// Extent in rows between the first and last row containing the label.
int row_extent(const LabelSlice& s, Label l) {
    int lo = s.height(), hi = -1;
    for (int y = 0; y < s.height(); ++y)
        for (int x = 0; x < s.width(); ++x)
            if (s.labels(x, y) == l) {
                lo = std::min(lo, y);
                hi = std::max(hi, y);
            }
    return hi < 0 ? 0 : hi - lo + 1;
}

}  // namespace

TEST_CASE("aorta diameter is reproduced within one voxel") {
    PhantomSpec s = small_spec();
    s.aorta.diameter_mm = 20.0;
    const LabelVolume v = generate_phantom(s);
    const int extent = row_extent(extract_slice(v, Axis::z, 1), labels::kBlood);
    CHECK(extent >= 39);
    CHECK(extent <= 41);

    for (double d : {12.0, 25.0, 35.0}) {
        s.aorta.diameter_mm = d;
        s.aorta.center_mm = {64.3, 60.1};
        const int e = row_extent(extract_slice(generate_phantom(s), Axis::z, 0), labels::kBlood);
        CHECK(std::abs(e * 0.5 - d) <= 0.5);
    }
}

TEST_CASE("phantom generation is deterministic") {
    PhantomSpec s = small_spec();
    s.rng_seed = 99;
    CHECK(generate_phantom(s) == generate_phantom(s));
    s.perturbation = 1.5;
    CHECK(generate_phantom(s) == generate_phantom(s));
    PhantomSpec t = s;
    t.rng_seed = 100;
    CHECK_FALSE(generate_phantom(s) == generate_phantom(t));
}

TEST_CASE("phantom spec validation") {
    PhantomSpec s = small_spec();
    SUBCASE("aorta outside") {
        s.aorta.center_mm = {200.0, 60.0};
        CHECK_THROWS_AS(generate_phantom(s), ValidationError);
    }
    SUBCASE("aorta crossing the edge") {
        s.aorta.center_mm = {5.0, 60.0};
        CHECK_THROWS_AS(generate_phantom(s), ValidationError);
    }
    SUBCASE("zero diameter") {
        s.aorta.diameter_mm = 0.0;
        CHECK_THROWS_AS(generate_phantom(s), ValidationError);
    }
    SUBCASE("layers deeper than the volume") {
        s.layers.fat = 200.0;
        CHECK_THROWS_AS(generate_phantom(s), ValidationError);
    }
    SUBCASE("negative layer") {
        s.layers.skin = -1.0;
        CHECK_THROWS_AS(generate_phantom(s), ValidationError);
    }
}

TEST_CASE("anterior-to-posterior tissue ordering along the aorta column") {
    const PhantomSpec s = small_spec();
    const LabelSlice sl = extract_slice(generate_phantom(s), Axis::z, 0);
    const int col = static_cast<int>(s.aorta.center_mm[0] / s.spacing[0]);
    std::vector<Label> seq;
    for (int y = 0; y < sl.height(); ++y)
        if (seq.empty() || seq.back() != sl.labels(col, y)) seq.push_back(sl.labels(col, y));
    using namespace labels;
    const std::vector<Label> expected{kSkin, kFat, kMuscle, kLiver, kVesselWall, kBlood,
                                      kVesselWall, kLiver, kBone, kLiver};
    CHECK(seq == expected);
}

TEST_CASE("every emitted label exists in the default tissue table") {
    PhantomSpec s = small_spec();
    s.perturbation = 2.0;
    const LabelVolume v = generate_phantom(s);
    std::array<bool, 256> seen{};
    for (auto l : v.labels()) seen[l] = true;
    for (int l = 0; l < 256; ++l)
        if (seen[l]) CHECK(default_tissue_table().contains(static_cast<Label>(l)));
    CHECK(seen[labels::kLung]);
    CHECK(seen[labels::kBone]);
}

TEST_CASE("aorta_mask_slice selects exactly the lumen pixels") {
    const LabelVolume v = generate_phantom(small_spec());
    const SegMask m = aorta_mask_slice(v, Axis::z, 2);
    const LabelSlice sl = extract_slice(v, Axis::z, 2);
    std::size_t lumen = 0;
    for (auto l : sl.labels.values()) lumen += l == labels::kBlood;
    CHECK(m.count() == lumen);
    CHECK(m.spacing == 0.5);
    CHECK(aorta_mask_slice(v, Axis::z, 2).pixels == m.pixels);
    CHECK_THROWS_AS(aorta_mask_slice(v, Axis::z, 4), ValidationError);

    const LabelVolume none({8, 8, 2}, {1, 1, 1}, labels::kLiver);
    CHECK(aorta_mask_slice(none, Axis::z, 0).count() == 0);
}
