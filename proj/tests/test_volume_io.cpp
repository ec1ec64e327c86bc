#include <fstream>
#include <random>
#include <set>

#include "doctest.h"

#include "cactuss/error.hpp"
#include "cactuss/volume_io.hpp"
#include "test_util.hpp"

using namespace cactuss;

namespace {

LabelVolume random_volume(std::mt19937_64& eng) {
    std::uniform_int_distribution<int> dim(1, 12);
    std::array<int, 3> d{dim(eng), dim(eng), dim(eng)};
    std::vector<Label> v(static_cast<std::size_t>(d[0] * d[1] * d[2]));
    for (auto& x : v) x = static_cast<Label>(eng() & 0xff);
    return LabelVolume(d, {0.5, 0.75, 2.0}, std::move(v));
}

void write_file(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p, std::ios::binary) << s;
}

const char* kTwoTissues = R"([
  {"label": 7, "name": "blood", "c": 1570, "z": 1.61, "alpha": 0.2, "mu0": 0.01, "mu1": 0.1, "sigma0": 0.05,
   "echogenicity": 0.0, "pseudo_hu": 200},
  {"label": 2, "name": "fat", "c": 1450, "z": 1.38, "alpha": 0.48, "mu0": 0.3, "mu1": 0.35, "sigma0": 0.1,
   "echogenicity": 0.35, "pseudo_hu": -100}
])";

}  // namespace

TEST_CASE("load_label_volume reads the smallest well-formed volume") {
    testutil::TempDir dir("vol");
    write_file(dir / "v.lmap.json", R"({"dims":[4,4,4],"spacing_mm":[1,1,1],"payload":"v.raw","dtype":"u8"})");
    write_file(dir / "v.raw", std::string(64, '\3'));
    const LabelVolume v = load_label_volume(dir / "v.lmap.json");
    CHECK(v.voxel_count() == 64);
    CHECK(v.at(3, 3, 3) == 3);
}

TEST_CASE("load_label_volume rejects bad inputs") {
    testutil::TempDir dir("vol");
    SUBCASE("short payload") {
        write_file(dir / "v.lmap.json", R"({"dims":[4,4,4],"spacing_mm":[1,1,1],"payload":"v.raw"})");
        write_file(dir / "v.raw", std::string(63, '\0'));
        CHECK_THROWS_WITH_AS(load_label_volume(dir / "v.lmap.json"), doctest::Contains("payload length mismatch"),
                             FormatError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_label_volume(dir / "nope.lmap.json"), IoError); }
    SUBCASE("malformed header") {
        write_file(dir / "v.lmap.json", R"({"dims":[4,4],"spacing_mm":[1,1,1],"payload":"v.raw"})");
        CHECK_THROWS_AS(load_label_volume(dir / "v.lmap.json"), FormatError);
        write_file(dir / "v.lmap.json", "{not json");
        CHECK_THROWS_AS(load_label_volume(dir / "v.lmap.json"), FormatError);
    }
    SUBCASE("non-positive spacing") {
        write_file(dir / "v.lmap.json", R"({"dims":[1,1,1],"spacing_mm":[1,0,1],"payload":"v.raw"})");
        write_file(dir / "v.raw", std::string(1, '\0'));
        CHECK_THROWS_AS(load_label_volume(dir / "v.lmap.json"), FormatError);
    }
}

TEST_CASE("save then load is bit-exact for random volumes") {
    testutil::TempDir dir("vol");
    std::mt19937_64 eng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const LabelVolume v = random_volume(eng);
        save_label_volume(v, dir / "r.lmap.json");
        CHECK(std::filesystem::exists(dir / "r.raw"));
        CHECK(load_label_volume(dir / "r.lmap.json") == v);
    }
}

TEST_CASE("save_label_volume reports unwritable paths") {
    const LabelVolume v({2, 2, 2}, {1, 1, 1}, 0);
    CHECK_THROWS_AS(save_label_volume(v, "/nonexistent_dir_xyz/v.lmap.json"), IoError);
}

TEST_CASE("extract_slice indexes the volume directly") {
    std::mt19937_64 eng(3);
    const LabelVolume v = random_volume(eng);
    const auto d = v.dims();
    for (int k = 0; k < d[2]; ++k) {
        const LabelSlice s = extract_slice(v, Axis::z, k);
        REQUIRE(s.width() == d[0]);
        REQUIRE(s.height() == d[1]);
        CHECK(s.spacing == std::array<double, 2>{0.5, 0.75});
        for (int j = 0; j < d[1]; ++j)
            for (int i = 0; i < d[0]; ++i) CHECK(s.labels(i, j) == v.at(i, j, k));
    }
    CHECK_THROWS_AS(extract_slice(v, Axis::z, d[2]), ValidationError);
    CHECK_THROWS_AS(extract_slice(v, Axis::x, -1), ValidationError);
}

TEST_CASE("slices over every index reconstruct the volume on each axis") {
    std::mt19937_64 eng(5);
    const LabelVolume v = random_volume(eng);
    const auto d = v.dims();
    for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
        LabelVolume rebuilt(d, v.spacing(), 0);
        for (int n = 0; n < d[static_cast<int>(axis)]; ++n) {
            const LabelSlice s = extract_slice(v, axis, n);
            for (int b = 0; b < s.height(); ++b)
                for (int a = 0; a < s.width(); ++a) {
                    if (axis == Axis::z) rebuilt.set(a, b, n, s.labels(a, b));
                    if (axis == Axis::y) rebuilt.set(a, n, b, s.labels(a, b));
                    if (axis == Axis::x) rebuilt.set(n, a, b, s.labels(a, b));
                }
        }
        CHECK(rebuilt == v);
    }
}

TEST_CASE("constant volume gives constant slices") {
    const LabelVolume v({5, 6, 7}, {1, 1, 1}, 3);
    for (Axis a : {Axis::x, Axis::y, Axis::z}) {
        const auto s = extract_slice(v, a, 2);
        for (auto l : s.labels.values()) CHECK(l == 3);
    }
}

TEST_CASE("tissue table parsing") {
    const TissueTable t = parse_tissue_table(kTwoTissues);
    CHECK(t.entries().size() == 2);
    CHECK(t.at(7).c == 1570);
    CHECK(t.at(2).alpha == doctest::Approx(0.48));
    CHECK_THROWS_AS(static_cast<void>(t.at(9)), ValidationError);

    SUBCASE("duplicate label") {
        CHECK_THROWS_WITH_AS(parse_tissue_table(R"([
          {"label":5,"name":"a","c":1,"z":1,"alpha":0,"mu0":0,"mu1":0,"sigma0":0,"echogenicity":0,"pseudo_hu":0},
          {"label":5,"name":"b","c":1,"z":1,"alpha":0,"mu0":0,"mu1":0,"sigma0":0,"echogenicity":0,"pseudo_hu":0}])"),
                             doctest::Contains("duplicate"), ValidationError);
    }
    SUBCASE("negative alpha") {
        CHECK_THROWS_AS(parse_tissue_table(R"([
          {"label":5,"name":"a","c":1,"z":1,"alpha":-1,"mu0":0,"mu1":0,"sigma0":0,"echogenicity":0,"pseudo_hu":0}])"),
                        ValidationError);
    }
    SUBCASE("missing field") {
        CHECK_THROWS_AS(parse_tissue_table(R"([{"label":5,"name":"a","c":1,"z":1}])"), FormatError);
    }
    SUBCASE("empty table") { CHECK_THROWS_AS(parse_tissue_table("[]"), ValidationError); }
}

TEST_CASE("default tissue table round-trips through JSON") {
    const TissueTable& d = default_tissue_table();
    const TissueTable back = parse_tissue_table(tissue_table_to_json(d));
    REQUIRE(back.entries().size() == d.entries().size());
    for (const auto& [l, p] : d.entries()) {
        CHECK(back.at(l).name == p.name);
        CHECK(back.at(l).z == p.z);
        CHECK(back.at(l).pseudo_hu == p.pseudo_hu);
    }
}

TEST_CASE("synth_ct_slice maps pseudo-HU onto [0, 1]") {
    auto table_with = [](double hu_a, double hu_b) {
        std::map<Label, AcousticProps> m;
        m[1] = {"a", 1540, 1.5, 0, 0, 0, 0, 0.5, hu_a};
        m[2] = {"b", 1540, 1.5, 0, 0, 0, 0, 0.5, hu_b};
        return TissueTable("t", m);
    };
    LabelSlice uniform(Grid2D<Label>(6, 4, 1), {1, 1});
    const ImageF lo = synth_ct_slice(uniform, table_with(-1024, 0));
    const ImageF hi = synth_ct_slice(uniform, table_with(3071, 0));
    for (double v : lo.values()) CHECK(v == 0.0);
    for (double v : hi.values()) CHECK(v == 1.0);

    LabelSlice two(Grid2D<Label>(6, 4, 1), {1, 1});
    for (int x = 3; x < 6; ++x)
        for (int y = 0; y < 4; ++y) two.labels(x, y) = 2;
    const ImageF img = synth_ct_slice(two, table_with(40, 1000));
    std::set<double> distinct(img.values().begin(), img.values().end());
    CHECK(distinct.size() == 2);
    CHECK(img(0, 0) < img(5, 0));
    CHECK(img(0, 0) == doctest::Approx((40.0 + 1024.0) / 4095.0));

    LabelSlice unknown(Grid2D<Label>(2, 2, 9), {1, 1});
    CHECK_THROWS_AS(synth_ct_slice(unknown, table_with(0, 0)), ValidationError);
}

TEST_CASE("synth_ct_slice is monotone in pseudo-HU") {
    const auto& t = default_tissue_table();
    Grid2D<Label> g(static_cast<int>(t.entries().size()), 1);
    int i = 0;
    for (const auto& [l, _] : t.entries()) g(i++, 0) = l;
    const ImageF img = synth_ct_slice(LabelSlice(g, {1, 1}), t);
    for (int a = 0; a < g.width(); ++a)
        for (int b = 0; b < g.width(); ++b)
            if (t.at(g(a, 0)).pseudo_hu > t.at(g(b, 0)).pseudo_hu) CHECK(img(a, 0) >= img(b, 0));
}
