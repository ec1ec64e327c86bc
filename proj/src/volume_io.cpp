#include "cactuss/volume_io.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "cactuss/error.hpp"

namespace cactuss {

namespace fs = std::filesystem;
using nlohmann::json;

Axis parse_axis(const std::string& s) {
    if (s == "x") return Axis::x;
    if (s == "y") return Axis::y;
    if (s == "z") return Axis::z;
    throw ValidationError("unknown axis '" + s + "' (expected x, y or z)");
}

const char* axis_name(Axis a) noexcept {
    switch (a) {
        case Axis::x: return "x";
        case Axis::y: return "y";
        case Axis::z: return "z";
    }
    return "?";
}

namespace {

void check_geometry(const std::array<int, 3>& dims, const std::array<double, 3>& spacing) {
    for (int d = 0; d < 3; ++d) {
        if (dims[d] < 1) throw ValidationError("volume dims must be >= 1");
        if (!(spacing[d] > 0.0) || !std::isfinite(spacing[d]))
            throw ValidationError("volume spacing must be positive");
    }
}

std::size_t product(const std::array<int, 3>& dims) {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(dims[2]);
}

fs::path payload_path_for(const fs::path& header) {
    std::string file = header.filename().string();
    const std::string suffix = ".lmap.json";
    std::string base;
    if (file.size() > suffix.size() && file.compare(file.size() - suffix.size(), suffix.size(), suffix) == 0)
        base = file.substr(0, file.size() - suffix.size());
    else
        base = header.stem().string();
    return base + ".raw";
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

LabelVolume::LabelVolume(std::array<int, 3> dims, std::array<double, 3> spacing_mm, std::vector<Label> labels)
    : dims_(dims), spacing_(spacing_mm), labels_(std::move(labels)) {
    check_geometry(dims_, spacing_);
    if (labels_.size() != product(dims_)) throw ValidationError("label array length != nx*ny*nz");
}

LabelVolume::LabelVolume(std::array<int, 3> dims, std::array<double, 3> spacing_mm, Label fill)
    : dims_(dims), spacing_(spacing_mm) {
    check_geometry(dims_, spacing_);
    labels_.assign(product(dims_), fill);
}

LabelSlice::LabelSlice(Grid2D<Label> l, std::array<double, 2> s) : labels(std::move(l)), spacing(s) {
    if (labels.width() < 1 || labels.height() < 1) throw ValidationError("slice dims must be >= 1");
    if (!(spacing[0] > 0.0) || !(spacing[1] > 0.0)) throw ValidationError("slice spacing must be positive");
}

void AcousticProps::validate() const {
    auto fail = [&](const char* what) {
        throw ValidationError("tissue '" + name + "': " + what);
    };
    if (!(c > 0.0)) fail("c must be > 0");
    if (!(z > 0.0)) fail("z must be > 0");
    if (!(alpha >= 0.0)) fail("alpha must be >= 0");
    if (!(mu0 >= 0.0 && mu0 <= 1.0)) fail("mu0 must be in [0,1]");
    if (!(mu1 >= 0.0 && mu1 <= 1.0)) fail("mu1 must be in [0,1]");
    if (!(sigma0 >= 0.0)) fail("sigma0 must be >= 0");
    if (!(echogenicity >= 0.0 && echogenicity <= 1.0)) fail("echogenicity must be in [0,1]");
    if (!(pseudo_hu >= kPseudoHuMin && pseudo_hu <= kPseudoHuMax)) fail("pseudo_hu must be in [-1024,3071]");
}

TissueTable::TissueTable(std::string name, std::map<Label, AcousticProps> entries)
    : name_(std::move(name)), entries_(std::move(entries)) {
    if (entries_.empty()) throw ValidationError("tissue table has no entries");
    for (const auto& [_, p] : entries_) p.validate();
}

const AcousticProps& TissueTable::at(Label l) const {
    auto it = entries_.find(l);
    if (it == entries_.end())
        throw ValidationError("label " + std::to_string(int(l)) + " missing from tissue table '" + name_ + "'");
    return it->second;
}

LabelVolume load_label_volume(const fs::path& header_path) {
    json hdr;
    try {
        hdr = json::parse(read_text(header_path));
    } catch (const json::parse_error& e) {
        throw FormatError("malformed volume header " + header_path.string() + ": " + e.what());
    }
    std::array<int, 3> dims{};
    std::array<double, 3> spacing{};
    std::string payload_rel;
    try {
        if (hdr.at("dims").size() != 3 || hdr.at("spacing_mm").size() != 3)
            throw FormatError("dims and spacing_mm must have 3 entries");
        for (int d = 0; d < 3; ++d) {
            dims[d] = hdr["dims"][d].get<int>();
            spacing[d] = hdr["spacing_mm"][d].get<double>();
        }
        if (hdr.contains("dtype") && hdr["dtype"].get<std::string>() != "u8")
            throw FormatError("unsupported dtype " + hdr["dtype"].get<std::string>());
        payload_rel = hdr.at("payload").get<std::string>();
    } catch (const json::exception& e) {
        throw FormatError("malformed volume header " + header_path.string() + ": " + e.what());
    }
    for (int d = 0; d < 3; ++d)
        if (!(spacing[d] > 0.0)) throw FormatError("non-positive spacing in " + header_path.string());
    for (int d = 0; d < 3; ++d)
        if (dims[d] < 1) throw FormatError("dims must be >= 1 in " + header_path.string());

    const fs::path payload = header_path.parent_path() / payload_rel;
    std::ifstream in(payload, std::ios::binary);
    if (!in) throw IoError("cannot open payload " + payload.string());
    std::vector<Label> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != product(dims))
        throw FormatError("payload length mismatch: expected " + std::to_string(product(dims)) + " bytes, got " +
                          std::to_string(bytes.size()));
    return LabelVolume(dims, spacing, std::move(bytes));
}

void save_label_volume(const LabelVolume& volume, const fs::path& header_path) {
    const fs::path payload_rel = payload_path_for(header_path);
    json hdr = {
        {"dims", volume.dims()},
        {"spacing_mm", volume.spacing()},
        {"payload", payload_rel.string()},
        {"dtype", "u8"},
    };
    {
        std::ofstream out(header_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + header_path.string());
        out << hdr.dump(2) << '\n';
        if (!out) throw IoError("write failed: " + header_path.string());
    }
    const fs::path payload = header_path.parent_path() / payload_rel;
    std::ofstream out(payload, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + payload.string());
    out.write(reinterpret_cast<const char*>(volume.labels().data()),
              static_cast<std::streamsize>(volume.labels().size()));
    if (!out) throw IoError("write failed: " + payload.string());
}

LabelSlice extract_slice(const LabelVolume& volume, Axis axis, int index) {
    const auto& d = volume.dims();
    const auto& s = volume.spacing();
    const int a = static_cast<int>(axis);
    if (index < 0 || index >= d[a])
        throw ValidationError(std::string("slice index ") + std::to_string(index) + " out of range for axis " +
                              axis_name(axis) + " (size " + std::to_string(d[a]) + ")");
    switch (axis) {
        case Axis::z: {
            Grid2D<Label> g(d[0], d[1]);
            for (int j = 0; j < d[1]; ++j)
                for (int i = 0; i < d[0]; ++i) g(i, j) = volume.at(i, j, index);
            return {std::move(g), {s[0], s[1]}};
        }
        case Axis::y: {
            Grid2D<Label> g(d[0], d[2]);
            for (int k = 0; k < d[2]; ++k)
                for (int i = 0; i < d[0]; ++i) g(i, k) = volume.at(i, index, k);
            return {std::move(g), {s[0], s[2]}};
        }
        case Axis::x: {
            Grid2D<Label> g(d[1], d[2]);
            for (int k = 0; k < d[2]; ++k)
                for (int j = 0; j < d[1]; ++j) g(j, k) = volume.at(index, j, k);
            return {std::move(g), {s[1], s[2]}};
        }
    }
    throw ValidationError("bad axis");
}

TissueTable parse_tissue_table(const std::string& json_text, std::string name) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError("malformed tissue table: " + std::string(e.what()));
    }
    if (!doc.is_array()) throw FormatError("tissue table must be a JSON array");
    std::map<Label, AcousticProps> entries;
    for (const auto& item : doc) {
        AcousticProps p;
        int label = 0;
        try {
            label = item.at("label").get<int>();
            p.name = item.at("name").get<std::string>();
            p.c = item.at("c").get<double>();
            p.z = item.at("z").get<double>();
            p.alpha = item.at("alpha").get<double>();
            p.mu0 = item.at("mu0").get<double>();
            p.mu1 = item.at("mu1").get<double>();
            p.sigma0 = item.at("sigma0").get<double>();
            p.echogenicity = item.at("echogenicity").get<double>();
            p.pseudo_hu = item.at("pseudo_hu").get<double>();
        } catch (const json::exception& e) {
            throw FormatError("tissue table entry missing or invalid field: " + std::string(e.what()));
        }
        if (label < 0 || label > 255) throw ValidationError("label id out of u8 range: " + std::to_string(label));
        p.validate();
        if (!entries.emplace(static_cast<Label>(label), p).second)
            throw ValidationError("duplicate label id " + std::to_string(label));
    }
    return TissueTable(std::move(name), std::move(entries));
}

TissueTable load_tissue_table(const fs::path& path) {
    return parse_tissue_table(read_text(path), path.stem().string());
}

std::string tissue_table_to_json(const TissueTable& table) {
    json arr = json::array();
    for (const auto& [label, p] : table.entries()) {
        arr.push_back({{"label", int(label)},
                       {"name", p.name},
                       {"c", p.c},
                       {"z", p.z},
                       {"alpha", p.alpha},
                       {"mu0", p.mu0},
                       {"mu1", p.mu1},
                       {"sigma0", p.sigma0},
                       {"echogenicity", p.echogenicity},
                       {"pseudo_hu", p.pseudo_hu}});
    }
    return arr.dump(2);
}

const TissueTable& default_tissue_table() {
    // c [m/s], z [MRayl], alpha [dB/cm/MHz] from standard soft-tissue compendia.
    static const TissueTable table("default", {
        {0, {"gel", 1540, 1.54, 0.0, 0.0, 0.0, 0.0, 0.0, -1000}},
        {1, {"skin", 1615, 1.70, 0.35, 0.5, 0.5, 0.2, 0.70, 30}},
        {2, {"fat", 1450, 1.38, 0.48, 0.3, 0.35, 0.1, 0.35, -100}},
        {3, {"muscle", 1580, 1.70, 1.09, 0.6, 0.5, 0.2, 0.50, 50}},
        {4, {"bone", 3500, 7.80, 5.0, 0.8, 0.8, 0.2, 1.00, 1000}},
        {5, {"lung", 660, 0.26, 8.0, 0.5, 0.6, 0.3, 0.90, -750}},
        {6, {"liver", 1570, 1.65, 0.50, 0.7, 0.45, 0.15, 0.55, 60}},
        {7, {"blood", 1570, 1.61, 0.20, 0.01, 0.1, 0.05, 0.00, 200}},
        {8, {"vessel_wall", 1600, 1.75, 1.0, 0.8, 0.7, 0.2, 1.00, 120}},
    });
    return table;
}

ImageF synth_ct_slice(const LabelSlice& slice, const TissueTable& table) {
    // Per-label lookup, then one pass over pixels.
    std::array<double, 256> value{};
    std::array<bool, 256> known{};
    for (const auto& [label, p] : table.entries()) {
        value[label] = (p.pseudo_hu - kPseudoHuMin) / (kPseudoHuMax - kPseudoHuMin);
        known[label] = true;
    }
    ImageF out(slice.width(), slice.height());
    const auto& src = slice.labels.values();
    auto& dst = out.values();
    for (std::size_t n = 0; n < src.size(); ++n) {
        if (!known[src[n]]) (void)table.at(src[n]);
        dst[n] = value[src[n]];
    }
    return out;
}

}  // namespace cactuss
