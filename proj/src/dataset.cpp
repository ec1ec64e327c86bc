#include "cactuss/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "cactuss/config.hpp"
#include "cactuss/edge_ir.hpp"
#include "cactuss/error.hpp"
#include "cactuss/png_io.hpp"
#include "cactuss/rng.hpp"

namespace cactuss {

namespace fs = std::filesystem;
using nlohmann::json;

void DatasetConfig::validate() const {
    if (sources.empty()) throw ValidationError("dataset needs at least one source");
    if (frames < 1) throw ValidationError("frames must be >= 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ValidationError("split_ratio must be in (0, 1)");
    if (out_size.width < 2 || out_size.height < 2) throw ValidationError("out_size must be at least 2x2");
    probe.validate();
    sim.validate();
    augment.validate();
}

DatasetConfig dataset_config_from_json(const json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw FormatError("dataset config must be a JSON object");
    static const std::set<std::string> known = {"sources", "frames",      "out_size",    "probe",  "sim",
                                                "augment", "split_ratio", "master_seed", "tissues"};
    for (const auto& [k, _] : j.items())
        if (!known.count(k)) throw FormatError("dataset config: unknown field '" + k + "'");

    DatasetConfig c;
    try {
        for (const auto& s : j.at("sources")) {
            if (s.is_string()) {
                fs::path p = s.get<std::string>();
                c.sources.emplace_back(p.is_absolute() ? p : base_dir / p);
            } else {
                c.sources.emplace_back(phantom_from_json(s));
            }
        }
        if (j.contains("frames")) c.frames = j["frames"].get<int>();
        if (j.contains("out_size")) {
            const auto& o = j["out_size"];
            if (o.size() != 2) throw FormatError("out_size must be [width, height]");
            c.out_size = {o[0].get<int>(), o[1].get<int>()};
        }
        if (j.contains("probe")) c.probe = probe_from_json(j["probe"]);
        if (j.contains("sim")) c.sim = sim_from_json(j["sim"]);
        if (j.contains("augment")) c.augment = augment_from_json(j["augment"]);
        if (j.contains("split_ratio")) c.split_ratio = j["split_ratio"].get<double>();
        if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
        if (j.contains("tissues")) {
            fs::path p = j["tissues"].get<std::string>();
            c.tissues = p.is_absolute() ? p : base_dir / p;
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("dataset config: ") + e.what());
    }
    c.validate();
    return c;
}

namespace {

json augment_params_json(const AugmentParams& p) {
    return {{"angle_deg", p.angle_deg},
            {"tx_frac", p.tx_frac},
            {"ty_frac", p.ty_frac},
            {"scale", p.scale},
            {"noise_sd", p.noise_sd},
            {"noise_seed", p.noise_seed}};
}

std::string entry_stem(int id, int frames) {
    const int digits = std::max(5, static_cast<int>(std::to_string(std::max(frames - 1, 0)).size()));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*d", digits, id);
    return buf;
}

}  // namespace

std::string manifest_line(const ManifestEntry& e) {
    json j = {{"id", e.id},
              {"source", e.source},
              {"axis", axis_name(e.axis)},
              {"index", e.index},
              {"image", e.image},
              {"mask", e.mask},
              {"seed", e.seed},
              {"augment", e.augment ? augment_params_json(*e.augment) : json(nullptr)},
              {"split", e.split == Split::train ? "train" : "val"}};
    return j.dump();
}

ManifestEntry manifest_entry_from_json(const json& j) {
    ManifestEntry e;
    try {
        e.id = j.at("id").get<int>();
        e.source = j.at("source").get<std::string>();
        e.axis = parse_axis(j.at("axis").get<std::string>());
        e.index = j.at("index").get<int>();
        e.image = j.at("image").get<std::string>();
        e.mask = j.at("mask").get<std::string>();
        e.seed = j.at("seed").get<std::uint64_t>();
        if (const auto& a = j.at("augment"); !a.is_null()) {
            AugmentParams p;
            p.angle_deg = a.at("angle_deg").get<double>();
            p.tx_frac = a.at("tx_frac").get<double>();
            p.ty_frac = a.at("ty_frac").get<double>();
            p.scale = a.at("scale").get<double>();
            p.noise_sd = a.at("noise_sd").get<double>();
            p.noise_seed = a.at("noise_seed").get<std::uint64_t>();
            e.augment = p;
        }
        const std::string split = j.at("split").get<std::string>();
        if (split != "train" && split != "val") throw FormatError("bad split '" + split + "'");
        e.split = split == "train" ? Split::train : Split::val;
    } catch (const json::exception& ex) {
        throw FormatError(std::string("manifest entry: ") + ex.what());
    }
    return e;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<ManifestEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            out.push_back(manifest_entry_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw FormatError("malformed manifest line: " + std::string(e.what()));
        }
    }
    return out;
}

RenderedPair render_pair(const LabelVolume& volume, int index, const TissueTable& table, const ProbeConfig& probe,
                         const SimConfig& sim, OutSize out) {
    const LabelSlice slice = extract_slice(volume, Axis::z, index);
    BModeImage image;
    if (sim.mode == RenderMode::edge_ir)
        image = render_edge_ir({synth_ct_slice(slice, table), slice.spacing}, probe, out);
    else
        image = render(slice, table, probe, sim, out);

    Grid2D<std::uint8_t> lumen(slice.width(), slice.height(), 0);
    for (std::size_t i = 0; i < lumen.size(); ++i) lumen.values()[i] = slice.labels.values()[i] == labels::kBlood;
    const BModeImage m = scan_convert(mask_fan(lumen, slice.spacing, probe), out, Interp::nearest);
    Grid2D<std::uint8_t> px(out.width, out.height, 0);
    for (std::size_t i = 0; i < px.size(); ++i) px.values()[i] = m.pixels.values()[i] > 0.5 ? 1 : 0;
    return {std::move(image), SegMask(std::move(px), m.spacing)};
}

SplitResult split_manifest(std::vector<ManifestEntry> manifest, double ratio, std::uint64_t seed) {
    if (manifest.empty()) throw ValidationError("split_manifest: manifest is empty");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split_manifest: ratio must be in (0, 1)");
    std::mt19937_64 eng(seed);
    std::shuffle(manifest.begin(), manifest.end(), eng);
    const auto n = manifest.size();
    const auto n_train = static_cast<std::size_t>(std::llround(ratio * double(n)));
    SplitResult r;
    for (std::size_t i = 0; i < n; ++i) {
        ManifestEntry e = std::move(manifest[i]);
        e.split = i < n_train ? Split::train : Split::val;
        (i < n_train ? r.train : r.val).push_back(std::move(e));
    }
    auto by_id = [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; };
    std::sort(r.train.begin(), r.train.end(), by_id);
    std::sort(r.val.begin(), r.val.end(), by_id);
    if (r.train.empty() || r.val.empty())
        r.warning = "degenerate split: " + std::to_string(r.train.size()) + " train / " +
                    std::to_string(r.val.size()) + " val";
    return r;
}

DatasetResult generate_dataset(const DatasetConfig& config, const fs::path& out_dir, int workers) {
    config.validate();
    const TissueTable table = config.tissues ? load_tissue_table(*config.tissues) : default_tissue_table();

    std::vector<LabelVolume> volumes;
    std::vector<std::string> names;
    for (std::size_t s = 0; s < config.sources.size(); ++s) {
        if (const auto* p = std::get_if<fs::path>(&config.sources[s])) {
            volumes.push_back(load_label_volume(*p));
            names.push_back(p->string());
        } else {
            volumes.push_back(generate_phantom(std::get<PhantomSpec>(config.sources[s])));
            names.push_back("phantom:" + std::to_string(s));
        }
    }

    std::error_code ec;
    fs::create_directories(out_dir / "images", ec);
    fs::create_directories(out_dir / "masks", ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const int n = config.frames;
    std::vector<ManifestEntry> entries(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::map<int, std::string> errors;

    auto job = [&](int i) {
        ManifestEntry& e = entries[static_cast<std::size_t>(i)];
        e.id = i;
        e.seed = derive_seed(config.master_seed, {static_cast<std::uint64_t>(i)});
        std::mt19937_64 eng(e.seed);
        const auto src = std::min<std::size_t>(static_cast<std::size_t>(uniform01(eng) * double(volumes.size())),
                                               volumes.size() - 1);
        const int nz = volumes[src].dims()[2];
        e.source = names[src];
        e.axis = Axis::z;
        e.index = std::min(static_cast<int>(uniform01(eng) * nz), nz - 1);

        SimConfig sim = config.sim;
        sim.rng_seed = e.seed;
        RenderedPair pair = render_pair(volumes[src], e.index, table, config.probe, sim, config.out_size);
        if (config.augment.enabled) {
            const AugmentParams params = draw_augment(config.augment, derive_seed(e.seed, {0xa06ULL}));
            auto [img, mask] = apply_augment(pair.image, pair.mask, params);
            pair = {std::move(img), std::move(mask)};
            e.augment = params;
        }
        const std::string stem = entry_stem(i, n);
        e.image = "images/" + stem + ".png";
        e.mask = "masks/" + stem + ".png";
        write_png(out_dir / e.image, to_gray8(pair.image.pixels));
        write_png(out_dir / e.mask, mask_to_gray8(pair.mask));
    };

    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                job(i);
            } catch (const std::exception& ex) {
                std::lock_guard lock(err_mutex);
                errors.emplace(i, ex.what());
            }
        }
    };
    workers = std::clamp(workers, 1, n);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (!errors.empty()) {
        const auto& [i, msg] = *errors.begin();
        throw Error("dataset entry " + std::to_string(i) + ": " + msg);
    }

    SplitResult split = split_manifest(entries, config.split_ratio, derive_seed(config.master_seed, {0x5b17ULL}));
    for (const auto& e : split.val) entries[static_cast<std::size_t>(e.id)].split = Split::val;

    std::ofstream out(out_dir / "manifest.jsonl", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest in " + out_dir.string());
    for (const auto& e : entries) out << manifest_line(e) << '\n';
    if (!out) throw IoError("manifest write failed");

    DatasetResult result{std::move(entries), {}};
    if (split.warning) result.warnings.push_back(*split.warning);
    return result;
}

DiameterReport evaluate_run(const fs::path& pred_dir, const fs::path& gt_dir, double spacing_mm) {
    auto list_pngs = [](const fs::path& dir) {
        if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
        std::set<std::string> names;
        for (const auto& de : fs::directory_iterator(dir))
            if (de.is_regular_file() && de.path().extension() == ".png") names.insert(de.path().filename().string());
        return names;
    };
    const auto preds = list_pngs(pred_dir);
    const auto gts = list_pngs(gt_dir);
    std::vector<std::string> unmatched;
    std::set_symmetric_difference(preds.begin(), preds.end(), gts.begin(), gts.end(), std::back_inserter(unmatched));
    if (!unmatched.empty()) {
        std::string list;
        for (const auto& u : unmatched) list += (list.empty() ? "" : ", ") + u;
        throw ValidationError("unmatched filenames: " + list);
    }
    if (gts.empty()) throw ValidationError("no mask PNGs in " + gt_dir.string());

    std::vector<SegMask> p, g;
    std::vector<std::string> names(gts.begin(), gts.end());
    for (const auto& name : names) {
        p.push_back(gray8_to_mask(read_png(pred_dir / name), spacing_mm));
        g.push_back(gray8_to_mask(read_png(gt_dir / name), spacing_mm));
    }
    return diameter_mae(p, g, names);
}

}  // namespace cactuss
