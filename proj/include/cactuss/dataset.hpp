#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cactuss/augment.hpp"
#include "cactuss/metrics.hpp"
#include "cactuss/phantom.hpp"
#include "cactuss/probe_geometry.hpp"
#include "cactuss/raytracer.hpp"

namespace cactuss {

/// A volume on disk or a phantom generated on the fly.
using DatasetSource = std::variant<std::filesystem::path, PhantomSpec>;

struct DatasetConfig {
    std::vector<DatasetSource> sources;
    int frames = 5000;
    OutSize out_size{256, 256};
    ProbeConfig probe;
    SimConfig sim;
    AugmentConfig augment;
    double split_ratio = 0.8;
    std::uint64_t master_seed = 0;
    std::optional<std::filesystem::path> tissues;  // default table when absent

    void validate() const;
};

/// Relative paths in the file (volume sources, tissues) resolve against `base_dir`.
DatasetConfig dataset_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

enum class Split { train, val };

struct ManifestEntry {
    int id = 0;
    std::string source;
    Axis axis = Axis::z;
    int index = 0;
    std::string image;  // relative to the dataset directory
    std::string mask;
    std::uint64_t seed = 0;
    std::optional<AugmentParams> augment;
    Split split = Split::train;
};

std::string manifest_line(const ManifestEntry& e);
ManifestEntry manifest_entry_from_json(const nlohmann::json& j);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// One rendered, pixel-aligned image / mask pair.
struct RenderedPair {
    BModeImage image;
    SegMask mask;
};

/// Renders slice `index` along z of `volume` in the configured mode, and the
/// aorta mask through the same fan geometry with nearest-neighbour conversion.
RenderedPair render_pair(const LabelVolume& volume, int index, const TissueTable& table, const ProbeConfig& probe,
                         const SimConfig& sim, OutSize out);

struct DatasetResult {
    std::vector<ManifestEntry> manifest;
    std::vector<std::string> warnings;
};

/// Renders `config.frames` entries into out_dir/{images,masks}/NNNNN.png and
/// writes out_dir/manifest.jsonl. Output depends only on `config`.
DatasetResult generate_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir, int workers = 1);

struct SplitResult {
    std::vector<ManifestEntry> train;
    std::vector<ManifestEntry> val;
    std::optional<std::string> warning;  // set when either side is empty
};

SplitResult split_manifest(std::vector<ManifestEntry> manifest, double ratio, std::uint64_t seed);

/// Pairs same-named mask PNGs from the two directories and measures them.
DiameterReport evaluate_run(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                            double spacing_mm);

}  // namespace cactuss
