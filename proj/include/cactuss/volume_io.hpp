#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cactuss/grid.hpp"

namespace cactuss {

using Label = std::uint8_t;

enum class Axis { x = 0, y = 1, z = 2 };

Axis parse_axis(const std::string& s);
const char* axis_name(Axis a) noexcept;

/// Labeled 3-D grid. Voxel (i, j, k) lives at labels[i + nx*(j + ny*k)].
/// The y axis runs anterior to posterior; an axial slice is a cut at fixed z.
class LabelVolume {
public:
    LabelVolume(std::array<int, 3> dims, std::array<double, 3> spacing_mm, std::vector<Label> labels);
    LabelVolume(std::array<int, 3> dims, std::array<double, 3> spacing_mm, Label fill = 0);

    [[nodiscard]] const std::array<int, 3>& dims() const noexcept { return dims_; }
    [[nodiscard]] const std::array<double, 3>& spacing() const noexcept { return spacing_; }
    [[nodiscard]] const std::vector<Label>& labels() const noexcept { return labels_; }
    [[nodiscard]] std::size_t voxel_count() const noexcept { return labels_.size(); }

    [[nodiscard]] std::size_t index(int i, int j, int k) const noexcept {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(dims_[0]) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(k));
    }
    [[nodiscard]] Label at(int i, int j, int k) const noexcept { return labels_[index(i, j, k)]; }
    void set(int i, int j, int k, Label v) noexcept { labels_[index(i, j, k)] = v; }

    bool operator==(const LabelVolume&) const = default;

private:
    std::array<int, 3> dims_;
    std::array<double, 3> spacing_;
    std::vector<Label> labels_;
};

/// Axis-aligned 2-D cut of a LabelVolume. Column index is the first remaining
/// volume axis, row index the second.
struct LabelSlice {
    Grid2D<Label> labels;
    std::array<double, 2> spacing{1.0, 1.0};  // mm per column, mm per row

    LabelSlice() = default;
    LabelSlice(Grid2D<Label> l, std::array<double, 2> s);

    [[nodiscard]] int width() const noexcept { return labels.width(); }
    [[nodiscard]] int height() const noexcept { return labels.height(); }
};

/// Per-tissue acoustic and appearance parameters.
struct AcousticProps {
    std::string name;
    double c = 1540.0;        // speed of sound, m/s
    double z = 1.54;          // acoustic impedance, MRayl
    double alpha = 0.0;       // attenuation, dB / (cm MHz)
    double mu0 = 0.0;         // scatterer density
    double mu1 = 0.0;         // scatterer amplitude mean
    double sigma0 = 0.0;      // scatterer amplitude std
    double echogenicity = 0;  // IR brightness in [0, 1]
    double pseudo_hu = 0.0;   // CT-like intensity

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

class TissueTable {
public:
    TissueTable(std::string name, std::map<Label, AcousticProps> entries);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::map<Label, AcousticProps>& entries() const noexcept { return entries_; }
    [[nodiscard]] bool contains(Label l) const noexcept { return entries_.count(l) != 0; }
    /// Throws ValidationError for an unknown label.
    [[nodiscard]] const AcousticProps& at(Label l) const;

private:
    std::string name_;
    std::map<Label, AcousticProps> entries_;
};

LabelVolume load_label_volume(const std::filesystem::path& header_path);
void save_label_volume(const LabelVolume& volume, const std::filesystem::path& header_path);

LabelSlice extract_slice(const LabelVolume& volume, Axis axis, int index);

TissueTable load_tissue_table(const std::filesystem::path& path);
TissueTable parse_tissue_table(const std::string& json_text, std::string name = "inline");
std::string tissue_table_to_json(const TissueTable& table);

/// Compendium-style defaults for the phantom label scheme (ids 0..8).
const TissueTable& default_tissue_table();

inline constexpr double kPseudoHuMin = -1024.0;
inline constexpr double kPseudoHuMax = 3071.0;

/// Pixel value = pseudo_hu of the pixel's tissue rescaled from [-1024, 3071] to [0, 1].
ImageF synth_ct_slice(const LabelSlice& slice, const TissueTable& table);

}  // namespace cactuss
