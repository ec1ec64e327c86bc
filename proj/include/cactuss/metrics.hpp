#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cactuss/grid.hpp"

namespace cactuss {

struct BModeImage;

/// Binary mask; values are 0 or 1.
struct SegMask {
    Grid2D<std::uint8_t> pixels;
    double spacing = 1.0;  // mm per pixel

    SegMask() = default;
    SegMask(Grid2D<std::uint8_t> p, double spacing_mm);

    [[nodiscard]] int width() const noexcept { return pixels.width(); }
    [[nodiscard]] int height() const noexcept { return pixels.height(); }
    [[nodiscard]] std::size_t count() const noexcept;
};

/// Dice similarity 2|A n B| / (|A| + |B|); 1.0 when both masks are empty.
double dice(const SegMask& a, const SegMask& b);

/// Longest vertical run of foreground pixels over all columns, in mm.
double ap_diameter(const SegMask& mask);

struct DiameterReport {
    std::vector<std::string> names;
    std::vector<double> pred_diameters_mm;
    std::vector<double> gt_diameters_mm;
    std::vector<double> abs_errors_mm;
    std::vector<double> dsc;
    double mae = 0.0;
    double sd = 0.0;  // population standard deviation of the absolute errors
    double dsc_mean = 0.0;
    double dsc_sd = 0.0;
};

inline constexpr double kClinicalMaeToleranceMm = 8.0;
inline constexpr double kAaaThresholdMm = 30.0;

DiameterReport diameter_mae(std::span<const SegMask> preds, std::span<const SegMask> gts,
                            std::span<const std::string> names = {});

/// True when the diameter error is within the clinically accepted bound (< 8 mm).
bool clinically_acceptable(const DiameterReport& report) noexcept;

/// Aneurysm when the AP diameter exceeds 30 mm.
bool classify_aaa(double diameter_mm);

std::string report_to_json(const DiameterReport& report, const std::string& label = "run");
/// Plain-text DSC / MAE table, one row per entry in `rows`.
std::string report_table(std::span<const std::pair<std::string, DiameterReport>> rows);

/// Principal square root of a symmetric positive semidefinite matrix.
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m);

/// Gaussian summary of a feature set.
class FeatureStats {
public:
    FeatureStats(Eigen::VectorXd mu, Eigen::MatrixXd sigma, std::size_t n);

    [[nodiscard]] const Eigen::VectorXd& mu() const noexcept { return mu_; }
    [[nodiscard]] const Eigen::MatrixXd& sigma() const noexcept { return sigma_; }
    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return mu_.size(); }

private:
    Eigen::VectorXd mu_;
    Eigen::MatrixXd sigma_;
    std::size_t n_;
};

/// Sample mean and unbiased covariance.
FeatureStats accumulate_stats(std::span<const std::vector<double>> features);

/// ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2)), trace term floored at 0.
double frechet_distance(const FeatureStats& a, const FeatureStats& b);

enum class FeatureKind { pixels_16x16, hist_moments };

FeatureKind parse_feature_kind(const std::string& s);

std::vector<double> image_features(const BModeImage& image, FeatureKind kind);

}  // namespace cactuss
