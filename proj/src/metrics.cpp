#include "cactuss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "cactuss/error.hpp"
#include "cactuss/probe_geometry.hpp"

namespace cactuss {

SegMask::SegMask(Grid2D<std::uint8_t> p, double spacing_mm) : pixels(std::move(p)), spacing(spacing_mm) {
    if (!(spacing > 0.0)) throw ValidationError("mask spacing must be > 0");
    for (auto v : pixels.values())
        if (v > 1) throw ValidationError("mask values must be 0 or 1");
}

std::size_t SegMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(pixels.values().begin(), pixels.values().end(), std::uint8_t{1}));
}

double dice(const SegMask& a, const SegMask& b) {
    if (a.width() != b.width() || a.height() != b.height()) throw ValidationError("dice: mask dimensions differ");
    std::size_t inter = 0, na = 0, nb = 0;
    const auto& va = a.pixels.values();
    const auto& vb = b.pixels.values();
    for (std::size_t i = 0; i < va.size(); ++i) {
        na += va[i];
        nb += vb[i];
        inter += va[i] & vb[i];
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * double(inter) / double(na + nb);
}

double ap_diameter(const SegMask& mask) {
    int best = 0;
    for (int x = 0; x < mask.width(); ++x) {
        int run = 0;
        for (int y = 0; y < mask.height(); ++y) {
            run = mask.pixels(x, y) ? run + 1 : 0;
            best = std::max(best, run);
        }
    }
    if (best == 0) throw ValidationError("ap_diameter: mask is empty");
    return best * mask.spacing;
}

namespace {

std::pair<double, double> mean_sd(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    double m = 0.0;
    for (double x : v) m += x;
    m /= double(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / double(v.size()))};
}

}  // namespace

DiameterReport diameter_mae(std::span<const SegMask> preds, std::span<const SegMask> gts,
                            std::span<const std::string> names) {
    if (preds.size() != gts.size()) throw ValidationError("diameter_mae: prediction and ground-truth counts differ");
    if (preds.empty()) throw ValidationError("diameter_mae: no masks");
    if (!names.empty() && names.size() != preds.size()) throw ValidationError("diameter_mae: name count mismatch");
    DiameterReport r;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const SegMask& p = preds[i];
        const SegMask& g = gts[i];
        const std::string name = names.empty() ? std::to_string(i) : names[i];
        if (p.width() != g.width() || p.height() != g.height())
            throw ValidationError("diameter_mae: dimension mismatch for " + name);
        if (std::abs(p.spacing - g.spacing) > 1e-12)
            throw ValidationError("diameter_mae: spacing mismatch for " + name);
        if (g.count() == 0) throw ValidationError("diameter_mae: empty ground-truth mask " + name);
        // A missed detection measures as zero diameter.
        const double dp = p.count() == 0 ? 0.0 : ap_diameter(p);
        const double dg = ap_diameter(g);
        r.names.push_back(name);
        r.pred_diameters_mm.push_back(dp);
        r.gt_diameters_mm.push_back(dg);
        r.abs_errors_mm.push_back(std::abs(dp - dg));
        r.dsc.push_back(dice(p, g));
    }
    std::tie(r.mae, r.sd) = mean_sd(r.abs_errors_mm);
    std::tie(r.dsc_mean, r.dsc_sd) = mean_sd(r.dsc);
    return r;
}

bool clinically_acceptable(const DiameterReport& report) noexcept {
    return report.mae < kClinicalMaeToleranceMm;
}

bool classify_aaa(double diameter_mm) {
    if (!(diameter_mm >= 0.0)) throw ValidationError("classify_aaa: diameter must be >= 0");
    return diameter_mm > kAaaThresholdMm;
}

std::string report_to_json(const DiameterReport& r, const std::string& label) {
    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t i = 0; i < r.names.size(); ++i)
        frames.push_back({{"name", r.names[i]},
                          {"pred_diameter_mm", r.pred_diameters_mm[i]},
                          {"gt_diameter_mm", r.gt_diameters_mm[i]},
                          {"abs_error_mm", r.abs_errors_mm[i]},
                          {"dsc", r.dsc[i]}});
    nlohmann::json doc = {{"label", label},
                          {"n", r.names.size()},
                          {"dsc_mean", r.dsc_mean},
                          {"dsc_sd", r.dsc_sd},
                          {"mae_mm", r.mae},
                          {"sd_mm", r.sd},
                          {"clinically_acceptable", clinically_acceptable(r)},
                          {"frames", frames}};
    return doc.dump(2);
}

std::string report_table(std::span<const std::pair<std::string, DiameterReport>> rows) {
    std::size_t name_w = 6;
    for (const auto& [name, _] : rows) name_w = std::max(name_w, name.size());
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-*s | %-17s | %-15s\n", int(name_w), "Method", "DSC", "MAE [mm]");
    os << buf << std::string(name_w, '-') << "-+-------------------+----------------\n";
    for (const auto& [name, r] : rows) {
        std::snprintf(buf, sizeof buf, "%-*s | %6.3f +/- %6.3f | %5.2f +/- %5.2f\n", int(name_w), name.c_str(),
                      r.dsc_mean, r.dsc_sd, r.mae, r.sd);
        os << buf;
    }
    return os.str();
}

namespace {

double tolerance_for(const Eigen::MatrixXd& m) {
    return 1e-8 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

}  // namespace

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ValidationError("matrix_sqrt_psd: matrix is not square");
    if (m.size() == 0) return m;
    const double tol = tolerance_for(m);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol)
        throw ValidationError("matrix_sqrt_psd: matrix is not symmetric");
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) throw ValidationError("matrix_sqrt_psd: eigendecomposition failed");
    Eigen::VectorXd ev = eig.eigenvalues();
    if (ev.minCoeff() < -tol) throw ValidationError("matrix_sqrt_psd: matrix is not positive semidefinite");
    // Eigenvalues under the solver's round-off floor are treated as exact zeros.
    const double floor = double(m.rows()) * std::numeric_limits<double>::epsilon() * std::max(0.0, ev.maxCoeff());
    for (auto& e : ev) e = e > floor ? std::sqrt(e) : 0.0;
    const Eigen::MatrixXd& v = eig.eigenvectors();
    Eigen::MatrixXd s = v * ev.asDiagonal() * v.transpose();
    return 0.5 * (s + s.transpose());
}

FeatureStats::FeatureStats(Eigen::VectorXd mu, Eigen::MatrixXd sigma, std::size_t n)
    : mu_(std::move(mu)), sigma_(std::move(sigma)), n_(n) {
    if (n_ < 2) throw ValidationError("FeatureStats needs at least 2 samples");
    if (sigma_.rows() != mu_.size() || sigma_.cols() != mu_.size())
        throw ValidationError("FeatureStats: covariance shape does not match mean");
    sigma_ = 0.5 * (sigma_ + sigma_.transpose());
    if (mu_.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -tolerance_for(sigma_))
            throw ValidationError("FeatureStats: covariance is not positive semidefinite");
    }
}

FeatureStats accumulate_stats(std::span<const std::vector<double>> features) {
    if (features.size() < 2) throw ValidationError("accumulate_stats: need at least 2 feature vectors");
    const std::size_t k = features.front().size();
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
    for (const auto& f : features) {
        if (f.size() != k) throw ValidationError("accumulate_stats: feature lengths differ");
        mu += Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(k));
    }
    const double n = double(features.size());
    mu /= n;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(mu.size(), mu.size());
    for (const auto& f : features) {
        const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(f.data(), mu.size()) - mu;
        sigma.selfadjointView<Eigen::Lower>().rankUpdate(d);
    }
    sigma = sigma.selfadjointView<Eigen::Lower>();
    sigma /= (n - 1.0);
    return FeatureStats(std::move(mu), std::move(sigma), features.size());
}

double frechet_distance(const FeatureStats& a, const FeatureStats& b) {
    if (a.dim() != b.dim()) throw ValidationError("frechet_distance: feature dimensions differ");
    const double mean_term = (a.mu() - b.mu()).squaredNorm();
    // Tr((S_a S_b)^(1/2)) == Tr((S_a^(1/2) S_b S_a^(1/2))^(1/2)); the inner product is symmetric PSD.
    const Eigen::MatrixXd ra = matrix_sqrt_psd(a.sigma());
    Eigen::MatrixXd inner = ra * b.sigma() * ra;
    inner = 0.5 * (inner + inner.transpose());
    const double cross = matrix_sqrt_psd(inner).trace();
    const double trace_term = a.sigma().trace() + b.sigma().trace() - 2.0 * cross;
    return mean_term + std::max(0.0, trace_term);
}

FeatureKind parse_feature_kind(const std::string& s) {
    if (s == "pixels_16x16") return FeatureKind::pixels_16x16;
    if (s == "hist_moments") return FeatureKind::hist_moments;
    throw ValidationError("unknown feature kind '" + s + "'");
}

namespace {

/// Area-weighted box downsample to out x out cells.
std::vector<double> area_downsample(const ImageF& img, int out) {
    const int w = img.width();
    const int h = img.height();
    std::vector<double> f(static_cast<std::size_t>(out) * out, 0.0);
    const double cw = double(w) / out;
    const double ch = double(h) / out;
    for (int cy = 0; cy < out; ++cy) {
        const double y0 = cy * ch, y1 = (cy + 1) * ch;
        for (int cx = 0; cx < out; ++cx) {
            const double x0 = cx * cw, x1 = (cx + 1) * cw;
            double sum = 0.0, area = 0.0;
            for (int y = static_cast<int>(y0); y < std::min(h, static_cast<int>(std::ceil(y1))); ++y) {
                const double oy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
                if (oy <= 0) continue;
                for (int x = static_cast<int>(x0); x < std::min(w, static_cast<int>(std::ceil(x1))); ++x) {
                    const double ox = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
                    if (ox <= 0) continue;
                    sum += ox * oy * img(x, y);
                    area += ox * oy;
                }
            }
            f[static_cast<std::size_t>(cy) * out + cx] = area > 0 ? sum / area : 0.0;
        }
    }
    return f;
}

}  // namespace

std::vector<double> image_features(const BModeImage& image, FeatureKind kind) {
    if (kind == FeatureKind::pixels_16x16) return area_downsample(image.pixels, 16);

    constexpr int kBins = 32;
    std::vector<double> f(4 + kBins, 0.0);
    std::vector<double> vals;
    for (std::size_t i = 0; i < image.pixels.size(); ++i)
        if (image.mask.values()[i]) vals.push_back(image.pixels.values()[i]);
    if (vals.empty()) return f;
    const double n = double(vals.size());
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : vals) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const double sd = std::sqrt(m2);
    f[0] = mean;
    f[1] = sd;
    if (sd > 1e-12) {
        f[2] = m3 / (sd * sd * sd);
        f[3] = m4 / (m2 * m2) - 3.0;
    }
    for (double v : vals) {
        const int b = std::clamp(static_cast<int>(v * kBins), 0, kBins - 1);
        f[4 + b] += 1.0 / n;
    }
    return f;
}

}  // namespace cactuss
