#include "cactuss/edge_ir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cactuss/error.hpp"

namespace cactuss {

namespace {

int clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

ImageF gaussian_blur(const ImageF& img, double sigma) {
    if (!(sigma > 0.0)) return img;
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    for (auto& v : k) v /= sum;

    const int w = img.width();
    const int h = img.height();
    ImageF tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * img(clampi(x + i, 0, w - 1), y);
            tmp(x, y) = s;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int i = -r; i <= r; ++i) s += k[i + r] * tmp(x, clampi(y + i, 0, h - 1));
            out(x, y) = s;
        }
    return out;
}

ImageF bilateral_filter(const ImageF& img, const BilateralParams& params) {
    const int w = img.width();
    const int h = img.height();
    const int r = static_cast<int>(std::ceil(2.0 * params.sigma_spatial));
    const double inv_s = 1.0 / (2.0 * params.sigma_spatial * params.sigma_spatial);
    const double inv_r = 1.0 / (2.0 * params.sigma_range * params.sigma_range);

    std::vector<double> spatial(static_cast<std::size_t>((2 * r + 1) * (2 * r + 1)));
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
            spatial[(dy + r) * (2 * r + 1) + (dx + r)] = std::exp(-(dx * dx + dy * dy) * inv_s);

    ImageF out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double c = img(x, y);
            double num = 0.0, den = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                const int yy = clampi(y + dy, 0, h - 1);
                for (int dx = -r; dx <= r; ++dx) {
                    const double v = img(clampi(x + dx, 0, w - 1), yy);
                    const double d = v - c;
                    const double wgt = spatial[(dy + r) * (2 * r + 1) + (dx + r)] * std::exp(-d * d * inv_r);
                    num += wgt * v;
                    den += wgt;
                }
            }
            out(x, y) = num / den;
        }
    }
    return out;
}

ImageF canny(const ImageF& img, const CannyParams& params) {
    const int w = img.width();
    const int h = img.height();
    ImageF edges(w, h, 0.0);
    if (w < 3 || h < 3) return edges;

    const ImageF s = gaussian_blur(img, params.sigma);

    // Sobel gradients.
    ImageF mag(w, h, 0.0);
    Grid2D<std::uint8_t> dir(w, h, 0);  // 0: horizontal, 1: 45deg, 2: vertical, 3: 135deg
    double max_mag = 0.0;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double gx = (s(x + 1, y - 1) + 2 * s(x + 1, y) + s(x + 1, y + 1)) -
                              (s(x - 1, y - 1) + 2 * s(x - 1, y) + s(x - 1, y + 1));
            const double gy = (s(x - 1, y + 1) + 2 * s(x, y + 1) + s(x + 1, y + 1)) -
                              (s(x - 1, y - 1) + 2 * s(x, y - 1) + s(x + 1, y - 1));
            const double m = std::hypot(gx, gy);
            mag(x, y) = m;
            max_mag = std::max(max_mag, m);
            double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
            if (angle < 0) angle += 180.0;
            std::uint8_t d = 0;
            if (angle >= 22.5 && angle < 67.5)
                d = 1;
            else if (angle >= 67.5 && angle < 112.5)
                d = 2;
            else if (angle >= 112.5 && angle < 157.5)
                d = 3;
            dir(x, y) = d;
        }
    }
    // Flat images and floating-point noise on them carry no edges.
    if (max_mag < 1e-9) return edges;

    // Non-maximum suppression along the gradient direction.
    ImageF thin(w, h, 0.0);
    static constexpr int kOff[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const double m = mag(x, y);
            if (m == 0.0) continue;
            const auto& o = kOff[dir(x, y)];
            const double a = mag(x + o[0], y + o[1]);
            const double b = mag(x - o[0], y - o[1]);
            if (m > a && m >= b) thin(x, y) = m;
        }
    }

    // Hysteresis from strong seeds through 8-connected weak pixels.
    const double high = params.high_fraction * max_mag;
    const double low = params.low_fraction * max_mag;
    std::vector<std::pair<int, int>> stack;
    for (int y = 1; y < h - 1; ++y)
        for (int x = 1; x < w - 1; ++x)
            if (thin(x, y) >= high) {
                edges(x, y) = 1.0;
                stack.emplace_back(x, y);
            }
    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const int xx = x + dx, yy = y + dy;
                if (xx < 1 || yy < 1 || xx >= w - 1 || yy >= h - 1) continue;
                if (edges(xx, yy) == 0.0 && thin(xx, yy) >= low) {
                    edges(xx, yy) = 1.0;
                    stack.emplace_back(xx, yy);
                }
            }
    }
    return edges;
}

ImageF resample_to_probe_grid(const IntensitySlice& ct, const ProbeConfig& probe, OutSize out) {
    const ScanConverter geom(probe, out);
    const int w = ct.values.width();
    const int h = ct.values.height();
    const double ox = w * ct.spacing[0] / 2.0;
    ImageF img(out.width, out.height, 0.0);
    // Clamp-to-edge outside the slice so the slice border never reads as an edge.
    auto at = [&](int x, int y) -> double { return ct.values(clampi(x, 0, w - 1), clampi(y, 0, h - 1)); };
    for (int row = 0; row < out.height; ++row) {
        for (int col = 0; col < out.width; ++col) {
            const Vec3 p = geom.pixel_to_probe(col, row);
            // Continuous pixel coordinates with centres at integer + 0.5.
            const double fx = (p.x + ox) / ct.spacing[0] - 0.5;
            const double fy = p.y / ct.spacing[1] - 0.5;
            const int x0 = static_cast<int>(std::floor(fx));
            const int y0 = static_cast<int>(std::floor(fy));
            const double ax = fx - x0, ay = fy - y0;
            img(col, row) = (1 - ay) * ((1 - ax) * at(x0, y0) + ax * at(x0 + 1, y0)) +
                            ay * ((1 - ax) * at(x0, y0 + 1) + ax * at(x0 + 1, y0 + 1));
        }
    }
    return img;
}

BModeImage render_edge_ir(const IntensitySlice& ct, const ProbeConfig& probe, OutSize out,
                          const BilateralParams& bilateral, const CannyParams& canny_params) {
    for (double v : ct.values.values())
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("CT slice intensities must lie in [0, 1]");
    const ScanConverter geom(probe, out);
    const ImageF resampled = resample_to_probe_grid(ct, probe, out);
    ImageF edges = canny(bilateral_filter(resampled, bilateral), canny_params);
    const auto& m = geom.mask();
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            if (!m(x, y)) edges(x, y) = 0.0;
    return BModeImage{std::move(edges), m, geom.spacing()};
}

}  // namespace cactuss
