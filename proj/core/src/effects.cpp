#include "survkit/effects.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "survkit/errors.hpp"
#include "survkit/format.hpp"
#include "survkit/parallel.hpp"

namespace survkit {

namespace {

void check_feature_index(std::size_t j, std::size_t p) {
    if (j >= p) {
        throw InvalidInput("feature index " + std::to_string(j) + " out of bounds (p = " +
                           std::to_string(p) + ")");
    }
}

bool is_zero_one_kind(FeatureKind kind) {
    return kind == FeatureKind::binary || kind == FeatureKind::categorical_encoded;
}

} // namespace

std::vector<double> default_z_values(const SurvivalDataset& ds, std::size_t j) {
    check_feature_index(j, ds.n_features());
    if (is_zero_one_kind(ds.feature_kinds()[j])) return {0.0, 1.0};

    std::vector<double> col(ds.n_rows());
    for (std::size_t i = 0; i < ds.n_rows(); ++i) col[i] = ds.at(i, j);
    std::sort(col.begin(), col.end());
    std::vector<double> z;
    for (int k = 0; k <= 10; ++k) {
        const double h = static_cast<double>(k) / 10.0 * static_cast<double>(col.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, col.size() - 1);
        const double v = col[lo] + (h - std::floor(h)) * (col[hi] - col[lo]);
        if (z.empty() || v != z.back()) z.push_back(v);
    }
    return z;
}

ExplanationCurveSet ice_t(const SurvivalModel& model, std::span<const double> x, std::size_t j,
                          std::span<const double> z_values, const TimeGrid& grid) {
    check_feature_index(j, model.n_features());
    if (z_values.empty()) throw InvalidInput("ice_t: z_values must be non-empty");
    grid.validate();

    ExplanationCurveSet out;
    out.grid = grid;
    out.kind = ExplanationKind::ice;
    out.provenance.parameters = {{"feature", std::to_string(j)}};
    std::vector<double> xz(x.begin(), x.end());
    for (double z : z_values) {
        xz[j] = z;
        std::vector<double> values(grid.size());
        model.predict_survival_into(xz, grid, values);
        out.curve_names.push_back(format_number(z));
        out.curves.push_back(std::move(values));
        out.dispersion.emplace_back();
    }
    return out;
}

ExplanationCurveSet pdp_t(const SurvivalModel& model, const SurvivalDataset& ds, std::size_t j,
                          std::span<const double> z_values, const TimeGrid& grid, int threads) {
    check_feature_index(j, ds.n_features());
    if (z_values.empty()) throw InvalidInput("pdp_t: z_values must be non-empty");
    grid.validate();
    const std::size_t n = ds.n_rows();
    const std::size_t m = grid.size();

    ExplanationCurveSet out;
    out.grid = grid;
    out.kind = ExplanationKind::pdp;
    out.provenance.parameters = {{"feature", std::to_string(j)}};
    out.curves.resize(z_values.size());
    out.dispersion.resize(z_values.size());
    out.curve_names.resize(z_values.size());

    parallel_for(z_values.size(), threads, [&](std::size_t zi) {
        const double z = z_values[zi];
        std::vector<double> mean(m, 0.0);
        std::vector<double> m2(m, 0.0);
        std::vector<double> pred(m);
        std::vector<double> xz(ds.n_features());
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = ds.row(i);
            std::copy(row.begin(), row.end(), xz.begin());
            xz[j] = z;
            model.predict_survival_into(xz, grid, pred);
            // Welford update per grid point.
            for (std::size_t k = 0; k < m; ++k) {
                const double delta = pred[k] - mean[k];
                mean[k] += delta / static_cast<double>(i + 1);
                m2[k] += delta * (pred[k] - mean[k]);
            }
        }
        std::vector<double> sd(m);
        for (std::size_t k = 0; k < m; ++k) sd[k] = std::sqrt(m2[k] / static_cast<double>(n));
        out.curve_names[zi] = format_number(z);
        out.curves[zi] = std::move(mean);
        out.dispersion[zi] = std::move(sd);
    });

    const bool has_zero = std::find(z_values.begin(), z_values.end(), 0.0) != z_values.end();
    const bool has_one = std::find(z_values.begin(), z_values.end(), 1.0) != z_values.end();
    if (is_zero_one_kind(ds.feature_kinds()[j]) && has_zero && has_one) {
        // Mean per-observation relative difference between the z=1 and z=0
        // predictions; observations with a zero denominator are skipped.
        std::vector<double> mean(m, 0.0);
        std::vector<double> m2(m, 0.0);
        std::vector<std::size_t> count(m, 0);
        std::vector<double> p0(m), p1(m);
        std::vector<double> xz(ds.n_features());
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = ds.row(i);
            std::copy(row.begin(), row.end(), xz.begin());
            xz[j] = 0.0;
            model.predict_survival_into(xz, grid, p0);
            xz[j] = 1.0;
            model.predict_survival_into(xz, grid, p1);
            for (std::size_t k = 0; k < m; ++k) {
                if (p0[k] == 0.0) continue;
                const double r = (p1[k] - p0[k]) / p0[k];
                ++count[k];
                const double delta = r - mean[k];
                mean[k] += delta / static_cast<double>(count[k]);
                m2[k] += delta * (r - mean[k]);
            }
        }
        std::vector<double> sd(m);
        for (std::size_t k = 0; k < m; ++k) {
            if (count[k] == 0) {
                mean[k] = std::numeric_limits<double>::quiet_NaN();
                sd[k] = std::numeric_limits<double>::quiet_NaN();
            } else {
                sd[k] = std::sqrt(m2[k] / static_cast<double>(count[k]));
            }
        }
        out.curve_names.push_back("relative_difference");
        out.curves.push_back(std::move(mean));
        out.dispersion.push_back(std::move(sd));
    }
    return out;
}

} // namespace survkit
