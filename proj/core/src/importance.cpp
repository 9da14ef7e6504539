#include "survkit/importance.hpp"

#include <cmath>

#include "survkit/errors.hpp"
#include "survkit/metrics.hpp"
#include "survkit/parallel.hpp"
#include "survkit/rng.hpp"

namespace survkit {

const char* pfi_mode_name(PfiMode mode) {
    switch (mode) {
    case PfiMode::difference: return "difference";
    case PfiMode::relative: return "relative";
    case PfiMode::absolute_difference: return "absolute-difference";
    }
    return "unknown";
}

ExplanationCurveSet gpfi_t(const SurvivalModel& model, const SurvivalDataset& ds,
                           const std::vector<FeatureGroup>& groups, const TimeGrid& grid,
                           const PfiConfig& config, int threads) {
    grid.validate();
    if (config.b < 1) throw InvalidInput("gpfi_t: permutation count b must be >= 1");
    if (groups.empty()) throw InvalidInput("gpfi_t: at least one group required");
    validate_groups(groups, ds.n_features());

    const std::size_t n = ds.n_rows();
    const std::size_t m = grid.size();
    const std::size_t b = static_cast<std::size_t>(config.b);
    const std::size_t n_groups = groups.size();

    const std::vector<StepFunction> base_preds = predict_all(model, ds, grid);
    const std::vector<double> base =
        brier_score_t(base_preds, ds.times(), ds.events(), grid).values;

    // The same b row-permutations are shared across groups: replicate i uses
    // the stream derived from (seed, i), independent of the group.
    std::vector<std::vector<std::size_t>> perms(b);
    for (std::size_t i = 0; i < b; ++i) {
        perms[i] = Rng(derive_seed(config.seed, i)).permutation(n);
    }

    std::vector<std::vector<double>> losses(n_groups * b);
    parallel_for(n_groups * b, threads, [&](std::size_t task) {
        const std::size_t g = task / b;
        const std::size_t i = task % b;
        const SurvivalDataset permuted = ds.with_group_permuted(groups[g], perms[i]);
        const std::vector<StepFunction> preds = predict_all(model, permuted, grid);
        losses[task] = brier_score_t(preds, ds.times(), ds.events(), grid).values;
    });

    ExplanationCurveSet out;
    out.grid = grid;
    out.kind = ExplanationKind::grouped_perm_importance;
    out.provenance.seed = config.seed;
    out.provenance.parameters = {
        {"metric", "brier"},
        {"b", std::to_string(config.b)},
        {"mode", pfi_mode_name(config.mode)},
    };

    std::vector<double> mean_diff(m), sd_diff(m), mean_rel(m), sd_rel(m);
    for (std::size_t g = 0; g < n_groups; ++g) {
        for (std::size_t k = 0; k < m; ++k) {
            double sum_d = 0.0, sum_r = 0.0;
            for (std::size_t i = 0; i < b; ++i) {
                const double loss = losses[g * b + i][k];
                sum_d += base[k] - loss;
                sum_r += loss / base[k];
            }
            mean_diff[k] = sum_d / static_cast<double>(b);
            mean_rel[k] = sum_r / static_cast<double>(b);
            double ss_d = 0.0, ss_r = 0.0;
            for (std::size_t i = 0; i < b; ++i) {
                const double loss = losses[g * b + i][k];
                const double dd = (base[k] - loss) - mean_diff[k];
                const double dr = loss / base[k] - mean_rel[k];
                ss_d += dd * dd;
                ss_r += dr * dr;
            }
            sd_diff[k] = b > 1 ? std::sqrt(ss_d / static_cast<double>(b - 1)) : 0.0;
            sd_rel[k] = b > 1 ? std::sqrt(ss_r / static_cast<double>(b - 1)) : 0.0;
        }

        std::vector<double> curve(m);
        switch (config.mode) {
        case PfiMode::difference: curve = mean_diff; break;
        case PfiMode::relative: curve = mean_rel; break;
        case PfiMode::absolute_difference:
            for (std::size_t k = 0; k < m; ++k) curve[k] = std::abs(mean_diff[k]);
            break;
        }
        out.curve_names.push_back(groups[g].name);
        out.curves.push_back(std::move(curve));
        out.dispersion.push_back(config.mode == PfiMode::relative ? sd_rel : sd_diff);
        if (config.mode != PfiMode::difference) {
            // The signed mean difference is always retained alongside.
            out.curve_names.push_back(groups[g].name + ":diff");
            out.curves.push_back(mean_diff);
            out.dispersion.push_back(sd_diff);
        }
    }
    return out;
}

ExplanationCurveSet pfi_t(const SurvivalModel& model, const SurvivalDataset& ds, std::size_t j,
                          const TimeGrid& grid, const PfiConfig& config, int threads) {
    if (j >= ds.n_features()) {
        throw InvalidInput("pfi_t: feature index " + std::to_string(j) + " out of bounds");
    }
    const std::vector<FeatureGroup> groups = {{ds.feature_names()[j], {j}}};
    ExplanationCurveSet out = gpfi_t(model, ds, groups, grid, config, threads);
    out.kind = ExplanationKind::perm_importance;
    return out;
}

ExplanationCurveSet pfi_all_t(const SurvivalModel& model, const SurvivalDataset& ds,
                              const TimeGrid& grid, const PfiConfig& config, int threads) {
    std::vector<FeatureGroup> groups;
    groups.reserve(ds.n_features());
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
        groups.push_back({ds.feature_names()[j], {j}});
    }
    ExplanationCurveSet out = gpfi_t(model, ds, groups, grid, config, threads);
    out.kind = ExplanationKind::perm_importance;
    return out;
}

} // namespace survkit
