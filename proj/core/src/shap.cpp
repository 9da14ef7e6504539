#include "survkit/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "survkit/errors.hpp"
#include "survkit/parallel.hpp"
#include "survkit/rng.hpp"

namespace survkit {

namespace {

constexpr std::size_t max_exact_features = 12;
constexpr std::size_t ordering_chunk = 64;

// Mean prediction with the features outside `mask` replaced by each
// background row's values (marginal value function).
std::vector<double> value_curve(const SurvivalModel& model, std::span<const double> x,
                                const SurvivalDataset& background, const TimeGrid& grid,
                                std::uint32_t mask) {
    const std::size_t p = x.size();
    const std::size_t m = grid.size();
    std::vector<double> acc(m, 0.0);
    std::vector<double> pred(m);
    std::vector<double> composite(p);
    for (std::size_t b = 0; b < background.n_rows(); ++b) {
        const auto row = background.row(b);
        for (std::size_t f = 0; f < p; ++f) {
            composite[f] = (mask >> f) & 1u ? x[f] : row[f];
        }
        model.predict_survival_into(composite, grid, pred);
        for (std::size_t k = 0; k < m; ++k) acc[k] += pred[k];
    }
    const double inv = 1.0 / static_cast<double>(background.n_rows());
    for (double& v : acc) v *= inv;
    return acc;
}

void check_shap_inputs(const SurvivalModel& model, std::span<const double> x,
                       const SurvivalDataset& background, const TimeGrid& grid,
                       const ShapConfig& config) {
    grid.validate();
    if (background.n_rows() == 0) throw InvalidInput("survshap_t: empty background");
    if (x.size() != model.n_features() || background.n_features() != model.n_features()) {
        throw InvalidInput("survshap_t: feature count mismatch between x, background and model");
    }
    if (config.estimator == ShapConfig::Estimator::exact &&
        x.size() > max_exact_features) {
        throw InvalidInput("survshap_t: exact estimator supports at most " +
                           std::to_string(max_exact_features) +
                           " features; use the sampling estimator");
    }
    if (config.estimator == ShapConfig::Estimator::sampling && config.n_samples < 1) {
        throw InvalidInput("survshap_t: sampling estimator needs n_samples >= 1");
    }
}

ShapAttribution survshap_exact(const SurvivalModel& model, std::span<const double> x,
                               const SurvivalDataset& background, const TimeGrid& grid,
                               const ShapConfig& config, int threads) {
    const std::size_t p = x.size();
    const std::size_t m = grid.size();
    const std::size_t n_masks = std::size_t{1} << p;

    std::vector<std::vector<double>> v(n_masks);
    parallel_for(n_masks, threads, [&](std::size_t mask) {
        v[mask] = value_curve(model, x, background, grid, static_cast<std::uint32_t>(mask));
    });

    // Shapley weight per coalition size: s! (p-1-s)! / p!.
    std::vector<double> factorial(p + 1, 1.0);
    for (std::size_t i = 1; i <= p; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);
    std::vector<double> weight(p);
    for (std::size_t s = 0; s < p; ++s) {
        weight[s] = factorial[s] * factorial[p - 1 - s] / factorial[p];
    }

    ShapAttribution out;
    out.grid = grid;
    out.config = config;
    out.baseline = v[0];
    out.prediction = v[n_masks - 1];
    out.phi.assign(p, std::vector<double>(m, 0.0));
    for (std::size_t j = 0; j < p; ++j) {
        const std::uint32_t bit = 1u << j;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const double w = weight[std::popcount(static_cast<std::uint32_t>(mask))];
            const auto& with = v[mask | bit];
            const auto& without = v[mask];
            for (std::size_t k = 0; k < m; ++k) {
                out.phi[j][k] += w * (with[k] - without[k]);
            }
        }
    }
    return out;
}

ShapAttribution survshap_sampling(const SurvivalModel& model, std::span<const double> x,
                                  const SurvivalDataset& background, const TimeGrid& grid,
                                  const ShapConfig& config, int threads) {
    const std::size_t p = x.size();
    const std::size_t m = grid.size();
    const std::size_t n_chunks = (config.n_samples + ordering_chunk - 1) / ordering_chunk;

    // Each chunk of orderings accumulates its own phi sums with a private
    // memo of value curves; chunk results are reduced in index order so the
    // output is identical for any thread count.
    std::vector<std::vector<double>> chunk_sums(n_chunks);
    parallel_for(n_chunks, threads, [&](std::size_t c) {
        const std::size_t begin = c * ordering_chunk;
        const std::size_t end = std::min(config.n_samples, begin + ordering_chunk);
        std::vector<double> sums(p * m, 0.0);
        std::unordered_map<std::uint32_t, std::vector<double>> memo;
        const auto value = [&](std::uint32_t mask) -> const std::vector<double>& {
            auto it = memo.find(mask);
            if (it == memo.end()) {
                it = memo.emplace(mask, value_curve(model, x, background, grid, mask)).first;
            }
            return it->second;
        };
        for (std::size_t o = begin; o < end; ++o) {
            Rng rng(derive_seed(config.seed, o));
            const std::vector<std::size_t> order = rng.permutation(p);
            std::uint32_t mask = 0;
            for (std::size_t f : order) {
                const std::uint32_t bit = 1u << f;
                const auto& without = value(mask);
                const auto& with = value(mask | bit);
                double* row = sums.data() + f * m;
                for (std::size_t k = 0; k < m; ++k) row[k] += with[k] - without[k];
                mask |= bit;
            }
        }
        chunk_sums[c] = std::move(sums);
    });

    ShapAttribution out;
    out.grid = grid;
    out.config = config;
    out.baseline = value_curve(model, x, background, grid, 0);
    out.prediction =
        value_curve(model, x, background, grid,
                    static_cast<std::uint32_t>((std::uint64_t{1} << p) - 1));
    out.phi.assign(p, std::vector<double>(m, 0.0));
    for (std::size_t c = 0; c < n_chunks; ++c) {
        for (std::size_t j = 0; j < p; ++j) {
            const double* row = chunk_sums[c].data() + j * m;
            for (std::size_t k = 0; k < m; ++k) out.phi[j][k] += row[k];
        }
    }
    const double inv = 1.0 / static_cast<double>(config.n_samples);
    for (auto& row : out.phi) {
        for (double& v : row) v *= inv;
    }
    return out;
}

} // namespace

SurvivalDataset shap_background(const SurvivalDataset& ds, std::size_t cap, std::uint64_t seed) {
    if (cap == 0 || ds.n_rows() <= cap) return ds;
    Rng rng(seed);
    std::vector<std::size_t> rows = rng.sample_without_replacement(ds.n_rows(), cap);
    std::sort(rows.begin(), rows.end());
    return ds.subset(rows);
}

ShapAttribution survshap_t(const SurvivalModel& model, std::span<const double> x,
                           const SurvivalDataset& background, const TimeGrid& grid,
                           const ShapConfig& config, int threads) {
    check_shap_inputs(model, x, background, grid, config);
    ShapAttribution out = config.estimator == ShapConfig::Estimator::exact
                              ? survshap_exact(model, x, background, grid, config, threads)
                              : survshap_sampling(model, x, background, grid, config, threads);
    out.feature_names.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        out.feature_names[j] = j < background.feature_names().size()
                                   ? background.feature_names()[j]
                                   : "feature_" + std::to_string(j);
    }
    return out;
}

ExplanationCurveSet sfi_t(const SurvivalModel& model, const SurvivalDataset& ds,
                          const TimeGrid& grid, const ShapConfig& config, int threads,
                          std::size_t background_cap) {
    grid.validate();
    const std::size_t n = ds.n_rows();
    const std::size_t p = ds.n_features();
    const std::size_t m = grid.size();
    const SurvivalDataset background =
        shap_background(ds, background_cap, derive_seed(config.seed, 0));

    // Substream 0 draws the background subsample; observation i uses 1 + i.
    std::vector<std::vector<std::vector<double>>> phis(n);
    parallel_for(n, threads, [&](std::size_t i) {
        ShapConfig local = config;
        local.seed = derive_seed(config.seed, 1 + i);
        phis[i] = survshap_t(model, ds.row(i), background, grid, local, 1).phi;
    });

    ExplanationCurveSet out;
    out.grid = grid;
    out.kind = ExplanationKind::shap_importance;
    out.provenance.seed = config.seed;
    out.provenance.parameters = {
        {"estimator", config.estimator == ShapConfig::Estimator::exact ? "exact" : "sampling"},
        {"background_rows", std::to_string(background.n_rows())},
    };
    if (config.estimator == ShapConfig::Estimator::sampling) {
        out.provenance.parameters.emplace_back("n_samples", std::to_string(config.n_samples));
    }
    out.curve_names = ds.feature_names();
    out.curves.assign(p, std::vector<double>(m, 0.0));
    out.dispersion.assign(p, {});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t k = 0; k < m; ++k) out.curves[j][k] += std::abs(phis[i][j][k]);
        }
    }
    for (auto& curve : out.curves) {
        for (double& v : curve) v /= static_cast<double>(n);
    }
    return out;
}

ExplanationCurveSet shap_curve_set(const ShapAttribution& attribution) {
    ExplanationCurveSet out;
    out.grid = attribution.grid;
    out.kind = ExplanationKind::shap_local;
    out.provenance.seed = attribution.config.seed;
    out.provenance.parameters = {
        {"estimator",
         attribution.config.estimator == ShapConfig::Estimator::exact ? "exact" : "sampling"},
    };
    if (attribution.config.estimator == ShapConfig::Estimator::sampling) {
        out.provenance.parameters.emplace_back("n_samples",
                                               std::to_string(attribution.config.n_samples));
    }
    out.curve_names = attribution.feature_names;
    out.curves = attribution.phi;
    out.dispersion.assign(attribution.phi.size(), {});
    out.curve_names.push_back("baseline");
    out.curves.push_back(attribution.baseline);
    out.dispersion.emplace_back();
    return out;
}

} // namespace survkit
