#pragma once

#include <cstdint>
#include <span>

#include "survkit/dataset.hpp"
#include "survkit/explanation.hpp"
#include "survkit/model.hpp"

namespace survkit {

struct ShapConfig {
    enum class Estimator : std::uint8_t { exact, sampling } estimator = Estimator::exact;
    std::size_t n_samples = 1000; // random feature orderings, sampling only
    std::uint64_t seed = 0;
};

/// Per-feature time-dependent Shapley attribution of one observation.
/// Local accuracy: sum of phi over features + baseline = f_t(x) at every grid
/// point (exactly for the exact estimator).
struct ShapAttribution {
    TimeGrid grid;
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> phi; // per feature, per grid point
    std::vector<double> baseline;         // mean background prediction
    std::vector<double> prediction;       // f_t(x) on the grid
    ShapConfig config;
};

/// Subsample for the SHAP background: the dataset itself when n <= cap,
/// otherwise cap rows drawn without replacement from seed.
SurvivalDataset shap_background(const SurvivalDataset& ds, std::size_t cap, std::uint64_t seed);

/// SurvSHAP(t) attribution of observation x against a background dataset.
///
/// The value function is marginal: v(S, t) is the mean over background rows
/// of the prediction for x with the features outside S replaced by the row's
/// values. The exact estimator enumerates all 2^p coalitions (p <= 12); the
/// sampling estimator averages marginal contributions over n_samples random
/// feature orderings, every ordering shared across the whole grid.
/// Deterministic given the config seed, independent of thread count.
ShapAttribution survshap_t(const SurvivalModel& model, std::span<const double> x,
                           const SurvivalDataset& background, const TimeGrid& grid,
                           const ShapConfig& config, int threads = 1);

/// SurvSHAP(t) global importance: per feature, the mean of |phi_t(x, j)| over
/// the dataset's observations, each explained with the dataset as background
/// (capped at background_cap rows by seeded subsampling).
ExplanationCurveSet sfi_t(const SurvivalModel& model, const SurvivalDataset& ds,
                          const TimeGrid& grid, const ShapConfig& config, int threads = 1,
                          std::size_t background_cap = 100);

/// The attribution's curves as an exportable set: one curve per feature plus
/// the baseline curve.
ExplanationCurveSet shap_curve_set(const ShapAttribution& attribution);

} // namespace survkit
