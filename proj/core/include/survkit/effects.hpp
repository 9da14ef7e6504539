#pragma once

#include <span>

#include "survkit/dataset.hpp"
#include "survkit/explanation.hpp"
#include "survkit/model.hpp"

namespace survkit {

/// Default sweep values for a feature: (0, 1) for binary and one-hot columns,
/// otherwise 11 quantiles (0%, 10%, ..., 100%) of the observed values.
std::vector<double> default_z_values(const SurvivalDataset& ds, std::size_t j);

/// Individual conditional expectation over time: one curve per z value,
/// t -> f_t(x with feature j set to z). Curves are named by z.
ExplanationCurveSet ice_t(const SurvivalModel& model, std::span<const double> x, std::size_t j,
                          std::span<const double> z_values, const TimeGrid& grid);

/// Partial dependence over time: per z, the mean of the n ICE curves with the
/// per-grid-point standard deviation of those ICE values as the dispersion
/// band. For binary and one-hot features with z covering {0, 1}, also emits
/// the mean relative difference between the z=1 and z=0 predictions
/// ("relative_difference"), averaged per observation.
ExplanationCurveSet pdp_t(const SurvivalModel& model, const SurvivalDataset& ds, std::size_t j,
                          std::span<const double> z_values, const TimeGrid& grid,
                          int threads = 1);

} // namespace survkit
