#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "survkit/step_function.hpp"

namespace survkit {

enum class Orientation : std::uint8_t { higher_better, lower_better };

/// A performance metric evaluated at each grid point. Points where the metric
/// is undefined (no cases or no controls, all weights excluded) hold NaN and
/// are skipped by the integrated variants; exclusions counts the observations
/// dropped at each point because their IPCW weight was undefined.
struct MetricCurve {
    TimeGrid grid;
    std::vector<double> values;
    std::string metric_name;
    Orientation orientation = Orientation::lower_better;
    std::vector<std::size_t> exclusions;

    std::size_t undefined_points() const;
};

/// Time-dependent Brier score with Graf IPCW weighting.
///
/// The censoring Kaplan-Meier G is fitted internally on the flipped event
/// indicator. At each t, observations with an event before t contribute
/// S(t)^2 / G(time-), observations still at risk contribute
/// (1 - S(t))^2 / G(t), censored-before-t observations contribute 0; the sum
/// is divided by the number of non-excluded observations.
MetricCurve brier_score_t(std::span<const StepFunction> predictions,
                          std::span<const double> times, std::span<const std::uint8_t> events,
                          const TimeGrid& grid);

/// Variant with an externally fitted censoring survival curve (for
/// cross-validation, where G comes from the training fold).
MetricCurve brier_score_t(std::span<const StepFunction> predictions,
                          std::span<const double> times, std::span<const std::uint8_t> events,
                          const TimeGrid& grid, const StepFunction& censoring_survival);

/// Trapezoidal integral of the curve's piecewise-linear interpolant over
/// [t_a, t_b], divided by (t_b - t_a). The range must lie within the grid
/// span and contain no undefined points.
double integrated_brier_score(const MetricCurve& curve, double t_a, double t_b);

/// Integrated over the full grid span.
double integrated_brier_score(const MetricCurve& curve);

/// Harrell's concordance index. Pairs (i, j) are comparable when
/// time_i < time_j and event_i; concordant when risk_i > risk_j, with 0.5
/// credit for risk ties. Higher risk must mean shorter expected survival.
double concordance_index(std::span<const double> risk_scores, std::span<const double> times,
                         std::span<const std::uint8_t> events);

/// Risk score convention for survival-curve models: negated mean predicted
/// survival over the grid.
std::vector<double> risk_scores_from_predictions(std::span<const StepFunction> predictions,
                                                 const TimeGrid& grid);

/// Cumulative/dynamic AUC at each grid point: cases are observations with an
/// event at or before t, controls those still beyond t; each case is weighted
/// by 1 / G(time-); the risk marker is 1 - S(t). Points with no cases or no
/// controls are NaN.
MetricCurve auc_t(std::span<const StepFunction> predictions, std::span<const double> times,
                  std::span<const std::uint8_t> events, const TimeGrid& grid);

/// Variant with an externally fitted censoring survival curve.
MetricCurve auc_t(std::span<const StepFunction> predictions, std::span<const double> times,
                  std::span<const std::uint8_t> events, const TimeGrid& grid,
                  const StepFunction& censoring_survival);

/// Event-density-weighted average of auc over its defined points: point t_k
/// carries the Kaplan-Meier event mass S(t_{k-1}) - S(t_k) (from the observed
/// outcomes), renormalized over the defined points.
double integrated_auc(const MetricCurve& auc, std::span<const double> times,
                      std::span<const std::uint8_t> events);

} // namespace survkit
