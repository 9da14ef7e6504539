#include "survkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "survkit/errors.hpp"
#include "survkit/nonparametric.hpp"

namespace survkit {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

void check_outcome_lengths(std::size_t n_pred, std::span<const double> times,
                           std::span<const std::uint8_t> events, const char* where) {
    if (times.size() != events.size() || (n_pred > 0 && n_pred != times.size())) {
        throw InvalidInput(std::string(where) + ": prediction and outcome lengths differ");
    }
    if (times.empty()) {
        throw InvalidInput(std::string(where) + ": empty input");
    }
}

} // namespace

std::size_t MetricCurve::undefined_points() const {
    std::size_t c = 0;
    for (double v : values) c += !std::isfinite(v);
    return c;
}

MetricCurve brier_score_t(std::span<const StepFunction> predictions,
                          std::span<const double> times, std::span<const std::uint8_t> events,
                          const TimeGrid& grid) {
    return brier_score_t(predictions, times, events, grid,
                         censoring_kaplan_meier(times, events));
}

MetricCurve brier_score_t(std::span<const StepFunction> predictions,
                          std::span<const double> times, std::span<const std::uint8_t> events,
                          const TimeGrid& grid, const StepFunction& censoring_survival) {
    check_outcome_lengths(predictions.size(), times, events, "brier_score_t");
    grid.validate();
    const std::size_t n = times.size();
    const StepFunction& g = censoring_survival;

    MetricCurve curve;
    curve.grid = grid;
    curve.metric_name = "brier";
    curve.orientation = Orientation::lower_better;
    curve.values.resize(grid.size());
    curve.exclusions.assign(grid.size(), 0);

    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid.points[k];
        const double g_t = g(t);
        double sum = 0.0;
        std::size_t included = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = predictions[i](t);
            if (times[i] <= t) {
                if (!events[i]) {
                    ++included; // censored before t: weight 0 contribution
                    continue;
                }
                const double g_left = g.left_limit(times[i]);
                if (g_left <= 0.0) {
                    ++curve.exclusions[k];
                    continue;
                }
                sum += s * s / g_left;
                ++included;
            } else {
                if (g_t <= 0.0) {
                    ++curve.exclusions[k];
                    continue;
                }
                sum += (1.0 - s) * (1.0 - s) / g_t;
                ++included;
            }
        }
        curve.values[k] = included > 0 ? sum / static_cast<double>(included) : nan_value;
    }
    return curve;
}

double integrated_brier_score(const MetricCurve& curve, double t_a, double t_b) {
    const auto& ts = curve.grid.points;
    const auto& vs = curve.values;
    if (ts.size() < 2) {
        throw InvalidInput("integrated_brier_score: grid needs at least 2 points");
    }
    if (!(t_a < t_b)) {
        throw InvalidInput("integrated_brier_score: empty integration range");
    }
    if (t_a < ts.front() || t_b > ts.back()) {
        throw InvalidInput("integrated_brier_score: range outside grid span");
    }

    // Value of the piecewise-linear interpolant at t.
    auto interp = [&](double t) {
        const auto it = std::lower_bound(ts.begin(), ts.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
        if (hi < ts.size() && ts[hi] == t) return vs[hi];
        const std::size_t lo = hi - 1;
        const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
        return vs[lo] + w * (vs[hi] - vs[lo]);
    };

    double integral = 0.0;
    double prev_t = t_a;
    double prev_v = interp(t_a);
    if (!std::isfinite(prev_v)) {
        throw ComputeError("integrated_brier_score: curve undefined inside range");
    }
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (ts[k] <= t_a) continue;
        const double t = std::min(ts[k], t_b);
        const double v = interp(t);
        if (!std::isfinite(v)) {
            throw ComputeError("integrated_brier_score: curve undefined inside range");
        }
        integral += (prev_v + v) / 2.0 * (t - prev_t);
        prev_t = t;
        prev_v = v;
        if (ts[k] >= t_b) break;
    }
    return integral / (t_b - t_a);
}

double integrated_brier_score(const MetricCurve& curve) {
    return integrated_brier_score(curve, curve.grid.min(), curve.grid.max());
}

double concordance_index(std::span<const double> risk_scores, std::span<const double> times,
                         std::span<const std::uint8_t> events) {
    check_outcome_lengths(risk_scores.size(), times, events, "concordance_index");
    const std::size_t n = times.size();
    double comparable = 0.0;
    double concordant = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!events[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (times[i] >= times[j]) continue;
            comparable += 1.0;
            if (risk_scores[i] > risk_scores[j]) {
                concordant += 1.0;
            } else if (risk_scores[i] == risk_scores[j]) {
                concordant += 0.5;
            }
        }
    }
    if (comparable == 0.0) {
        throw ComputeError("concordance_index: no comparable pairs");
    }
    return concordant / comparable;
}

std::vector<double> risk_scores_from_predictions(std::span<const StepFunction> predictions,
                                                 const TimeGrid& grid) {
    std::vector<double> risk(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        double mean = 0.0;
        for (double t : grid.points) mean += predictions[i](t);
        risk[i] = -mean / static_cast<double>(grid.size());
    }
    return risk;
}

MetricCurve auc_t(std::span<const StepFunction> predictions, std::span<const double> times,
                  std::span<const std::uint8_t> events, const TimeGrid& grid) {
    return auc_t(predictions, times, events, grid, censoring_kaplan_meier(times, events));
}

MetricCurve auc_t(std::span<const StepFunction> predictions, std::span<const double> times,
                  std::span<const std::uint8_t> events, const TimeGrid& grid,
                  const StepFunction& censoring_survival) {
    check_outcome_lengths(predictions.size(), times, events, "auc_t");
    grid.validate();
    const std::size_t n = times.size();
    const StepFunction& g = censoring_survival;

    MetricCurve curve;
    curve.grid = grid;
    curve.metric_name = "auc";
    curve.orientation = Orientation::higher_better;
    curve.values.resize(grid.size());
    curve.exclusions.assign(grid.size(), 0);

    std::vector<double> marker(n);
    std::vector<double> case_weight(n);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid.points[k];
        for (std::size_t i = 0; i < n; ++i) marker[i] = 1.0 - predictions[i](t);

        double weight_sum = 0.0;
        std::size_t n_controls = 0;
        for (std::size_t i = 0; i < n; ++i) {
            case_weight[i] = 0.0;
            if (times[i] > t) {
                ++n_controls;
            } else if (events[i]) {
                const double g_left = g.left_limit(times[i]);
                if (g_left <= 0.0) {
                    ++curve.exclusions[k];
                } else {
                    case_weight[i] = 1.0 / g_left;
                    weight_sum += case_weight[i];
                }
            }
        }
        if (weight_sum <= 0.0 || n_controls == 0) {
            curve.values[k] = nan_value;
            continue;
        }
        double wins = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (case_weight[i] == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (times[j] <= t) continue;
                if (marker[i] > marker[j]) {
                    wins += case_weight[i];
                } else if (marker[i] == marker[j]) {
                    wins += 0.5 * case_weight[i];
                }
            }
        }
        curve.values[k] = wins / (weight_sum * static_cast<double>(n_controls));
    }
    return curve;
}

double integrated_auc(const MetricCurve& auc, std::span<const double> times,
                      std::span<const std::uint8_t> events) {
    if (auc.values.size() != auc.grid.size()) {
        throw InvalidInput("integrated_auc: malformed curve");
    }
    const StepFunction km = kaplan_meier(times, events);
    double weighted = 0.0;
    double total = 0.0;
    double prev_s = 1.0;
    for (std::size_t k = 0; k < auc.grid.size(); ++k) {
        const double s = km(auc.grid.points[k]);
        const double w = prev_s - s;
        prev_s = s;
        if (!std::isfinite(auc.values[k])) continue;
        weighted += w * auc.values[k];
        total += w;
    }
    if (total <= 0.0) {
        throw ComputeError("integrated_auc: no event mass at defined grid points");
    }
    return weighted / total;
}

} // namespace survkit
