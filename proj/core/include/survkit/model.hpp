#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "survkit/step_function.hpp"

namespace survkit {

/// A fitted survival estimator. Implementations are immutable after fitting
/// and safe for concurrent prediction.
class SurvivalModel {
public:
    virtual ~SurvivalModel() = default;

    virtual std::size_t n_features() const = 0;

    /// Predicted survival probabilities at each grid point, written to out
    /// (out.size() == grid.size()). This is the hot path for explanations.
    virtual void predict_survival_into(std::span<const double> x, const TimeGrid& grid,
                                       std::span<double> out) const = 0;

    /// Predicted survival curve sampled onto the grid.
    StepFunction predict_survival(std::span<const double> x, const TimeGrid& grid) const {
        std::vector<double> v(grid.size());
        predict_survival_into(x, grid, v);
        return StepFunction(grid.points, std::move(v), 1.0);
    }

    /// Predicted cumulative hazard, -log S by default.
    virtual StepFunction predict_cumhazard(std::span<const double> x, const TimeGrid& grid) const {
        std::vector<double> v(grid.size());
        predict_survival_into(x, grid, v);
        for (double& s : v) s = -std::log(s);
        return StepFunction(grid.points, std::move(v), 0.0);
    }
};

/// Survival curves for every dataset row, sampled onto the grid.
template <typename Dataset>
std::vector<StepFunction> predict_all(const SurvivalModel& model, const Dataset& ds,
                                      const TimeGrid& grid) {
    std::vector<StepFunction> out;
    out.reserve(ds.n_rows());
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        out.push_back(model.predict_survival(ds.row(i), grid));
    }
    return out;
}

} // namespace survkit
