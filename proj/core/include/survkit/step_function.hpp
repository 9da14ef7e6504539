#pragma once

#include <cstddef>
#include <vector>

namespace survkit {

struct TimeGrid;

/// Right-continuous piecewise-constant function of time.
///
/// Value is `initial_value` before the first knot and `values[i]` on
/// [knots[i], knots[i+1]). This is the shared representation of survival
/// curves (non-increasing, values in [0,1], initial value 1) and cumulative
/// hazards (non-decreasing, values >= 0, initial value 0).
class StepFunction {
public:
    StepFunction() = default;

    /// Knots must be strictly increasing and finite; values same length.
    StepFunction(std::vector<double> knots, std::vector<double> values, double initial_value);

    /// Right-continuous evaluation: value of the last knot <= t.
    double operator()(double t) const;

    /// Left limit at t: value of the last knot strictly below t.
    double left_limit(double t) const;

    /// Values at each grid point (right-continuous evaluation).
    std::vector<double> sample(const TimeGrid& grid) const;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }
    double initial_value() const { return initial_value_; }
    std::size_t size() const { return knots_.size(); }

    bool is_valid_survival() const;
    bool is_valid_cumhazard() const;

    friend bool operator==(const StepFunction&, const StepFunction&) = default;

private:
    std::vector<double> knots_;
    std::vector<double> values_;
    double initial_value_ = 1.0;
};

/// Strictly increasing positive time points shared by curves and metrics.
struct TimeGrid {
    std::vector<double> points;

    std::size_t size() const { return points.size(); }
    double min() const { return points.front(); }
    double max() const { return points.back(); }

    /// Throws InvalidInput unless points are finite, positive and strictly increasing.
    void validate() const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

} // namespace survkit
