#include "survkit/step_function.hpp"

#include <algorithm>
#include <cmath>

#include "survkit/errors.hpp"

namespace survkit {

StepFunction::StepFunction(std::vector<double> knots, std::vector<double> values, double initial_value)
    : knots_(std::move(knots)), values_(std::move(values)), initial_value_(initial_value) {
    if (knots_.size() != values_.size()) {
        throw InvalidInput("step function: knots and values must have the same length");
    }
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        if (!std::isfinite(knots_[i])) {
            throw InvalidInput("step function: knots must be finite");
        }
        if (i > 0 && !(knots_[i] > knots_[i - 1])) {
            throw InvalidInput("step function: knots must be strictly increasing");
        }
    }
}

double StepFunction::operator()(double t) const {
    // Last knot <= t; right-continuous at the knot itself.
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    if (it == knots_.begin()) return initial_value_;
    return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double StepFunction::left_limit(double t) const {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
    if (it == knots_.begin()) return initial_value_;
    return values_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

std::vector<double> StepFunction::sample(const TimeGrid& grid) const {
    std::vector<double> out(grid.points.size());
    for (std::size_t i = 0; i < grid.points.size(); ++i) out[i] = (*this)(grid.points[i]);
    return out;
}

bool StepFunction::is_valid_survival() const {
    if (initial_value_ != 1.0) return false;
    double prev = 1.0;
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0) || v > prev) return false;
        prev = v;
    }
    return true;
}

bool StepFunction::is_valid_cumhazard() const {
    if (initial_value_ != 0.0) return false;
    double prev = 0.0;
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v) || v < prev) return false;
        prev = v;
    }
    return true;
}

void TimeGrid::validate() const {
    if (points.empty()) {
        throw InvalidInput("time grid: at least one point required");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i]) || points[i] <= 0.0) {
            throw InvalidInput("time grid: points must be positive and finite");
        }
        if (i > 0 && !(points[i] > points[i - 1])) {
            throw InvalidInput("time grid: points must be strictly increasing");
        }
    }
}

} // namespace survkit
