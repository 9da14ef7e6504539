#pragma once

#include <cstdint>
#include <vector>

#include "survkit/dataset.hpp"

namespace survkit {

/// Synthetic proportional-hazards data: standard-normal features, event times
/// exponential with rate baseline_rate * exp(beta' x), and independent
/// exponential censoring calibrated so the expected censored fraction equals
/// censoring_rate.
struct SimulationConfig {
    std::size_t n = 1000;
    std::vector<double> beta = {1.0, -0.5};
    double baseline_rate = 0.1;
    double censoring_rate = 0.2; // in [0, 1); 0 disables censoring
    std::uint64_t seed = 0;
};

SurvivalDataset simulate_proportional_hazards(const SimulationConfig& config);

} // namespace survkit
