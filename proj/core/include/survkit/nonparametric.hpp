#pragma once

#include <cstdint>
#include <span>

#include "survkit/step_function.hpp"

namespace survkit {

/// Kaplan-Meier product-limit survival estimate, knots at unique event times.
StepFunction kaplan_meier(std::span<const double> times, std::span<const std::uint8_t> events);

/// Nelson-Aalen cumulative hazard, H(t) = sum of d_i/n_i over event times <= t.
StepFunction nelson_aalen(std::span<const double> times, std::span<const std::uint8_t> events);

/// Kaplan-Meier of the censoring distribution: the event indicator is flipped,
/// so drops happen at censoring times. Used for IPCW weighting.
StepFunction censoring_kaplan_meier(std::span<const double> times,
                                    std::span<const std::uint8_t> events);

} // namespace survkit
