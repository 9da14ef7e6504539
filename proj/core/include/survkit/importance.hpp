#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "survkit/dataset.hpp"
#include "survkit/explanation.hpp"
#include "survkit/model.hpp"

namespace survkit {

enum class PfiMode : std::uint8_t {
    difference,          // mean over permutations of L(X) - L(X permuted)
    relative,            // mean over permutations of L(X permuted) / L(X)
    absolute_difference, // |mean difference|, for display
};

struct PfiConfig {
    int b = 10; // permutations
    PfiMode mode = PfiMode::absolute_difference;
    std::uint64_t seed = 0;
};

const char* pfi_mode_name(PfiMode mode);

/// Grouped permutation feature importance over time under the Brier loss.
///
/// One curve per group: at each t, the mode's aggregate of the loss change
/// when the group's columns are permuted jointly, over b permutations drawn
/// from the seed. The same b row-permutations are shared by every group, so
/// singleton groups reproduce pfi_t exactly. Dispersion is the sample
/// standard deviation over the b replicates. When the mode is not
/// `difference`, the signed mean difference is retained as a companion
/// "<name>:diff" curve.
ExplanationCurveSet gpfi_t(const SurvivalModel& model, const SurvivalDataset& ds,
                           const std::vector<FeatureGroup>& groups, const TimeGrid& grid,
                           const PfiConfig& config, int threads = 1);

/// Permutation importance of a single feature (a singleton group).
ExplanationCurveSet pfi_t(const SurvivalModel& model, const SurvivalDataset& ds, std::size_t j,
                          const TimeGrid& grid, const PfiConfig& config, int threads = 1);

/// Permutation importance of every feature under a shared permutation stream.
ExplanationCurveSet pfi_all_t(const SurvivalModel& model, const SurvivalDataset& ds,
                              const TimeGrid& grid, const PfiConfig& config, int threads = 1);

} // namespace survkit
