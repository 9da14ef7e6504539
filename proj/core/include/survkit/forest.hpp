#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "survkit/dataset.hpp"
#include "survkit/model.hpp"
#include "survkit/step_function.hpp"

namespace survkit {

struct ForestConfig {
    int n_trees = 200;
    int mtry = 0;           // features tried per split; 0 = ceil(sqrt(p))
    int min_node_size = 15; // samples; a node at or below this size is a leaf
    std::uint64_t seed = 0;
};

struct TreeNode {
    std::int32_t split_feature = -1; // -1 marks a leaf
    double threshold = 0.0;          // goes left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    StepFunction curve; // leaf only: Nelson-Aalen cumulative hazard of in-node samples
};

struct Tree {
    std::vector<TreeNode> nodes; // node 0 is the root
};

/// Random survival forest: trees grown on bootstrap samples with log-rank
/// splitting, Nelson-Aalen leaves, ensemble prediction by averaging
/// cumulative hazards. Deterministic given the config seed, independent of
/// thread count and tree order.
class ForestModel final : public SurvivalModel {
public:
    ForestModel() = default;
    ForestModel(std::vector<Tree> trees, ForestConfig config, std::size_t n_features,
                std::vector<std::string> feature_names, std::vector<ColumnEncoding> encoding);

    std::size_t n_features() const override { return n_features_; }
    void predict_survival_into(std::span<const double> x, const TimeGrid& grid,
                               std::span<double> out) const override;
    StepFunction predict_cumhazard(std::span<const double> x, const TimeGrid& grid) const override;

    /// Mean leaf cumulative hazard across trees at time t.
    double mean_cumhazard_at(std::span<const double> x, double t) const;

    /// The leaf curve observation x lands in within one tree.
    const StepFunction& leaf_curve(const Tree& tree, std::span<const double> x) const;

    const std::vector<Tree>& trees() const { return trees_; }
    const ForestConfig& config() const { return config_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<ColumnEncoding>& encoding() const { return encoding_; }

private:
    std::vector<Tree> trees_;
    ForestConfig config_;
    std::size_t n_features_ = 0;
    std::vector<std::string> feature_names_;
    std::vector<ColumnEncoding> encoding_;
};

/// Grow a survival forest. Each tree uses an independent stream derived from
/// the config seed, so trees may be grown in parallel without affecting the
/// result. Splits maximize the log-rank statistic between children over mtry
/// candidate features and capped midpoint thresholds; admissible splits leave
/// at least one event on each side.
ForestModel fit_survival_forest(const SurvivalDataset& ds, const ForestConfig& config = {},
                                int threads = 1);

/// Two-sample log-rank test statistic |O - E| / sqrt(V) where O, E and V
/// accumulate over the pooled unique event times (hypergeometric variance).
/// in_first_group flags membership of the first group. Exposed so tree splits
/// can be verified directly in tests.
double log_rank_statistic(std::span<const double> times, std::span<const std::uint8_t> events,
                          std::span<const std::uint8_t> in_first_group);

} // namespace survkit
