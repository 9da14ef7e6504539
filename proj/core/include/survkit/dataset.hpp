#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "survkit/step_function.hpp"

namespace survkit {

enum class FeatureKind : std::uint8_t {
    numeric,
    binary,              // numeric column whose observed values are a subset of {0, 1}
    categorical_encoded, // one-hot indicator produced from a text column
};

/// How one source CSV column maps onto encoded feature columns.
/// Categorical columns record their levels in order of first appearance.
struct ColumnEncoding {
    std::string source_column;
    bool categorical = false;
    std::vector<std::string> levels; // empty for numeric columns
};

/// Named, non-empty set of feature indices permuted as a unit.
struct FeatureGroup {
    std::string name;
    std::vector<std::size_t> indices;
};

/// Right-censored time-to-event dataset: an n x p feature matrix plus
/// (time, event) outcome pairs. Immutable after construction; all editing
/// operations return new values.
class SurvivalDataset {
public:
    SurvivalDataset() = default;

    /// Validates invariants: consistent dimensions, strictly positive finite
    /// times, n >= 1, p >= 1. Throws InvalidInput on violation.
    SurvivalDataset(std::vector<double> features, std::size_t n_rows, std::size_t n_features,
                    std::vector<std::string> feature_names, std::vector<FeatureKind> feature_kinds,
                    std::vector<double> times, std::vector<std::uint8_t> events,
                    std::vector<ColumnEncoding> encoding = {});

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_features() const { return n_features_; }

    double at(std::size_t row, std::size_t col) const { return features_[row * n_features_ + col]; }
    std::span<const double> row(std::size_t i) const {
        return {features_.data() + i * n_features_, n_features_};
    }
    const std::vector<double>& features() const { return features_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<FeatureKind>& feature_kinds() const { return feature_kinds_; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<std::uint8_t>& events() const { return events_; }
    const std::vector<ColumnEncoding>& encoding() const { return encoding_; }

    std::size_t n_events() const;

    /// Index of a named feature; throws InvalidInput if absent.
    std::size_t feature_index(const std::string& name) const;

    /// Copy with column j set to z in every row.
    SurvivalDataset with_feature_replaced(std::size_t j, double z) const;

    /// Copy whose rows within the group's columns are reordered as units by
    /// perm (new row i takes the group values of old row perm[i]); all other
    /// columns and the outcomes are untouched.
    SurvivalDataset with_group_permuted(const FeatureGroup& group,
                                        std::span<const std::size_t> perm) const;

    /// Subset of rows, in the order given.
    SurvivalDataset subset(std::span<const std::size_t> rows) const;

private:
    std::vector<double> features_; // row-major
    std::size_t n_rows_ = 0;
    std::size_t n_features_ = 0;
    std::vector<std::string> feature_names_;
    std::vector<FeatureKind> feature_kinds_;
    std::vector<double> times_;
    std::vector<std::uint8_t> events_;
    std::vector<ColumnEncoding> encoding_;
};

/// Outcome column names for CSV loading.
struct OutcomeSchema {
    std::string time_column = "time";
    std::string event_column = "event";
};

/// Parse a comma-separated stream with a header row into a validated dataset.
///
/// Text columns are one-hot encoded with level order recorded as first
/// appearance; the event column accepts {0, 1, true, false}; the time column
/// must be a positive decimal. Missing values are rejected.
SurvivalDataset load_dataset(std::istream& in, const OutcomeSchema& schema);

/// Convenience: load from a file path.
SurvivalDataset load_dataset_file(const std::string& path, const OutcomeSchema& schema);

/// Copy of observation x with coordinate j set to z.
std::vector<double> replace_feature(std::span<const double> x, std::size_t j, double z);

/// One row-permutation drawn from seed and applied jointly to all columns in
/// the group; deterministic given seed.
SurvivalDataset permute_features(const SurvivalDataset& ds, const FeatureGroup& group,
                                 std::uint64_t seed);

struct GridStrategy {
    enum class Kind { event_times, quantiles } kind = Kind::event_times;
    std::size_t m = 0; // quantile count, quantiles only
    static GridStrategy event_times() { return {Kind::event_times, 0}; }
    static GridStrategy quantiles(std::size_t m) { return {Kind::quantiles, m}; }
};

/// Grid over the observed event times. The event-times strategy returns the
/// sorted unique event times; quantiles(m) returns the m interior quantiles at
/// levels k/(m+1), k = 1..m (linear interpolation), deduplicated. m = 1 is the
/// median event time.
TimeGrid make_time_grid(const SurvivalDataset& ds, const GridStrategy& strategy);

/// Default grid: event times, switching to quantiles(100) when there are more
/// than 100 unique event times.
TimeGrid default_time_grid(const SurvivalDataset& ds);

/// Throws InvalidInput unless groups are valid, within bounds and pairwise disjoint.
void validate_groups(const std::vector<FeatureGroup>& groups, std::size_t n_features);

} // namespace survkit
