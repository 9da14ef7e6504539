#include "survkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "survkit/errors.hpp"
#include "survkit/rng.hpp"

namespace survkit {

SurvivalDataset::SurvivalDataset(std::vector<double> features, std::size_t n_rows,
                                 std::size_t n_features, std::vector<std::string> feature_names,
                                 std::vector<FeatureKind> feature_kinds, std::vector<double> times,
                                 std::vector<std::uint8_t> events,
                                 std::vector<ColumnEncoding> encoding)
    : features_(std::move(features)), n_rows_(n_rows), n_features_(n_features),
      feature_names_(std::move(feature_names)), feature_kinds_(std::move(feature_kinds)),
      times_(std::move(times)), events_(std::move(events)), encoding_(std::move(encoding)) {
    if (n_rows_ < 1) throw InvalidInput("dataset: at least one row required");
    if (n_features_ < 1) throw InvalidInput("dataset: at least one feature required");
    if (features_.size() != n_rows_ * n_features_) {
        throw InvalidInput("dataset: feature matrix size does not match n x p");
    }
    if (feature_names_.size() != n_features_ || feature_kinds_.size() != n_features_) {
        throw InvalidInput("dataset: feature names/kinds must match feature count");
    }
    if (times_.size() != n_rows_ || events_.size() != n_rows_) {
        throw InvalidInput("dataset: outcome length must match row count");
    }
    for (double v : features_) {
        if (!std::isfinite(v)) throw InvalidInput("dataset: features must be finite");
    }
    for (double t : times_) {
        if (!std::isfinite(t) || t <= 0.0) {
            throw InvalidInput("dataset: times must be strictly positive and finite");
        }
    }
}

std::size_t SurvivalDataset::n_events() const {
    std::size_t c = 0;
    for (auto e : events_) c += (e != 0);
    return c;
}

std::size_t SurvivalDataset::feature_index(const std::string& name) const {
    for (std::size_t j = 0; j < feature_names_.size(); ++j) {
        if (feature_names_[j] == name) return j;
    }
    throw InvalidInput("dataset: unknown feature '" + name + "'");
}

SurvivalDataset SurvivalDataset::with_feature_replaced(std::size_t j, double z) const {
    if (j >= n_features_) throw InvalidInput("replace_feature: feature index out of bounds");
    std::vector<double> f = features_;
    for (std::size_t i = 0; i < n_rows_; ++i) f[i * n_features_ + j] = z;
    return SurvivalDataset(std::move(f), n_rows_, n_features_, feature_names_, feature_kinds_,
                           times_, events_, encoding_);
}

SurvivalDataset SurvivalDataset::with_group_permuted(const FeatureGroup& group,
                                                     std::span<const std::size_t> perm) const {
    if (perm.size() != n_rows_) throw InvalidInput("permute: permutation length must equal n");
    std::vector<double> f = features_;
    for (std::size_t i = 0; i < n_rows_; ++i) {
        const std::size_t src = perm[i];
        for (std::size_t j : group.indices) {
            if (j >= n_features_) throw InvalidInput("permute: feature index out of bounds");
            f[i * n_features_ + j] = features_[src * n_features_ + j];
        }
    }
    return SurvivalDataset(std::move(f), n_rows_, n_features_, feature_names_, feature_kinds_,
                           times_, events_, encoding_);
}

SurvivalDataset SurvivalDataset::subset(std::span<const std::size_t> rows) const {
    if (rows.empty()) throw InvalidInput("subset: at least one row required");
    std::vector<double> f;
    f.reserve(rows.size() * n_features_);
    std::vector<double> t;
    std::vector<std::uint8_t> e;
    t.reserve(rows.size());
    e.reserve(rows.size());
    for (std::size_t i : rows) {
        if (i >= n_rows_) throw InvalidInput("subset: row index out of bounds");
        auto r = row(i);
        f.insert(f.end(), r.begin(), r.end());
        t.push_back(times_[i]);
        e.push_back(events_[i]);
    }
    return SurvivalDataset(std::move(f), rows.size(), n_features_, feature_names_, feature_kinds_,
                           std::move(t), std::move(e), encoding_);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

} // namespace

SurvivalDataset load_dataset(std::istream& in, const OutcomeSchema& schema) {
    std::string header_line;
    if (!std::getline(in, header_line)) throw InvalidInput("load_dataset: empty input, header row required");
    const std::vector<std::string> header = split_csv_line(header_line);

    std::ptrdiff_t time_col = -1;
    std::ptrdiff_t event_col = -1;
    std::vector<std::size_t> feature_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = trim(header[c]);
        if (name == schema.time_column) {
            time_col = static_cast<std::ptrdiff_t>(c);
        } else if (name == schema.event_column) {
            event_col = static_cast<std::ptrdiff_t>(c);
        } else {
            feature_cols.push_back(c);
        }
    }
    if (time_col < 0) throw InvalidInput("load_dataset: missing time column '" + schema.time_column + "'");
    if (event_col < 0) throw InvalidInput("load_dataset: missing event column '" + schema.event_column + "'");
    if (feature_cols.empty()) throw InvalidInput("load_dataset: no feature columns besides the outcome");

    // First pass: collect raw cells, decide numeric vs categorical per column.
    std::vector<std::vector<std::string>> raw_rows;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw InvalidInput("load_dataset: line " + std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(header.size()));
        }
        for (auto& f : fields) {
            f = trim(f);
            if (f.empty()) {
                throw InvalidInput("load_dataset: missing value on line " + std::to_string(line_no) +
                                   " (missing values are rejected, impute or drop rows upstream)");
            }
        }
        raw_rows.push_back(std::move(fields));
    }
    if (raw_rows.empty()) throw InvalidInput("load_dataset: no data rows");

    const std::size_t n = raw_rows.size();
    std::vector<bool> is_numeric(feature_cols.size(), true);
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
        for (const auto& r : raw_rows) {
            double v;
            if (!parse_double(r[feature_cols[k]], v)) {
                is_numeric[k] = false;
                break;
            }
        }
    }

    // Level order for categorical columns: first appearance.
    std::vector<ColumnEncoding> encoding(feature_cols.size());
    std::vector<std::vector<std::string>> levels(feature_cols.size());
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
        encoding[k].source_column = trim(header[feature_cols[k]]);
        encoding[k].categorical = !is_numeric[k];
        if (!is_numeric[k]) {
            for (const auto& r : raw_rows) {
                const std::string& v = r[feature_cols[k]];
                if (std::find(levels[k].begin(), levels[k].end(), v) == levels[k].end()) {
                    levels[k].push_back(v);
                }
            }
            encoding[k].levels = levels[k];
        }
    }

    std::vector<std::string> names;
    std::vector<FeatureKind> kinds;
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
        if (is_numeric[k]) {
            names.push_back(encoding[k].source_column);
            kinds.push_back(FeatureKind::numeric); // refined to binary below
        } else {
            for (const auto& lvl : levels[k]) {
                names.push_back(encoding[k].source_column + "=" + lvl);
                kinds.push_back(FeatureKind::categorical_encoded);
            }
        }
    }
    const std::size_t p = names.size();

    std::vector<double> features(n * p);
    std::vector<double> times(n);
    std::vector<std::uint8_t> events(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = raw_rows[i];
        double t;
        if (!parse_double(r[static_cast<std::size_t>(time_col)], t)) {
            throw InvalidInput("load_dataset: non-numeric time value '" +
                               r[static_cast<std::size_t>(time_col)] + "'");
        }
        if (!std::isfinite(t) || t <= 0.0) {
            throw InvalidInput("load_dataset: time values must be strictly positive, got '" +
                               r[static_cast<std::size_t>(time_col)] + "'");
        }
        times[i] = t;

        const std::string& ev = r[static_cast<std::size_t>(event_col)];
        if (ev == "1" || ev == "true") {
            events[i] = 1;
        } else if (ev == "0" || ev == "false") {
            events[i] = 0;
        } else {
            throw InvalidInput("load_dataset: event value must be one of {0, 1, true, false}, got '" +
                               ev + "'");
        }

        std::size_t j = 0;
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            const std::string& cell = r[feature_cols[k]];
            if (is_numeric[k]) {
                double v;
                parse_double(cell, v); // already validated
                if (!std::isfinite(v)) {
                    throw InvalidInput("load_dataset: non-finite feature value in column '" +
                                       encoding[k].source_column + "'");
                }
                features[i * p + j] = v;
                ++j;
            } else {
                for (const auto& lvl : levels[k]) {
                    features[i * p + j] = (cell == lvl) ? 1.0 : 0.0;
                    ++j;
                }
            }
        }
    }

    // A numeric column whose observed values all lie in {0, 1} is binary.
    {
        std::size_t j = 0;
        for (std::size_t k = 0; k < feature_cols.size(); ++k) {
            if (is_numeric[k]) {
                bool binary = true;
                for (std::size_t i = 0; i < n; ++i) {
                    const double v = features[i * p + j];
                    if (v != 0.0 && v != 1.0) {
                        binary = false;
                        break;
                    }
                }
                if (binary) kinds[j] = FeatureKind::binary;
                ++j;
            } else {
                j += levels[k].size();
            }
        }
    }

    return SurvivalDataset(std::move(features), n, p, std::move(names), std::move(kinds),
                           std::move(times), std::move(events), std::move(encoding));
}

SurvivalDataset load_dataset_file(const std::string& path, const OutcomeSchema& schema) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("load_dataset: cannot open '" + path + "'");
    return load_dataset(in, schema);
}

std::vector<double> replace_feature(std::span<const double> x, std::size_t j, double z) {
    if (j >= x.size()) throw InvalidInput("replace_feature: feature index out of bounds");
    std::vector<double> out(x.begin(), x.end());
    out[j] = z;
    return out;
}

SurvivalDataset permute_features(const SurvivalDataset& ds, const FeatureGroup& group,
                                 std::uint64_t seed) {
    validate_groups({group}, ds.n_features());
    Rng rng(seed);
    const std::vector<std::size_t> perm = rng.permutation(ds.n_rows());
    return ds.with_group_permuted(group, perm);
}

TimeGrid make_time_grid(const SurvivalDataset& ds, const GridStrategy& strategy) {
    std::vector<double> event_times;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        if (ds.events()[i]) event_times.push_back(ds.times()[i]);
    }
    if (event_times.empty()) throw InvalidInput("make_time_grid: dataset has no events");
    std::sort(event_times.begin(), event_times.end());

    TimeGrid grid;
    if (strategy.kind == GridStrategy::Kind::event_times) {
        event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());
        grid.points = std::move(event_times);
    } else {
        if (strategy.m < 1) throw InvalidInput("make_time_grid: quantile count must be >= 1");
        const std::size_t m = strategy.m;
        const std::size_t nev = event_times.size();
        std::vector<double> pts;
        pts.reserve(m);
        for (std::size_t k = 1; k <= m; ++k) {
            // Interior level k/(m+1), type-7 (linear interpolation) quantile.
            const double level = static_cast<double>(k) / static_cast<double>(m + 1);
            const double pos = level * static_cast<double>(nev - 1);
            const std::size_t lo = static_cast<std::size_t>(pos);
            const double frac = pos - static_cast<double>(lo);
            const double q = (lo + 1 < nev)
                                 ? event_times[lo] * (1.0 - frac) + event_times[lo + 1] * frac
                                 : event_times[lo];
            pts.push_back(q);
        }
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        grid.points = std::move(pts);
    }
    grid.validate();
    return grid;
}

TimeGrid default_time_grid(const SurvivalDataset& ds) {
    std::set<double> uniq;
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        if (ds.events()[i]) uniq.insert(ds.times()[i]);
    }
    if (uniq.size() > 100) return make_time_grid(ds, GridStrategy::quantiles(100));
    return make_time_grid(ds, GridStrategy::event_times());
}

void validate_groups(const std::vector<FeatureGroup>& groups, std::size_t n_features) {
    std::set<std::size_t> seen;
    for (const auto& g : groups) {
        if (g.indices.empty()) {
            throw InvalidInput("feature group '" + g.name + "' must not be empty");
        }
        for (std::size_t j : g.indices) {
            if (j >= n_features) {
                throw InvalidInput("feature group '" + g.name + "': index " + std::to_string(j) +
                                   " out of bounds (p=" + std::to_string(n_features) + ")");
            }
            if (!seen.insert(j).second) {
                throw InvalidInput("feature groups must be pairwise disjoint; index " +
                                   std::to_string(j) + " repeats");
            }
        }
    }
}

} // namespace survkit
