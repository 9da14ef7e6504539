#include "survkit/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "survkit/errors.hpp"
#include "survkit/nonparametric.hpp"
#include "survkit/parallel.hpp"
#include "survkit/rng.hpp"

namespace survkit {

namespace {

// Risk table of one node: unique event times with death counts and at-risk
// counts, plus per-member lookup indices for incremental split evaluation.
struct NodeRisk {
    std::vector<double> event_times; // unique, ascending
    std::vector<double> deaths;      // d_k
    std::vector<double> at_risk;     // Y_k
    // For member s: at risk at event-time index k iff k < atrisk_idx[s];
    // death_idx[s] is the index of its event time, or -1 when censored.
    std::vector<std::size_t> atrisk_idx;
    std::vector<std::ptrdiff_t> death_idx;
};

NodeRisk build_node_risk(const SurvivalDataset& ds, const std::vector<std::size_t>& members) {
    NodeRisk r;
    for (std::size_t s : members) {
        if (ds.events()[s]) r.event_times.push_back(ds.times()[s]);
    }
    std::sort(r.event_times.begin(), r.event_times.end());
    r.event_times.erase(std::unique(r.event_times.begin(), r.event_times.end()),
                        r.event_times.end());
    const std::size_t K = r.event_times.size();
    r.deaths.assign(K, 0.0);
    r.at_risk.assign(K, 0.0);
    r.atrisk_idx.resize(members.size());
    r.death_idx.assign(members.size(), -1);
    for (std::size_t m = 0; m < members.size(); ++m) {
        const std::size_t s = members[m];
        const double t = ds.times()[s];
        const auto up = std::upper_bound(r.event_times.begin(), r.event_times.end(), t);
        const std::size_t idx = static_cast<std::size_t>(up - r.event_times.begin());
        r.atrisk_idx[m] = idx; // at risk for all event times <= t
        for (std::size_t k = 0; k < idx; ++k) r.at_risk[k] += 1.0;
        if (ds.events()[s]) {
            const std::size_t k = idx - 1; // its own event time is the last one <= t
            r.deaths[k] += 1.0;
            r.death_idx[m] = static_cast<std::ptrdiff_t>(k);
        }
    }
    return r;
}

// Log-rank statistic of a left/right partition given left-group counts per
// event time. Returns 0 when the variance vanishes.
double partition_statistic(const NodeRisk& r, const std::vector<double>& left_at_risk,
                           const std::vector<double>& left_deaths) {
    double num = 0.0;
    double var = 0.0;
    for (std::size_t k = 0; k < r.event_times.size(); ++k) {
        const double d = r.deaths[k];
        const double y = r.at_risk[k];
        const double y1 = left_at_risk[k];
        num += left_deaths[k] - y1 * d / y;
        if (y > 1.0) {
            var += (y1 / y) * (1.0 - y1 / y) * ((y - d) / (y - 1.0)) * d;
        }
    }
    if (!(var > 0.0)) return 0.0;
    return std::abs(num) / std::sqrt(var);
}

struct BestSplit {
    double statistic = -1.0;
    std::size_t feature = 0;
    double threshold = 0.0;
};

// Candidate thresholds: midpoints between consecutive unique sorted in-node
// values, capped at 64 by evenly spaced index selection.
std::vector<double> candidate_thresholds(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (values.size() < 2) return {};
    std::vector<double> mids(values.size() - 1);
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        mids[i] = values[i] + (values[i + 1] - values[i]) / 2.0;
    }
    constexpr std::size_t cap = 64;
    if (mids.size() <= cap) return mids;
    std::vector<double> picked(cap);
    for (std::size_t j = 0; j < cap; ++j) {
        picked[j] = mids[j * (mids.size() - 1) / (cap - 1)];
    }
    picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
    return picked;
}

BestSplit find_best_split(const SurvivalDataset& ds, const std::vector<std::size_t>& members,
                          const NodeRisk& risk, const std::vector<std::size_t>& features) {
    const std::size_t K = risk.event_times.size();
    const std::size_t n = members.size();
    const double total_deaths = std::accumulate(risk.deaths.begin(), risk.deaths.end(), 0.0);

    BestSplit best;
    std::vector<std::size_t> order(n);
    std::vector<double> cnt_atrisk(K + 1);
    std::vector<double> left_deaths(K);
    std::vector<double> left_at_risk(K);

    for (std::size_t f : features) {
        std::vector<double> values(n);
        for (std::size_t m = 0; m < n; ++m) values[m] = ds.at(members[m], f);
        const std::vector<double> thresholds = candidate_thresholds(values);
        if (thresholds.empty()) continue;

        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

        std::fill(cnt_atrisk.begin(), cnt_atrisk.end(), 0.0);
        std::fill(left_deaths.begin(), left_deaths.end(), 0.0);
        double n_left = 0.0;
        double deaths_left = 0.0;
        std::size_t pos = 0;
        for (double thr : thresholds) {
            while (pos < n && values[order[pos]] <= thr) {
                const std::size_t m = order[pos];
                cnt_atrisk[risk.atrisk_idx[m]] += 1.0;
                if (risk.death_idx[m] >= 0) {
                    left_deaths[static_cast<std::size_t>(risk.death_idx[m])] += 1.0;
                    deaths_left += 1.0;
                }
                n_left += 1.0;
                ++pos;
            }
            if (deaths_left < 1.0 || total_deaths - deaths_left < 1.0) continue;
            if (n_left < 1.0 || static_cast<double>(n) - n_left < 1.0) continue;
            double acc = 0.0;
            for (std::size_t k = K; k-- > 0;) {
                acc += cnt_atrisk[k + 1];
                left_at_risk[k] = acc;
            }
            const double stat = partition_statistic(risk, left_at_risk, left_deaths);
            if (stat > best.statistic && stat > 0.0) {
                best.statistic = stat;
                best.feature = f;
                best.threshold = thr;
            }
        }
    }
    return best;
}

StepFunction leaf_nelson_aalen(const SurvivalDataset& ds, const std::vector<std::size_t>& members) {
    std::vector<double> times(members.size());
    std::vector<std::uint8_t> events(members.size());
    for (std::size_t m = 0; m < members.size(); ++m) {
        times[m] = ds.times()[members[m]];
        events[m] = ds.events()[members[m]];
    }
    return nelson_aalen(times, events);
}

Tree grow_tree(const SurvivalDataset& ds, const ForestConfig& config, int mtry,
               std::uint64_t tree_seed) {
    Rng rng(tree_seed);
    const std::size_t n = ds.n_rows();
    const std::size_t p = ds.n_features();

    std::vector<std::size_t> boot(n);
    for (std::size_t i = 0; i < n; ++i) boot[i] = static_cast<std::size_t>(rng.below(n));

    Tree tree;
    struct Work {
        std::int32_t node;
        std::vector<std::size_t> members;
    };
    std::vector<Work> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::move(boot)});

    while (!stack.empty()) {
        Work w = std::move(stack.back());
        stack.pop_back();

        std::size_t node_events = 0;
        for (std::size_t s : w.members) node_events += (ds.events()[s] != 0);

        bool split_done = false;
        if (w.members.size() > static_cast<std::size_t>(config.min_node_size) &&
            node_events >= 2) {
            const std::vector<std::size_t> features =
                rng.sample_without_replacement(p, static_cast<std::size_t>(mtry));
            const NodeRisk risk = build_node_risk(ds, w.members);
            const BestSplit best = find_best_split(ds, w.members, risk, features);
            if (best.statistic > 0.0) {
                std::vector<std::size_t> left, right;
                for (std::size_t s : w.members) {
                    (ds.at(s, best.feature) <= best.threshold ? left : right).push_back(s);
                }
                const auto li = static_cast<std::int32_t>(tree.nodes.size());
                const auto ri = li + 1;
                tree.nodes[static_cast<std::size_t>(w.node)].split_feature =
                    static_cast<std::int32_t>(best.feature);
                tree.nodes[static_cast<std::size_t>(w.node)].threshold = best.threshold;
                tree.nodes[static_cast<std::size_t>(w.node)].left = li;
                tree.nodes[static_cast<std::size_t>(w.node)].right = ri;
                tree.nodes.emplace_back();
                tree.nodes.emplace_back();
                // Left is pushed last so it is grown first; the node order and
                // the rng consumption sequence are then fixed.
                stack.push_back({ri, std::move(right)});
                stack.push_back({li, std::move(left)});
                split_done = true;
            }
        }
        if (!split_done) {
            tree.nodes[static_cast<std::size_t>(w.node)].curve = leaf_nelson_aalen(ds, w.members);
        }
    }
    return tree;
}

} // namespace

ForestModel::ForestModel(std::vector<Tree> trees, ForestConfig config, std::size_t n_features,
                         std::vector<std::string> feature_names,
                         std::vector<ColumnEncoding> encoding)
    : trees_(std::move(trees)), config_(config), n_features_(n_features),
      feature_names_(std::move(feature_names)), encoding_(std::move(encoding)) {}

const StepFunction& ForestModel::leaf_curve(const Tree& tree, std::span<const double> x) const {
    std::size_t node = 0;
    while (tree.nodes[node].split_feature >= 0) {
        const TreeNode& nd = tree.nodes[node];
        node = static_cast<std::size_t>(
            x[static_cast<std::size_t>(nd.split_feature)] <= nd.threshold ? nd.left : nd.right);
    }
    return tree.nodes[node].curve;
}

void ForestModel::predict_survival_into(std::span<const double> x, const TimeGrid& grid,
                                        std::span<double> out) const {
    if (x.size() != n_features_) {
        throw InvalidInput("forest predict: observation has " + std::to_string(x.size()) +
                           " features, model expects " + std::to_string(n_features_));
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (const Tree& tree : trees_) {
        const StepFunction& leaf = leaf_curve(tree, x);
        for (std::size_t k = 0; k < grid.points.size(); ++k) out[k] += leaf(grid.points[k]);
    }
    const double inv = 1.0 / static_cast<double>(trees_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::exp(-out[k] * inv);
}

StepFunction ForestModel::predict_cumhazard(std::span<const double> x, const TimeGrid& grid) const {
    if (x.size() != n_features_) {
        throw InvalidInput("forest predict: observation has " + std::to_string(x.size()) +
                           " features, model expects " + std::to_string(n_features_));
    }
    std::vector<double> v(grid.size(), 0.0);
    for (const Tree& tree : trees_) {
        const StepFunction& leaf = leaf_curve(tree, x);
        for (std::size_t k = 0; k < grid.points.size(); ++k) v[k] += leaf(grid.points[k]);
    }
    const double inv = 1.0 / static_cast<double>(trees_.size());
    for (double& h : v) h *= inv;
    return StepFunction(grid.points, std::move(v), 0.0);
}

double ForestModel::mean_cumhazard_at(std::span<const double> x, double t) const {
    double h = 0.0;
    for (const Tree& tree : trees_) h += leaf_curve(tree, x)(t);
    return h / static_cast<double>(trees_.size());
}

ForestModel fit_survival_forest(const SurvivalDataset& ds, const ForestConfig& config,
                                int threads) {
    const std::size_t p = ds.n_features();
    if (config.n_trees < 1) {
        throw InvalidInput("fit_survival_forest: n_trees must be >= 1");
    }
    if (config.mtry < 0 || static_cast<std::size_t>(config.mtry) > p) {
        throw InvalidInput("fit_survival_forest: mtry must be in [0, p]");
    }
    if (config.min_node_size < 1) {
        throw InvalidInput("fit_survival_forest: min_node_size must be >= 1");
    }
    if (ds.n_events() == 0) {
        throw ComputeError("fit_survival_forest: no events in dataset, nothing to fit");
    }
    const int mtry = config.mtry > 0
                         ? config.mtry
                         : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(p))));

    std::vector<Tree> trees(static_cast<std::size_t>(config.n_trees));
    parallel_for(trees.size(), threads, [&](std::size_t i) {
        trees[i] = grow_tree(ds, config, mtry, derive_seed(config.seed, i));
    });
    return ForestModel(std::move(trees), config, p, ds.feature_names(), ds.encoding());
}

double log_rank_statistic(std::span<const double> times, std::span<const std::uint8_t> events,
                          std::span<const std::uint8_t> in_first_group) {
    if (times.size() != events.size() || times.size() != in_first_group.size()) {
        throw InvalidInput("log_rank_statistic: input lengths differ");
    }
    std::vector<double> event_times;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (events[i]) event_times.push_back(times[i]);
    }
    std::sort(event_times.begin(), event_times.end());
    event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());

    double num = 0.0;
    double var = 0.0;
    for (double t : event_times) {
        double y = 0.0, y1 = 0.0, d = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (times[i] >= t) {
                y += 1.0;
                y1 += in_first_group[i] ? 1.0 : 0.0;
            }
            if (events[i] && times[i] == t) {
                d += 1.0;
                d1 += in_first_group[i] ? 1.0 : 0.0;
            }
        }
        num += d1 - y1 * d / y;
        if (y > 1.0) var += (y1 / y) * (1.0 - y1 / y) * ((y - d) / (y - 1.0)) * d;
    }
    if (!(var > 0.0)) return 0.0;
    return std::abs(num) / std::sqrt(var);
}

} // namespace survkit
