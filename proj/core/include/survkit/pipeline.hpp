#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "survkit/dataset.hpp"
#include "survkit/simulate.hpp"

namespace survkit {

struct ModelSpec {
    std::string kind = "coxph"; // coxph | forest
    int max_iter = 50;          // coxph
    double tol = 1e-7;          // coxph
    int n_trees = 200;          // forest
    int mtry = 0;               // forest; 0 = ceil(sqrt(p))
    int min_node_size = 15;     // forest
};

struct GridSpec {
    std::string strategy = "default"; // default | event-times | quantiles
    std::size_t m = 100;              // quantiles only
};

struct EvaluationSpec {
    int k_folds = 10;
    int repeats = 1;
    std::vector<std::string> metrics = {"cindex", "ibs", "iauc"};
};

struct GroupSpec {
    std::string name;
    std::vector<std::string> features;
};

struct ExplanationSpec {
    std::vector<std::string> methods;  // subset of ice pdp shap sfi pfi gpfi
    std::size_t observation = 0;       // ice and shap target row
    std::vector<std::string> features; // ice/pdp/pfi targets; empty = all features
    std::vector<GroupSpec> groups;     // gpfi
    int b = 10;
    std::string mode = "absolute-difference"; // difference | relative | absolute-difference
    std::string estimator = "exact";          // exact | sampling
    std::size_t n_samples = 1000;
    std::size_t background_cap = 100;
    bool svg = false;
};

/// One document driving every verb; parsed from JSON, overridable by CLI
/// flags. The seed is mandatory for any stochastic verb.
struct RunConfig {
    std::string dataset_path;
    OutcomeSchema outcome;
    ModelSpec model;
    GridSpec grid;
    EvaluationSpec evaluation;
    ExplanationSpec explanation;
    SimulationConfig simulation;
    std::string model_file; // explain: fitted model document
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

/// Parse the JSON run-config document; unknown keys are rejected so typos
/// fail loudly. Throws InvalidInput.
RunConfig parse_run_config(const std::string& json_text);

/// What a verb produced: file paths (relative to out_dir) and a deterministic
/// one-line-per-item summary for the terminal.
struct VerbResult {
    std::vector<std::string> files;
    std::string summary;
};

VerbResult run_fit(const RunConfig& config, int threads = 1);
VerbResult run_evaluate(const RunConfig& config, int threads = 1);
VerbResult run_explain(const RunConfig& config, int threads = 1);
VerbResult run_simulate(const RunConfig& config);

/// Deterministic stratified k-fold assignment: event and censored rows are
/// shuffled within their stratum and dealt round-robin, so every fold holds
/// events whenever k <= number of events. Returns k row-index lists.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::uint8_t> events,
                                                       int k, std::uint64_t seed);

/// Grid for a dataset per the grid spec.
TimeGrid grid_from_spec(const SurvivalDataset& ds, const GridSpec& spec);

} // namespace survkit
