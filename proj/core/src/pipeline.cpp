#include "survkit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include "json.hpp"

#include "survkit/cox.hpp"
#include "survkit/effects.hpp"
#include "survkit/errors.hpp"
#include "survkit/export.hpp"
#include "survkit/forest.hpp"
#include "survkit/format.hpp"
#include "survkit/importance.hpp"
#include "survkit/metrics.hpp"
#include "survkit/nonparametric.hpp"
#include "survkit/parallel.hpp"
#include "survkit/rng.hpp"
#include "survkit/serialize.hpp"
#include "survkit/shap.hpp"

namespace survkit {

namespace {

using nlohmann::json;

constexpr const char* run_schema = "survkit-run/1";

[[noreturn]] void config_error(const std::string& message) {
    throw InvalidInput("run config: " + message);
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const char* where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end()) {
            config_error(std::string("unknown key '") + key + "' in " + where);
        }
    }
}

std::uint64_t parse_seed_value(const json& j) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    config_error("seed must be a non-negative integer");
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        config_error(std::string("key '") + key + "' has the wrong type");
    }
}

const std::set<std::string>& known_methods() {
    static const std::set<std::string> methods = {"ice", "pdp", "shap", "sfi", "pfi", "gpfi"};
    return methods;
}

const std::set<std::string>& known_metrics() {
    static const std::set<std::string> metrics = {"cindex", "ibs", "iauc"};
    return metrics;
}

std::string sanitize_filename(const std::string& name) {
    std::string out;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        out += ok ? c : '_';
    }
    return out.empty() ? "_" : out;
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        config_error(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) config_error("document must be a JSON object");
    reject_unknown_keys(j,
                        {"schema", "seed", "out", "dataset", "grid", "model", "evaluation",
                         "explanation", "simulate", "model_file"},
                        "the top level");
    if (j.contains("schema") && j.at("schema") != run_schema) {
        config_error(std::string("unsupported schema (expected \"") + run_schema + "\")");
    }

    RunConfig config;
    if (j.contains("seed")) {
        config.seed = parse_seed_value(j.at("seed"));
        config.seed_set = true;
    }
    config.out_dir = get_or<std::string>(j, "out", config.out_dir);
    config.model_file = get_or<std::string>(j, "model_file", "");

    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        reject_unknown_keys(d, {"path", "time_column", "event_column"}, "dataset");
        config.dataset_path = get_or<std::string>(d, "path", "");
        config.outcome.time_column = get_or<std::string>(d, "time_column", "time");
        config.outcome.event_column = get_or<std::string>(d, "event_column", "event");
    }

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown_keys(g, {"strategy", "m"}, "grid");
        config.grid.strategy = get_or<std::string>(g, "strategy", "default");
        config.grid.m = get_or<std::size_t>(g, "m", config.grid.m);
        if (config.grid.strategy != "default" && config.grid.strategy != "event-times" &&
            config.grid.strategy != "quantiles") {
            config_error("grid.strategy must be default, event-times or quantiles");
        }
        if (config.grid.strategy == "quantiles" && config.grid.m < 1) {
            config_error("grid.m must be >= 1");
        }
    }

    if (j.contains("model")) {
        const json& m = j.at("model");
        reject_unknown_keys(m, {"kind", "max_iter", "tol", "n_trees", "mtry", "min_node_size"},
                            "model");
        config.model.kind = get_or<std::string>(m, "kind", "coxph");
        if (config.model.kind != "coxph" && config.model.kind != "forest") {
            config_error("model.kind must be coxph or forest");
        }
        config.model.max_iter = get_or<int>(m, "max_iter", config.model.max_iter);
        config.model.tol = get_or<double>(m, "tol", config.model.tol);
        config.model.n_trees = get_or<int>(m, "n_trees", config.model.n_trees);
        config.model.mtry = get_or<int>(m, "mtry", config.model.mtry);
        config.model.min_node_size = get_or<int>(m, "min_node_size", config.model.min_node_size);
    }

    if (j.contains("evaluation")) {
        const json& e = j.at("evaluation");
        reject_unknown_keys(e, {"k_folds", "repeats", "metrics"}, "evaluation");
        config.evaluation.k_folds = get_or<int>(e, "k_folds", config.evaluation.k_folds);
        config.evaluation.repeats = get_or<int>(e, "repeats", config.evaluation.repeats);
        if (e.contains("metrics")) {
            config.evaluation.metrics = e.at("metrics").get<std::vector<std::string>>();
        }
        if (config.evaluation.k_folds < 2) config_error("evaluation.k_folds must be >= 2");
        if (config.evaluation.repeats < 1) config_error("evaluation.repeats must be >= 1");
        if (config.evaluation.metrics.empty()) config_error("evaluation.metrics must be non-empty");
        for (const auto& name : config.evaluation.metrics) {
            if (!known_metrics().count(name)) {
                config_error("unknown metric '" + name + "' (known: cindex, ibs, iauc)");
            }
        }
    }

    if (j.contains("explanation")) {
        const json& x = j.at("explanation");
        reject_unknown_keys(x,
                            {"methods", "observation", "features", "groups", "b", "mode",
                             "estimator", "n_samples", "background_cap", "svg"},
                            "explanation");
        if (x.contains("methods")) {
            config.explanation.methods = x.at("methods").get<std::vector<std::string>>();
        }
        for (const auto& m : config.explanation.methods) {
            if (!known_methods().count(m)) {
                config_error("unknown explanation method '" + m +
                             "' (known: ice, pdp, shap, sfi, pfi, gpfi)");
            }
        }
        config.explanation.observation =
            get_or<std::size_t>(x, "observation", config.explanation.observation);
        if (x.contains("features")) {
            config.explanation.features = x.at("features").get<std::vector<std::string>>();
        }
        if (x.contains("groups")) {
            for (const json& g : x.at("groups")) {
                reject_unknown_keys(g, {"name", "features"}, "explanation.groups entries");
                GroupSpec spec;
                spec.name = get_or<std::string>(g, "name", "");
                if (g.contains("features")) {
                    spec.features = g.at("features").get<std::vector<std::string>>();
                }
                if (spec.name.empty() || spec.features.empty()) {
                    config_error("each group needs a name and a non-empty feature list");
                }
                config.explanation.groups.push_back(std::move(spec));
            }
        }
        config.explanation.b = get_or<int>(x, "b", config.explanation.b);
        if (config.explanation.b < 1) config_error("explanation.b must be >= 1");
        config.explanation.mode = get_or<std::string>(x, "mode", config.explanation.mode);
        if (config.explanation.mode != "difference" && config.explanation.mode != "relative" &&
            config.explanation.mode != "absolute-difference") {
            config_error("explanation.mode must be difference, relative or absolute-difference");
        }
        config.explanation.estimator =
            get_or<std::string>(x, "estimator", config.explanation.estimator);
        if (config.explanation.estimator != "exact" &&
            config.explanation.estimator != "sampling") {
            config_error("explanation.estimator must be exact or sampling");
        }
        config.explanation.n_samples =
            get_or<std::size_t>(x, "n_samples", config.explanation.n_samples);
        if (config.explanation.n_samples < 1) config_error("explanation.n_samples must be >= 1");
        config.explanation.background_cap =
            get_or<std::size_t>(x, "background_cap", config.explanation.background_cap);
        config.explanation.svg = get_or<bool>(x, "svg", config.explanation.svg);
    }

    if (j.contains("simulate")) {
        const json& s = j.at("simulate");
        reject_unknown_keys(s, {"n", "beta", "baseline_rate", "censoring_rate"}, "simulate");
        config.simulation.n = get_or<std::size_t>(s, "n", config.simulation.n);
        if (s.contains("beta")) {
            config.simulation.beta = s.at("beta").get<std::vector<double>>();
        }
        config.simulation.baseline_rate =
            get_or<double>(s, "baseline_rate", config.simulation.baseline_rate);
        config.simulation.censoring_rate =
            get_or<double>(s, "censoring_rate", config.simulation.censoring_rate);
    }
    return config;
}

TimeGrid grid_from_spec(const SurvivalDataset& ds, const GridSpec& spec) {
    if (spec.strategy == "event-times") {
        return make_time_grid(ds, GridStrategy::event_times());
    }
    if (spec.strategy == "quantiles") {
        return make_time_grid(ds, GridStrategy::quantiles(spec.m));
    }
    return default_time_grid(ds);
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::uint8_t> events,
                                                       int k, std::uint64_t seed) {
    if (k < 2) throw InvalidInput("stratified_folds: k must be >= 2");
    std::vector<std::size_t> with_event, censored;
    for (std::size_t i = 0; i < events.size(); ++i) {
        (events[i] ? with_event : censored).push_back(i);
    }
    Rng rng(seed);
    const auto shuffled = [&rng](std::vector<std::size_t> rows) {
        const std::vector<std::size_t> perm = rng.permutation(rows.size());
        std::vector<std::size_t> out(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[perm[i]];
        return out;
    };
    const std::vector<std::size_t> ev = shuffled(std::move(with_event));
    const std::vector<std::size_t> ce = shuffled(std::move(censored));

    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < ev.size(); ++i) {
        folds[i % static_cast<std::size_t>(k)].push_back(ev[i]);
    }
    // Continue dealing where the event stratum stopped, balancing fold sizes.
    const std::size_t offset = ev.size();
    for (std::size_t i = 0; i < ce.size(); ++i) {
        folds[(offset + i) % static_cast<std::size_t>(k)].push_back(ce[i]);
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

namespace {

struct LoadedDataset {
    SurvivalDataset ds;
    std::string id;
};

LoadedDataset load_config_dataset(const RunConfig& config) {
    if (config.dataset_path.empty()) config_error("dataset.path is required");
    const std::string bytes = read_text_file(config.dataset_path);
    std::istringstream in(bytes);
    return {load_dataset(in, config.outcome), content_id(bytes)};
}

void require_seed(const RunConfig& config) {
    if (!config.seed_set) config_error("seed is required (set \"seed\" or pass --seed)");
}

std::filesystem::path ensure_out_dir(const RunConfig& config) {
    const std::filesystem::path dir = config.out_dir.empty() ? "." : config.out_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InvalidInput("cannot create output directory '" + dir.string() + "'");
    return dir;
}

std::unique_ptr<SurvivalModel> fit_model_for(const ModelSpec& spec, const SurvivalDataset& ds,
                                             std::uint64_t seed, int threads) {
    if (spec.kind == "forest") {
        ForestConfig fc;
        fc.n_trees = spec.n_trees;
        fc.mtry = spec.mtry;
        fc.min_node_size = spec.min_node_size;
        fc.seed = seed;
        return std::make_unique<ForestModel>(fit_survival_forest(ds, fc, threads));
    }
    CoxFitConfig cc;
    cc.max_iter = spec.max_iter;
    cc.tol = spec.tol;
    return std::make_unique<CoxModel>(fit_coxph(ds, cc));
}

json model_spec_echo(const ModelSpec& spec) {
    if (spec.kind == "forest") {
        return json{{"kind", "forest"},
                    {"n_trees", spec.n_trees},
                    {"mtry", spec.mtry},
                    {"min_node_size", spec.min_node_size}};
    }
    return json{{"kind", "coxph"}, {"max_iter", spec.max_iter}, {"tol", spec.tol}};
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_sd_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

VerbResult run_fit(const RunConfig& config, int threads) {
    require_seed(config);
    const LoadedDataset data = load_config_dataset(config);
    const auto dir = ensure_out_dir(config);

    const std::unique_ptr<SurvivalModel> model =
        fit_model_for(config.model, data.ds, config.seed, threads);
    const std::string model_json = model_to_json(*model);
    const std::string model_id = content_id(model_json);

    VerbResult result;
    write_text_file((dir / "model.json").string(), model_json);
    result.files.push_back("model.json");

    json report{{"format", "survkit-fit"},
                {"version", 1},
                {"model", model_spec_echo(config.model)},
                {"model_id", model_id},
                {"dataset_id", data.id},
                {"seed", config.seed},
                {"n_rows", data.ds.n_rows()},
                {"n_features", data.ds.n_features()},
                {"n_events", data.ds.n_events()}};

    std::string note;
    if (const auto* cox = dynamic_cast<const CoxModel*>(model.get())) {
        report["diagnostics"] = json{{"converged", cox->diagnostics().converged},
                                     {"iterations", cox->diagnostics().iterations},
                                     {"log_partial_likelihood",
                                      cox->diagnostics().loglik_trace.back()}};
        std::string table = "feature,estimate,std_error,p_value\n";
        const std::vector<double> p_values = cox->wald_p_values();
        for (std::size_t j = 0; j < cox->coefficients().size(); ++j) {
            table += csv_field(cox->feature_names()[j]);
            table += ',';
            table += format_number(cox->coefficients()[j]);
            table += ',';
            table += format_number(cox->standard_errors()[j]);
            table += ',';
            table += format_number(p_values[j]);
            table += '\n';
        }
        write_text_file((dir / "coefficients.csv").string(), table);
        result.files.push_back("coefficients.csv");
        if (!cox->diagnostics().converged) {
            note = " (warning: did not converge within max_iter)";
        }
    }
    write_text_file((dir / "fit.json").string(), dump_json(report));
    result.files.push_back("fit.json");

    result.summary = "fit " + config.model.kind + ": n=" + std::to_string(data.ds.n_rows()) +
                     " p=" + std::to_string(data.ds.n_features()) +
                     " events=" + std::to_string(data.ds.n_events()) + note;
    return result;
}

VerbResult run_evaluate(const RunConfig& config, int threads) {
    require_seed(config);
    const LoadedDataset data = load_config_dataset(config);
    const auto dir = ensure_out_dir(config);
    const SurvivalDataset& ds = data.ds;
    const int k = config.evaluation.k_folds;
    const int repeats = config.evaluation.repeats;
    const auto& metric_names = config.evaluation.metrics;

    struct FoldJob {
        int repeat;
        int fold;
        std::vector<std::size_t> test_rows;
        std::uint64_t fit_seed;
    };
    std::vector<FoldJob> jobs;
    for (int r = 0; r < repeats; ++r) {
        const std::uint64_t rep_seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
        auto folds = stratified_folds(ds.events(), k, derive_seed(rep_seed, 0));
        for (int f = 0; f < k; ++f) {
            jobs.push_back({r, f, std::move(folds[static_cast<std::size_t>(f)]),
                            derive_seed(rep_seed, 1 + static_cast<std::uint64_t>(f))});
        }
    }

    struct FoldResult {
        bool skipped = false;
        std::size_t test_rows = 0;
        std::vector<double> values; // per metric, NaN when undefined
    };
    std::vector<FoldResult> results(jobs.size());

    parallel_for(jobs.size(), threads, [&](std::size_t idx) {
        const FoldJob& job = jobs[idx];
        FoldResult& out = results[idx];
        out.test_rows = job.test_rows.size();
        out.values.assign(metric_names.size(), std::numeric_limits<double>::quiet_NaN());

        std::vector<std::size_t> train_rows;
        train_rows.reserve(ds.n_rows() - job.test_rows.size());
        std::size_t t = 0;
        for (std::size_t i = 0; i < ds.n_rows(); ++i) {
            if (t < job.test_rows.size() && job.test_rows[t] == i) {
                ++t;
            } else {
                train_rows.push_back(i);
            }
        }

        std::size_t test_events = 0;
        for (std::size_t i : job.test_rows) test_events += (ds.events()[i] != 0);
        if (job.test_rows.empty() || test_events == 0) {
            out.skipped = true;
            return;
        }
        const SurvivalDataset train = ds.subset(train_rows);
        if (train.n_events() == 0) {
            out.skipped = true;
            return;
        }
        const SurvivalDataset test = ds.subset(job.test_rows);

        const std::unique_ptr<SurvivalModel> model =
            fit_model_for(config.model, train, job.fit_seed, 1);
        const TimeGrid grid = grid_from_spec(train, config.grid);
        const StepFunction censoring = censoring_kaplan_meier(train.times(), train.events());
        const std::vector<StepFunction> preds = predict_all(*model, test, grid);

        for (std::size_t mi = 0; mi < metric_names.size(); ++mi) {
            try {
                if (metric_names[mi] == "cindex") {
                    const std::vector<double> risk = risk_scores_from_predictions(preds, grid);
                    out.values[mi] = concordance_index(risk, test.times(), test.events());
                } else if (metric_names[mi] == "ibs") {
                    const MetricCurve brier =
                        brier_score_t(preds, test.times(), test.events(), grid, censoring);
                    out.values[mi] = integrated_brier_score(brier);
                } else if (metric_names[mi] == "iauc") {
                    const MetricCurve auc =
                        auc_t(preds, test.times(), test.events(), grid, censoring);
                    out.values[mi] = integrated_auc(auc, test.times(), test.events());
                }
            } catch (const ComputeError&) {
                // Undefined on this fold; reported as NaN and excluded from
                // the aggregates.
            }
        }
    });

    // Export: long per-fold CSV plus a JSON report with aggregates.
    std::string csv = "repeat,fold,status,test_rows";
    for (const auto& name : metric_names) csv += "," + name;
    csv += '\n';
    std::size_t skipped = 0;
    for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
        const FoldJob& job = jobs[idx];
        const FoldResult& r = results[idx];
        skipped += r.skipped;
        csv += std::to_string(job.repeat) + "," + std::to_string(job.fold) + "," +
               (r.skipped ? "skipped" : "ok") + "," + std::to_string(r.test_rows);
        for (std::size_t mi = 0; mi < metric_names.size(); ++mi) {
            csv += ',';
            if (!r.skipped) csv += format_number(r.values[mi]);
        }
        csv += '\n';
    }

    json metrics_json = json::object();
    std::string aggregate_summary;
    for (std::size_t mi = 0; mi < metric_names.size(); ++mi) {
        std::vector<double> defined;
        json values = json::array();
        for (std::size_t idx = 0; idx < jobs.size(); ++idx) {
            if (results[idx].skipped || std::isnan(results[idx].values[mi])) {
                values.push_back(nullptr);
            } else {
                values.push_back(results[idx].values[mi]);
                defined.push_back(results[idx].values[mi]);
            }
        }
        const double mean = defined.empty() ? std::numeric_limits<double>::quiet_NaN()
                                            : mean_of(defined);
        const double sd = defined.empty() ? std::numeric_limits<double>::quiet_NaN()
                                          : sample_sd_of(defined, mean);
        json entry{{"orientation", metric_names[mi] == "ibs" ? "lower-better" : "higher-better"},
                   {"values", std::move(values)},
                   {"defined_folds", defined.size()}};
        entry["mean"] = std::isnan(mean) ? json(nullptr) : json(mean);
        entry["sd"] = std::isnan(sd) ? json(nullptr) : json(sd);
        metrics_json[metric_names[mi]] = std::move(entry);
        aggregate_summary += "; " + metric_names[mi] + " " +
                             (defined.empty() ? "undefined"
                                              : format_number(mean) + " +- " + format_number(sd));
    }

    const json report{{"format", "survkit-evaluation"},
                      {"version", 1},
                      {"model", model_spec_echo(config.model)},
                      {"dataset_id", data.id},
                      {"seed", config.seed},
                      {"k_folds", k},
                      {"repeats", repeats},
                      {"skipped_folds", skipped},
                      {"metrics", std::move(metrics_json)}};

    VerbResult result;
    write_text_file((dir / "evaluation.csv").string(), csv);
    result.files.push_back("evaluation.csv");
    write_text_file((dir / "evaluation.json").string(), dump_json(report));
    result.files.push_back("evaluation.json");
    result.summary = "evaluate " + config.model.kind + ": " + std::to_string(repeats) + "x" +
                     std::to_string(k) + " folds, " + std::to_string(skipped) + " skipped" +
                     aggregate_summary;
    return result;
}

namespace {

struct ExplainContext {
    const RunConfig& config;
    const SurvivalModel& model;
    const SurvivalDataset& ds;
    const TimeGrid& grid;
    std::string model_id;
    std::string dataset_id;
    const std::filesystem::path& dir;
    VerbResult& result;
    json& artifacts;
};

void emit_curve_set(ExplainContext& ctx, ExplanationCurveSet set, const std::string& stem) {
    set.provenance.model_id = ctx.model_id;
    set.provenance.dataset_id = ctx.dataset_id;
    write_text_file((ctx.dir / (stem + ".csv")).string(), curve_set_to_csv(set));
    ctx.result.files.push_back(stem + ".csv");
    write_text_file((ctx.dir / (stem + ".json")).string(), curve_set_to_json(set));
    ctx.result.files.push_back(stem + ".json");
    if (ctx.config.explanation.svg) {
        write_text_file((ctx.dir / (stem + ".svg")).string(), curve_set_to_svg(set));
        ctx.result.files.push_back(stem + ".svg");
    }
    json params = json::object();
    for (const auto& [key, value] : set.provenance.parameters) params[key] = value;
    ctx.artifacts.push_back(json{{"stem", stem},
                                 {"kind", explanation_kind_name(set.kind)},
                                 {"curves", set.curve_names},
                                 {"parameters", std::move(params)}});
}

std::vector<std::size_t> resolve_features(const SurvivalDataset& ds,
                                          const std::vector<std::string>& names) {
    std::vector<std::size_t> out;
    if (names.empty()) {
        out.resize(ds.n_features());
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = j;
        return out;
    }
    for (const auto& name : names) out.push_back(ds.feature_index(name));
    return out;
}

} // namespace

VerbResult run_explain(const RunConfig& config, int threads) {
    require_seed(config);
    if (config.model_file.empty()) config_error("model_file is required for explain");
    if (config.explanation.methods.empty()) {
        config_error("explanation.methods must name at least one of ice, pdp, shap, sfi, pfi, gpfi");
    }
    const std::string model_bytes = read_text_file(config.model_file);
    const std::unique_ptr<SurvivalModel> model = model_from_json(model_bytes);
    const std::string model_id = content_id(model_bytes);
    const LoadedDataset data = load_config_dataset(config);
    if (model->n_features() != data.ds.n_features()) {
        throw InvalidInput("explain: model expects " + std::to_string(model->n_features()) +
                           " features but dataset has " +
                           std::to_string(data.ds.n_features()));
    }
    const auto dir = ensure_out_dir(config);
    const TimeGrid grid = grid_from_spec(data.ds, config.grid);
    const ExplanationSpec& spec = config.explanation;
    if (spec.observation >= data.ds.n_rows()) {
        config_error("explanation.observation is out of range (n = " +
                     std::to_string(data.ds.n_rows()) + ")");
    }

    VerbResult result;
    json artifacts = json::array();
    ExplainContext ctx{config, *model, data.ds, grid, model_id, data.id, dir, result, artifacts};

    // Method order is as requested (first occurrence wins); each method draws
    // from its own substream of the master seed, indexed by this fixed table.
    const auto method_tag = [](const std::string& m) -> std::uint64_t {
        if (m == "ice") return 1;
        if (m == "pdp") return 2;
        if (m == "shap") return 3;
        if (m == "sfi") return 4;
        if (m == "pfi") return 5;
        return 6; // gpfi
    };
    std::vector<std::string> methods;
    for (const auto& m : spec.methods) {
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
    }

    for (const auto& method : methods) {
        const std::uint64_t method_seed = derive_seed(config.seed, method_tag(method));
        if (method == "ice" || method == "pdp") {
            const std::vector<std::size_t> targets = resolve_features(data.ds, spec.features);
            for (std::size_t j : targets) {
                const std::vector<double> z = default_z_values(data.ds, j);
                ExplanationCurveSet set =
                    method == "ice"
                        ? ice_t(*model, data.ds.row(spec.observation), j, z, grid)
                        : pdp_t(*model, data.ds, j, z, grid, threads);
                set.provenance.seed = config.seed;
                set.provenance.parameters.emplace_back("feature_name",
                                                       data.ds.feature_names()[j]);
                if (method == "ice") {
                    set.provenance.parameters.emplace_back(
                        "observation", std::to_string(spec.observation));
                }
                emit_curve_set(ctx, std::move(set),
                               method + "_" + std::to_string(j) + "_" +
                                   sanitize_filename(data.ds.feature_names()[j]));
            }
        } else if (method == "shap") {
            ShapConfig sc;
            sc.estimator = spec.estimator == "exact" ? ShapConfig::Estimator::exact
                                                     : ShapConfig::Estimator::sampling;
            sc.n_samples = spec.n_samples;
            sc.seed = derive_seed(method_seed, 1);
            const SurvivalDataset background =
                shap_background(data.ds, spec.background_cap, derive_seed(method_seed, 0));
            ShapAttribution attribution = survshap_t(*model, data.ds.row(spec.observation),
                                                     background, grid, sc, threads);
            ExplanationCurveSet set = shap_curve_set(attribution);
            set.provenance.seed = config.seed;
            set.provenance.parameters.emplace_back("observation",
                                                   std::to_string(spec.observation));
            set.provenance.parameters.emplace_back("background_rows",
                                                   std::to_string(background.n_rows()));
            emit_curve_set(ctx, std::move(set),
                           "shap_obs" + std::to_string(spec.observation));
        } else if (method == "sfi") {
            ShapConfig sc;
            sc.estimator = spec.estimator == "exact" ? ShapConfig::Estimator::exact
                                                     : ShapConfig::Estimator::sampling;
            sc.n_samples = spec.n_samples;
            sc.seed = method_seed;
            ExplanationCurveSet set =
                sfi_t(*model, data.ds, grid, sc, threads, spec.background_cap);
            set.provenance.seed = config.seed;
            emit_curve_set(ctx, std::move(set), "sfi");
        } else if (method == "pfi") {
            PfiConfig pc;
            pc.b = spec.b;
            pc.mode = spec.mode == "difference"
                          ? PfiMode::difference
                          : (spec.mode == "relative" ? PfiMode::relative
                                                     : PfiMode::absolute_difference);
            pc.seed = method_seed;
            const std::vector<std::size_t> targets = resolve_features(data.ds, spec.features);
            std::vector<FeatureGroup> groups;
            for (std::size_t j : targets) {
                groups.push_back({data.ds.feature_names()[j], {j}});
            }
            ExplanationCurveSet set = gpfi_t(*model, data.ds, groups, grid, pc, threads);
            set.kind = ExplanationKind::perm_importance;
            set.provenance.seed = config.seed;
            emit_curve_set(ctx, std::move(set), "pfi");
        } else { // gpfi
            if (spec.groups.empty()) config_error("gpfi requires explanation.groups");
            PfiConfig pc;
            pc.b = spec.b;
            pc.mode = spec.mode == "difference"
                          ? PfiMode::difference
                          : (spec.mode == "relative" ? PfiMode::relative
                                                     : PfiMode::absolute_difference);
            pc.seed = method_seed;
            std::vector<FeatureGroup> groups;
            for (const GroupSpec& g : spec.groups) {
                FeatureGroup group;
                group.name = g.name;
                for (const auto& name : g.features) {
                    group.indices.push_back(data.ds.feature_index(name));
                }
                groups.push_back(std::move(group));
            }
            ExplanationCurveSet set = gpfi_t(*model, data.ds, groups, grid, pc, threads);
            set.provenance.seed = config.seed;
            emit_curve_set(ctx, std::move(set), "gpfi");
        }
    }

    const json manifest{{"format", "survkit-manifest"},
                        {"version", 1},
                        {"model_id", model_id},
                        {"dataset_id", data.id},
                        {"seed", config.seed},
                        {"grid_points", grid.size()},
                        {"artifacts", std::move(artifacts)}};
    write_text_file((dir / "manifest.json").string(), dump_json(manifest));
    result.files.push_back("manifest.json");
    result.summary = "explain: " + std::to_string(methods.size()) + " method(s), " +
                     std::to_string(result.files.size()) + " file(s)";
    return result;
}

VerbResult run_simulate(const RunConfig& config) {
    require_seed(config);
    const auto dir = ensure_out_dir(config);
    SimulationConfig sim = config.simulation;
    sim.seed = config.seed;
    const SurvivalDataset ds = simulate_proportional_hazards(sim);
    const std::string csv = dataset_to_csv(ds);

    VerbResult result;
    write_text_file((dir / "simulated.csv").string(), csv);
    result.files.push_back("simulated.csv");
    const json report{{"format", "survkit-simulation"},
                      {"version", 1},
                      {"dataset_id", content_id(csv)},
                      {"seed", config.seed},
                      {"n", ds.n_rows()},
                      {"p", ds.n_features()},
                      {"beta", sim.beta},
                      {"baseline_rate", sim.baseline_rate},
                      {"censoring_rate", sim.censoring_rate},
                      {"events", ds.n_events()}};
    write_text_file((dir / "simulation.json").string(), dump_json(report));
    result.files.push_back("simulation.json");
    result.summary = "simulate: n=" + std::to_string(ds.n_rows()) + " p=" +
                     std::to_string(ds.n_features()) + " events=" +
                     std::to_string(ds.n_events());
    return result;
}

} // namespace survkit
