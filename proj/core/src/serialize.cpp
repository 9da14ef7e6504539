#include "survkit/serialize.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "survkit/errors.hpp"

namespace survkit {

namespace {

using nlohmann::json;

constexpr int format_version = 1;

// NaN is not representable in JSON; encode as null.
json doubles_to_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) {
        if (std::isnan(x)) {
            a.push_back(nullptr);
        } else {
            a.push_back(x);
        }
    }
    return a;
}

std::vector<double> doubles_from_json(const json& a, const char* field) {
    if (!a.is_array()) throw InvalidInput(std::string("model document: ") + field + " must be an array");
    std::vector<double> v;
    v.reserve(a.size());
    for (const auto& x : a) {
        if (x.is_null()) {
            v.push_back(std::numeric_limits<double>::quiet_NaN());
        } else if (x.is_number()) {
            v.push_back(x.get<double>());
        } else {
            throw InvalidInput(std::string("model document: ") + field + " holds a non-number");
        }
    }
    return v;
}

json step_function_to_json(const StepFunction& sf) {
    return json{{"knots", doubles_to_json(sf.knots())},
                {"values", doubles_to_json(sf.values())},
                {"initial", sf.initial_value()}};
}

StepFunction step_function_from_json(const json& j) {
    return StepFunction(doubles_from_json(j.at("knots"), "knots"),
                        doubles_from_json(j.at("values"), "values"),
                        j.at("initial").get<double>());
}

json encoding_to_json(const std::vector<ColumnEncoding>& encoding) {
    json a = json::array();
    for (const auto& e : encoding) {
        a.push_back(json{{"source_column", e.source_column},
                         {"categorical", e.categorical},
                         {"levels", e.levels}});
    }
    return a;
}

std::vector<ColumnEncoding> encoding_from_json(const json& a) {
    std::vector<ColumnEncoding> encoding;
    for (const auto& e : a) {
        ColumnEncoding c;
        c.source_column = e.at("source_column").get<std::string>();
        c.categorical = e.at("categorical").get<bool>();
        c.levels = e.at("levels").get<std::vector<std::string>>();
        encoding.push_back(std::move(c));
    }
    return encoding;
}

json envelope(const char* kind, const std::vector<std::string>& feature_names,
              const std::vector<ColumnEncoding>& encoding) {
    return json{{"format", "survkit-model"},
                {"version", format_version},
                {"kind", kind},
                {"feature_names", feature_names},
                {"encoding", encoding_to_json(encoding)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parse_envelope(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("model document: invalid JSON: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != "survkit-model") {
        throw InvalidInput("model document: not a survkit model (missing format marker)");
    }
    if (j.value("version", -1) != format_version) {
        throw InvalidInput("model document: unsupported version " +
                           std::to_string(j.value("version", -1)));
    }
    return j;
}

} // namespace

std::string model_to_json(const CoxModel& model) {
    json j = envelope("coxph", model.feature_names(), model.encoding());
    j["coxph"] = json{
        {"coefficients", doubles_to_json(model.coefficients())},
        {"standard_errors", doubles_to_json(model.standard_errors())},
        {"baseline_cumhazard", step_function_to_json(model.baseline_cumhazard())},
        {"diagnostics",
         json{{"iterations", model.diagnostics().iterations},
              {"converged", model.diagnostics().converged},
              {"loglik_trace", doubles_to_json(model.diagnostics().loglik_trace)}}},
    };
    return dump(j);
}

std::string model_to_json(const ForestModel& model) {
    json trees = json::array();
    for (const Tree& tree : model.trees()) {
        json nodes = json::array();
        for (const TreeNode& node : tree.nodes) {
            if (node.split_feature < 0) {
                nodes.push_back(json{{"curve", step_function_to_json(node.curve)}});
            } else {
                nodes.push_back(json{{"feature", node.split_feature},
                                     {"threshold", node.threshold},
                                     {"left", node.left},
                                     {"right", node.right}});
            }
        }
        trees.push_back(json{{"nodes", std::move(nodes)}});
    }
    json j = envelope("forest", model.feature_names(), model.encoding());
    j["forest"] = json{
        {"config", json{{"n_trees", model.config().n_trees},
                        {"mtry", model.config().mtry},
                        {"min_node_size", model.config().min_node_size},
                        {"seed", model.config().seed}}},
        {"n_features", model.n_features()},
        {"trees", std::move(trees)},
    };
    return dump(j);
}

std::string model_to_json(const SurvivalModel& model) {
    if (const auto* cox = dynamic_cast<const CoxModel*>(&model)) return model_to_json(*cox);
    if (const auto* forest = dynamic_cast<const ForestModel*>(&model)) {
        return model_to_json(*forest);
    }
    throw InvalidInput("model_to_json: unsupported model type");
}

std::unique_ptr<SurvivalModel> model_from_json(const std::string& text) {
    const json j = parse_envelope(text);
    const std::string kind = j.value("kind", "");
    try {
        const auto feature_names = j.at("feature_names").get<std::vector<std::string>>();
        const auto encoding = encoding_from_json(j.at("encoding"));
        if (kind == "coxph") {
            const json& c = j.at("coxph");
            const json& d = c.at("diagnostics");
            CoxDiagnostics diag;
            diag.iterations = d.at("iterations").get<int>();
            diag.converged = d.at("converged").get<bool>();
            diag.loglik_trace = doubles_from_json(d.at("loglik_trace"), "loglik_trace");
            return std::make_unique<CoxModel>(
                doubles_from_json(c.at("coefficients"), "coefficients"),
                doubles_from_json(c.at("standard_errors"), "standard_errors"),
                step_function_from_json(c.at("baseline_cumhazard")), std::move(diag),
                feature_names, encoding);
        }
        if (kind == "forest") {
            const json& f = j.at("forest");
            ForestConfig config;
            config.n_trees = f.at("config").at("n_trees").get<int>();
            config.mtry = f.at("config").at("mtry").get<int>();
            config.min_node_size = f.at("config").at("min_node_size").get<int>();
            config.seed = f.at("config").at("seed").get<std::uint64_t>();
            std::vector<Tree> trees;
            for (const json& jt : f.at("trees")) {
                Tree tree;
                for (const json& jn : jt.at("nodes")) {
                    TreeNode node;
                    if (jn.contains("feature")) {
                        node.split_feature = jn.at("feature").get<std::int32_t>();
                        node.threshold = jn.at("threshold").get<double>();
                        node.left = jn.at("left").get<std::int32_t>();
                        node.right = jn.at("right").get<std::int32_t>();
                    } else {
                        node.curve = step_function_from_json(jn.at("curve"));
                    }
                    tree.nodes.push_back(std::move(node));
                }
                trees.push_back(std::move(tree));
            }
            return std::make_unique<ForestModel>(std::move(trees), config,
                                                 f.at("n_features").get<std::size_t>(),
                                                 feature_names, encoding);
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("model document: missing or mistyped field: ") + e.what());
    }
    throw InvalidInput("model document: unknown kind '" + kind + "'");
}

void save_model(const SurvivalModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
    out << model_to_json(model);
    if (!out) throw InvalidInput("failed writing '" + path + "'");
}

std::unique_ptr<SurvivalModel> load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

std::string content_id(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[15 - i] = hex[(h >> (i * 4)) & 0xF];
    }
    buf[16] = '\0';
    return std::string(buf);
}

} // namespace survkit
