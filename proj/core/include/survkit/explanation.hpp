#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "survkit/step_function.hpp"

namespace survkit {

enum class ExplanationKind : std::uint8_t {
    ice,
    pdp,
    shap_local,
    shap_importance,
    perm_importance,
    grouped_perm_importance,
};

const char* explanation_kind_name(ExplanationKind kind);

/// Where an explanation came from: filled by the pipeline for exports;
/// in-core computations record the seed and their parameter echo.
struct Provenance {
    std::string model_id;
    std::string dataset_id;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> parameters;
};

/// Named family of time-indexed curves sharing one grid, with optional
/// per-curve standard-deviation bands (empty inner vector = no band).
struct ExplanationCurveSet {
    TimeGrid grid;
    ExplanationKind kind = ExplanationKind::ice;
    std::vector<std::string> curve_names;
    std::vector<std::vector<double>> curves;
    std::vector<std::vector<double>> dispersion;
    Provenance provenance;

    std::size_t n_curves() const { return curves.size(); }
    const std::vector<double>& curve(const std::string& name) const;
};

} // namespace survkit
