#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "survkit/cox.hpp"
#include "survkit/forest.hpp"

namespace survkit {

/// Versioned JSON model documents. Doubles are written with their shortest
/// round-trip representation, so a load reproduces bit-identical predictions.
std::string model_to_json(const CoxModel& model);
std::string model_to_json(const ForestModel& model);

/// Dispatch on the concrete model type; throws InvalidInput for unsupported types.
std::string model_to_json(const SurvivalModel& model);

/// Parse a model document (either kind); throws InvalidInput on malformed,
/// unsupported or wrong-version input.
std::unique_ptr<SurvivalModel> model_from_json(const std::string& text);

void save_model(const SurvivalModel& model, const std::string& path);
std::unique_ptr<SurvivalModel> load_model(const std::string& path);

/// FNV-1a hash of raw bytes, as a 16-digit hex string; the provenance id of
/// models and datasets.
std::string content_id(std::string_view bytes);

} // namespace survkit
