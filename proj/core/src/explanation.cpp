#include "survkit/explanation.hpp"

#include "survkit/errors.hpp"

namespace survkit {

const char* explanation_kind_name(ExplanationKind kind) {
    switch (kind) {
    case ExplanationKind::ice: return "ice";
    case ExplanationKind::pdp: return "pdp";
    case ExplanationKind::shap_local: return "shap-local";
    case ExplanationKind::shap_importance: return "shap-importance";
    case ExplanationKind::perm_importance: return "perm-importance";
    case ExplanationKind::grouped_perm_importance: return "grouped-perm-importance";
    }
    return "unknown";
}

const std::vector<double>& ExplanationCurveSet::curve(const std::string& name) const {
    for (std::size_t i = 0; i < curve_names.size(); ++i) {
        if (curve_names[i] == name) return curves[i];
    }
    throw InvalidInput("curve set has no curve named '" + name + "'");
}

} // namespace survkit
