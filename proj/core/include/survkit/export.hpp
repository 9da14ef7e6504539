#pragma once

#include <string>

#include "survkit/dataset.hpp"
#include "survkit/explanation.hpp"
#include "survkit/metrics.hpp"

namespace survkit {

/// Dataset as CSV: feature columns, then the time and event columns, in a
/// form load_dataset accepts back.
std::string dataset_to_csv(const SurvivalDataset& ds, const OutcomeSchema& schema = {});

/// Long-format CSV: kind,curve_name,time,value,dispersion. The dispersion
/// column is empty for curves without a band; NaN prints as "nan". UTF-8,
/// '.' decimal separator, LF line endings.
std::string curve_set_to_csv(const ExplanationCurveSet& set);

/// JSON document embedding the curves and their provenance.
std::string curve_set_to_json(const ExplanationCurveSet& set);

/// Self-contained SVG: one polyline per curve over time, with a translucent
/// ribbon of +-1 dispersion where a band is present.
std::string curve_set_to_svg(const ExplanationCurveSet& set);

/// CSV with columns time,value.
std::string metric_curve_to_csv(const MetricCurve& curve);

/// JSON document with metric metadata (orientation, exclusions).
std::string metric_curve_to_json(const MetricCurve& curve);

/// Quote a CSV field if it contains a delimiter, quote or newline.
std::string csv_field(const std::string& value);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace survkit
