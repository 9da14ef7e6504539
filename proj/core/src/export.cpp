#include "survkit/export.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "survkit/errors.hpp"
#include "survkit/format.hpp"

namespace survkit {

namespace {

using nlohmann::json;

json number_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

json values_to_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number_or_null(x));
    return a;
}

json provenance_to_json(const Provenance& p) {
    json params = json::object();
    for (const auto& [key, value] : p.parameters) params[key] = value;
    return json{{"model_id", p.model_id},
                {"dataset_id", p.dataset_id},
                {"seed", p.seed},
                {"parameters", std::move(params)}};
}

// Fixed two-decimal pixel coordinate.
std::string px(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

constexpr const char* palette[] = {
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
    "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd",
};
constexpr std::size_t palette_size = sizeof(palette) / sizeof(palette[0]);

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string dataset_to_csv(const SurvivalDataset& ds, const OutcomeSchema& schema) {
    std::string out;
    for (const auto& name : ds.feature_names()) {
        out += csv_field(name);
        out += ',';
    }
    out += csv_field(schema.time_column);
    out += ',';
    out += csv_field(schema.event_column);
    out += '\n';
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        for (std::size_t j = 0; j < ds.n_features(); ++j) {
            out += format_number(ds.at(i, j));
            out += ',';
        }
        out += format_number(ds.times()[i]);
        out += ',';
        out += ds.events()[i] ? '1' : '0';
        out += '\n';
    }
    return out;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string quoted = "\"";
    for (char c : value) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string curve_set_to_csv(const ExplanationCurveSet& set) {
    std::string out = "kind,curve_name,time,value,dispersion\n";
    const std::string kind = explanation_kind_name(set.kind);
    for (std::size_t c = 0; c < set.curves.size(); ++c) {
        const bool has_band = !set.dispersion.empty() && !set.dispersion[c].empty();
        for (std::size_t k = 0; k < set.grid.size(); ++k) {
            out += kind;
            out += ',';
            out += csv_field(set.curve_names[c]);
            out += ',';
            out += format_number(set.grid.points[k]);
            out += ',';
            out += format_number(set.curves[c][k]);
            out += ',';
            if (has_band) out += format_number(set.dispersion[c][k]);
            out += '\n';
        }
    }
    return out;
}

std::string curve_set_to_json(const ExplanationCurveSet& set) {
    json curves = json::array();
    for (std::size_t c = 0; c < set.curves.size(); ++c) {
        json entry{{"name", set.curve_names[c]}, {"values", values_to_json(set.curves[c])}};
        if (!set.dispersion.empty() && !set.dispersion[c].empty()) {
            entry["dispersion"] = values_to_json(set.dispersion[c]);
        } else {
            entry["dispersion"] = nullptr;
        }
        curves.push_back(std::move(entry));
    }
    const json j{{"format", "survkit-curves"},
                 {"version", 1},
                 {"kind", explanation_kind_name(set.kind)},
                 {"grid", values_to_json(set.grid.points)},
                 {"curves", std::move(curves)},
                 {"provenance", provenance_to_json(set.provenance)}};
    return j.dump(2) + "\n";
}

std::string metric_curve_to_csv(const MetricCurve& curve) {
    std::string out = "time,value\n";
    for (std::size_t k = 0; k < curve.grid.size(); ++k) {
        out += format_number(curve.grid.points[k]);
        out += ',';
        out += format_number(curve.values[k]);
        out += '\n';
    }
    return out;
}

std::string metric_curve_to_json(const MetricCurve& curve) {
    json exclusions = json::array();
    for (std::size_t e : curve.exclusions) exclusions.push_back(e);
    const json j{{"format", "survkit-metric"},
                 {"version", 1},
                 {"name", curve.metric_name},
                 {"orientation",
                  curve.orientation == Orientation::higher_better ? "higher-better"
                                                                  : "lower-better"},
                 {"grid", values_to_json(curve.grid.points)},
                 {"values", values_to_json(curve.values)},
                 {"exclusions", std::move(exclusions)}};
    return j.dump(2) + "\n";
}

std::string curve_set_to_svg(const ExplanationCurveSet& set) {
    constexpr double width = 880, height = 560;
    constexpr double ml = 70, mr = 30, mt = 34, mb = 52;
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    const double x_min = set.grid.min();
    const double x_max = set.grid.max();
    double y_min = 0.0, y_max = 0.0;
    bool have_y = false;
    for (std::size_t c = 0; c < set.curves.size(); ++c) {
        const bool has_band = !set.dispersion.empty() && !set.dispersion[c].empty();
        for (std::size_t k = 0; k < set.grid.size(); ++k) {
            const double v = set.curves[c][k];
            if (std::isnan(v)) continue;
            const double band = has_band && !std::isnan(set.dispersion[c][k])
                                    ? set.dispersion[c][k]
                                    : 0.0;
            const double lo = v - band, hi = v + band;
            if (!have_y) {
                y_min = lo;
                y_max = hi;
                have_y = true;
            } else {
                y_min = std::min(y_min, lo);
                y_max = std::max(y_max, hi);
            }
        }
    }
    if (!have_y) {
        y_min = 0.0;
        y_max = 1.0;
    }
    if (y_max == y_min) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double pad = (y_max - y_min) * 0.05;
    y_min -= pad;
    y_max += pad;

    const auto x_px = [&](double t) {
        return ml + (x_max > x_min ? (t - x_min) / (x_max - x_min) : 0.5) * plot_w;
    };
    const auto y_px = [&](double v) { return mt + (1.0 - (v - y_min) / (y_max - y_min)) * plot_h; };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(width) +
                      "\" height=\"" + px(height) + "\" viewBox=\"0 0 " + px(width) + " " +
                      px(height) + "\">\n";
    svg += "<rect width=\"" + px(width) + "\" height=\"" + px(height) + "\" fill=\"white\"/>\n";
    svg += "<text x=\"" + px(ml) + "\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\">" +
           std::string(explanation_kind_name(set.kind)) + "</text>\n";

    // Axes with 5 linear ticks each.
    svg += "<g stroke=\"#333333\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg += "<line x1=\"" + px(ml) + "\" y1=\"" + px(mt + plot_h) + "\" x2=\"" + px(ml + plot_w) +
           "\" y2=\"" + px(mt + plot_h) + "\"/>\n";
    svg += "<line x1=\"" + px(ml) + "\" y1=\"" + px(mt) + "\" x2=\"" + px(ml) + "\" y2=\"" +
           px(mt + plot_h) + "\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x_min + (x_max - x_min) * i / 4.0;
        const double fy = y_min + pad + (y_max - y_min - 2 * pad) * i / 4.0;
        svg += "<line x1=\"" + px(x_px(fx)) + "\" y1=\"" + px(mt + plot_h) + "\" x2=\"" +
               px(x_px(fx)) + "\" y2=\"" + px(mt + plot_h + 5) + "\"/>\n";
        svg += "<text x=\"" + px(x_px(fx)) + "\" y=\"" + px(mt + plot_h + 18) +
               "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333333\">" + format_number(fx) +
               "</text>\n";
        svg += "<line x1=\"" + px(ml - 5) + "\" y1=\"" + px(y_px(fy)) + "\" x2=\"" + px(ml) +
               "\" y2=\"" + px(y_px(fy)) + "\"/>\n";
        svg += "<text x=\"" + px(ml - 8) + "\" y=\"" + px(y_px(fy) + 4) +
               "\" text-anchor=\"end\" stroke=\"none\" fill=\"#333333\">" + format_number(fy) +
               "</text>\n";
    }
    svg += "<text x=\"" + px(ml + plot_w / 2) + "\" y=\"" + px(height - 12) +
           "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333333\">time</text>\n";
    svg += "</g>\n";

    // Ribbons first so lines draw on top. NaN stretches split the paths.
    for (std::size_t c = 0; c < set.curves.size(); ++c) {
        if (set.dispersion.empty() || set.dispersion[c].empty()) continue;
        const char* color = palette[c % palette_size];
        std::vector<std::pair<double, double>> upper, lower;
        const auto flush = [&]() {
            if (upper.size() >= 2) {
                std::string points;
                for (const auto& [x, y] : upper) points += px(x) + "," + px(y) + " ";
                for (auto it = lower.rbegin(); it != lower.rend(); ++it) {
                    points += px(it->first) + "," + px(it->second) + " ";
                }
                if (!points.empty()) points.pop_back();
                svg += "<polygon points=\"" + points + "\" fill=\"" + color +
                       "\" fill-opacity=\"0.18\" stroke=\"none\"/>\n";
            }
            upper.clear();
            lower.clear();
        };
        for (std::size_t k = 0; k < set.grid.size(); ++k) {
            const double v = set.curves[c][k];
            const double band = set.dispersion[c][k];
            if (std::isnan(v) || std::isnan(band)) {
                flush();
                continue;
            }
            upper.emplace_back(x_px(set.grid.points[k]), y_px(v + band));
            lower.emplace_back(x_px(set.grid.points[k]), y_px(v - band));
        }
        flush();
    }

    for (std::size_t c = 0; c < set.curves.size(); ++c) {
        const char* color = palette[c % palette_size];
        std::string points;
        const auto flush = [&]() {
            if (std::count(points.begin(), points.end(), ' ') >= 1) {
                svg += "<polyline points=\"" + points.substr(0, points.size() - 1) +
                       "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
            }
            points.clear();
        };
        for (std::size_t k = 0; k < set.grid.size(); ++k) {
            const double v = set.curves[c][k];
            if (std::isnan(v)) {
                flush();
                continue;
            }
            points += px(x_px(set.grid.points[k])) + "," + px(y_px(v)) + " ";
        }
        flush();
    }

    // Legend.
    svg += "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t c = 0; c < set.curves.size(); ++c) {
        const double ly = mt + 10 + 16.0 * static_cast<double>(c);
        svg += "<rect x=\"" + px(ml + plot_w - 150) + "\" y=\"" + px(ly - 9) +
               "\" width=\"10\" height=\"10\" fill=\"" + std::string(palette[c % palette_size]) +
               "\"/>\n";
        svg += "<text x=\"" + px(ml + plot_w - 135) + "\" y=\"" + px(ly) + "\">" +
               xml_escape(set.curve_names[c]) + "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw InvalidInput("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace survkit
