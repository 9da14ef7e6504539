#include "survkit/nonparametric.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "survkit/errors.hpp"

namespace survkit {

namespace {

// Per unique event time: (time, deaths, at-risk count). At-risk counts every
// observation with time >= t, so observations censored exactly at t are still
// at risk for the event at t.
struct RiskTable {
    std::vector<double> time;
    std::vector<std::size_t> deaths;
    std::vector<std::size_t> at_risk;
};

RiskTable build_risk_table(std::span<const double> times, std::span<const std::uint8_t> events) {
    if (times.empty() || times.size() != events.size()) {
        throw InvalidInput("risk table: non-empty times and matching events required");
    }
    const std::size_t n = times.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    RiskTable rt;
    std::size_t i = 0;
    while (i < n) {
        const double t = times[order[i]];
        std::size_t deaths = 0;
        std::size_t j = i;
        while (j < n && times[order[j]] == t) {
            deaths += (events[order[j]] != 0);
            ++j;
        }
        if (deaths > 0) {
            rt.time.push_back(t);
            rt.deaths.push_back(deaths);
            rt.at_risk.push_back(n - i);
        }
        i = j;
    }
    return rt;
}

} // namespace

StepFunction kaplan_meier(std::span<const double> times, std::span<const std::uint8_t> events) {
    const RiskTable rt = build_risk_table(times, events);
    std::vector<double> values(rt.time.size());
    double s = 1.0;
    for (std::size_t k = 0; k < rt.time.size(); ++k) {
        s *= 1.0 - static_cast<double>(rt.deaths[k]) / static_cast<double>(rt.at_risk[k]);
        values[k] = s;
    }
    return StepFunction(rt.time, std::move(values), 1.0);
}

StepFunction nelson_aalen(std::span<const double> times, std::span<const std::uint8_t> events) {
    const RiskTable rt = build_risk_table(times, events);
    std::vector<double> values(rt.time.size());
    double h = 0.0;
    for (std::size_t k = 0; k < rt.time.size(); ++k) {
        h += static_cast<double>(rt.deaths[k]) / static_cast<double>(rt.at_risk[k]);
        values[k] = h;
    }
    return StepFunction(rt.time, std::move(values), 0.0);
}

StepFunction censoring_kaplan_meier(std::span<const double> times,
                                    std::span<const std::uint8_t> events) {
    std::vector<std::uint8_t> flipped(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) flipped[i] = events[i] ? 0 : 1;
    return kaplan_meier(times, flipped);
}

} // namespace survkit
