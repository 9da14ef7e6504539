#include "survkit/simulate.hpp"

#include <cmath>
#include <string>

#include "survkit/errors.hpp"
#include "survkit/rng.hpp"

namespace survkit {

namespace {

// Rate of the exponential censoring distribution whose expected censored
// fraction over the realized subject rates equals q: solves
// (1/n) sum_i c / (c + rate_i) = q by bisection (monotone in c).
double censoring_rate_for(const std::vector<double>& rates, double q) {
    const auto censored_fraction = [&](double c) {
        double f = 0.0;
        for (double r : rates) f += c / (c + r);
        return f / static_cast<double>(rates.size());
    };
    double lo = 0.0;
    double hi = 1.0;
    while (censored_fraction(hi) < q) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = (lo + hi) / 2.0;
        (censored_fraction(mid) < q ? lo : hi) = mid;
    }
    return (lo + hi) / 2.0;
}

} // namespace

SurvivalDataset simulate_proportional_hazards(const SimulationConfig& config) {
    if (config.n < 1) throw InvalidInput("simulate: n must be >= 1");
    if (config.beta.empty()) throw InvalidInput("simulate: beta must be non-empty");
    if (!(config.baseline_rate > 0.0)) throw InvalidInput("simulate: baseline_rate must be > 0");
    if (config.censoring_rate < 0.0 || config.censoring_rate >= 1.0) {
        throw InvalidInput("simulate: censoring_rate must be in [0, 1)");
    }

    const std::size_t n = config.n;
    const std::size_t p = config.beta.size();
    Rng rng(config.seed);

    std::vector<double> features(n * p);
    for (double& v : features) v = rng.normal();

    std::vector<double> rates(n);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = 0.0;
        for (std::size_t j = 0; j < p; ++j) eta += config.beta[j] * features[i * p + j];
        rates[i] = config.baseline_rate * std::exp(eta);
    }

    std::vector<double> times(n);
    std::vector<std::uint8_t> events(n, 1);
    for (std::size_t i = 0; i < n; ++i) times[i] = rng.exponential(rates[i]);

    if (config.censoring_rate > 0.0) {
        const double c = censoring_rate_for(rates, config.censoring_rate);
        for (std::size_t i = 0; i < n; ++i) {
            const double censor = rng.exponential(c);
            if (censor < times[i]) {
                times[i] = censor;
                events[i] = 0;
            }
        }
    }

    std::vector<std::string> names(p);
    for (std::size_t j = 0; j < p; ++j) names[j] = "x" + std::to_string(j + 1);
    return SurvivalDataset(std::move(features), n, p, std::move(names),
                           std::vector<FeatureKind>(p, FeatureKind::numeric), std::move(times),
                           std::move(events));
}

} // namespace survkit
