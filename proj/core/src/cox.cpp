#include "survkit/cox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "survkit/errors.hpp"

namespace survkit {

namespace {

struct SortedOutcome {
    std::vector<std::size_t> order; // rows sorted by ascending time
    std::vector<std::size_t> tie_start; // index into order where each unique time begins
    std::vector<std::size_t> tie_deaths; // events at that unique time
};

SortedOutcome sort_outcome(const SurvivalDataset& ds) {
    SortedOutcome s;
    const std::size_t n = ds.n_rows();
    s.order.resize(n);
    std::iota(s.order.begin(), s.order.end(), 0);
    std::sort(s.order.begin(), s.order.end(), [&](std::size_t a, std::size_t b) {
        return ds.times()[a] < ds.times()[b];
    });
    std::size_t i = 0;
    while (i < n) {
        const double t = ds.times()[s.order[i]];
        std::size_t deaths = 0;
        std::size_t j = i;
        while (j < n && ds.times()[s.order[j]] == t) {
            deaths += (ds.events()[s.order[j]] != 0);
            ++j;
        }
        s.tie_start.push_back(i);
        s.tie_deaths.push_back(deaths);
        i = j;
    }
    return s;
}

// Breslow log partial likelihood with gradient and information matrix on the
// given (possibly standardized) feature matrix. Risk-set sums accumulate from
// the largest time down; the linear predictor is shifted by its maximum so the
// exponentials cannot overflow.
struct Objective {
    double loglik;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd information; // negative Hessian
};

Objective evaluate(const Eigen::MatrixXd& X, const SurvivalDataset& ds, const SortedOutcome& so,
                   const Eigen::VectorXd& beta, bool with_derivatives) {
    const std::size_t n = ds.n_rows();
    const auto p = X.cols();
    Eigen::VectorXd eta = X * beta;
    const double shift = eta.maxCoeff();

    Objective obj;
    obj.loglik = 0.0;
    if (with_derivatives) {
        obj.gradient = Eigen::VectorXd::Zero(p);
        obj.information = Eigen::MatrixXd::Zero(p, p);
    }

    // Risk-set accumulators: s0 = sum w, s1 = sum w*x, s2 = sum w*x*x'.
    double s0 = 0.0;
    Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(p, p);

    std::size_t block = so.tie_start.size();
    std::size_t added = n;
    while (block > 0) {
        --block;
        const std::size_t begin = so.tie_start[block];
        // Everyone with time >= this block's time enters the risk set.
        while (added > begin) {
            --added;
            const std::size_t row = so.order[added];
            const double w = std::exp(eta[static_cast<Eigen::Index>(row)] - shift);
            s0 += w;
            if (with_derivatives) {
                const Eigen::VectorXd x = X.row(static_cast<Eigen::Index>(row)).transpose();
                s1 += w * x;
                s2.noalias() += w * x * x.transpose();
            }
        }
        const std::size_t deaths = so.tie_deaths[block];
        if (deaths == 0) continue;

        const std::size_t end = (block + 1 < so.tie_start.size()) ? so.tie_start[block + 1] : n;
        double eta_sum = 0.0;
        Eigen::VectorXd x_sum = Eigen::VectorXd::Zero(p);
        for (std::size_t k = begin; k < end; ++k) {
            const std::size_t row = so.order[k];
            if (!ds.events()[row]) continue;
            eta_sum += eta[static_cast<Eigen::Index>(row)];
            if (with_derivatives) x_sum += X.row(static_cast<Eigen::Index>(row)).transpose();
        }
        const double d = static_cast<double>(deaths);
        obj.loglik += eta_sum - d * (std::log(s0) + shift);
        if (with_derivatives) {
            const Eigen::VectorXd mean = s1 / s0;
            obj.gradient += x_sum - d * mean;
            obj.information.noalias() += d * (s2 / s0 - mean * mean.transpose());
        }
    }
    return obj;
}

} // namespace

CoxModel::CoxModel(std::vector<double> coefficients, std::vector<double> standard_errors,
                   StepFunction baseline_cumhazard, CoxDiagnostics diagnostics,
                   std::vector<std::string> feature_names, std::vector<ColumnEncoding> encoding)
    : coefficients_(std::move(coefficients)), standard_errors_(std::move(standard_errors)),
      baseline_cumhazard_(std::move(baseline_cumhazard)), diagnostics_(std::move(diagnostics)),
      feature_names_(std::move(feature_names)), encoding_(std::move(encoding)) {}

double CoxModel::risk_score(std::span<const double> x) const {
    if (x.size() != coefficients_.size()) {
        throw InvalidInput("cox predict: observation has " + std::to_string(x.size()) +
                           " features, model expects " + std::to_string(coefficients_.size()));
    }
    double eta = 0.0;
    for (std::size_t j = 0; j < coefficients_.size(); ++j) eta += coefficients_[j] * x[j];
    return eta;
}

void CoxModel::predict_survival_into(std::span<const double> x, const TimeGrid& grid,
                                     std::span<double> out) const {
    if (!diagnostics_.converged) {
        throw ComputeError("cox predict: model did not converge; refit before predicting");
    }
    const double r = std::exp(risk_score(x));
    for (std::size_t k = 0; k < grid.points.size(); ++k) {
        out[k] = std::exp(-baseline_cumhazard_(grid.points[k]) * r);
    }
}

StepFunction CoxModel::predict_cumhazard(std::span<const double> x, const TimeGrid& grid) const {
    if (!diagnostics_.converged) {
        throw ComputeError("cox predict: model did not converge; refit before predicting");
    }
    const double r = std::exp(risk_score(x));
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < grid.points.size(); ++k) {
        v[k] = baseline_cumhazard_(grid.points[k]) * r;
    }
    return StepFunction(grid.points, std::move(v), 0.0);
}

std::vector<double> CoxModel::wald_p_values() const {
    std::vector<double> p(coefficients_.size());
    for (std::size_t j = 0; j < coefficients_.size(); ++j) {
        const double z = coefficients_[j] / standard_errors_[j];
        p[j] = std::erfc(std::abs(z) / std::sqrt(2.0));
    }
    return p;
}

CoxModel fit_coxph(const SurvivalDataset& ds, const CoxFitConfig& config) {
    const std::size_t n = ds.n_rows();
    const std::size_t p = ds.n_features();
    if (ds.n_events() == 0) {
        throw ComputeError("fit_coxph: no events in dataset, nothing to fit");
    }
    if (config.max_iter < 1 || config.tol <= 0.0) {
        throw InvalidInput("fit_coxph: max_iter must be >= 1 and tol > 0");
    }

    // Standardize each column to mean 0, sd 1. A zero-variance column makes
    // the information matrix singular, reported up front with the culprit.
    Eigen::MatrixXd X(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ds.at(i, j);
        }
    }
    Eigen::VectorXd mean = X.colwise().mean();
    Eigen::VectorXd sd(p);
    for (std::size_t j = 0; j < p; ++j) {
        const auto col = X.col(static_cast<Eigen::Index>(j));
        sd[static_cast<Eigen::Index>(j)] =
            std::sqrt((col.array() - mean[static_cast<Eigen::Index>(j)]).square().sum() /
                      static_cast<double>(n));
        if (sd[static_cast<Eigen::Index>(j)] <= 0.0) {
            throw ComputeError("fit_coxph: singular information matrix (feature '" +
                               ds.feature_names()[j] + "' is constant)");
        }
    }
    Eigen::MatrixXd Xs = (X.rowwise() - mean.transpose()).array().rowwise() /
                         sd.transpose().array();

    const SortedOutcome so = sort_outcome(ds);

    CoxDiagnostics diag;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Objective cur = evaluate(Xs, ds, so, beta, true);
    diag.loglik_trace.push_back(cur.loglik);

    for (int it = 0; it < config.max_iter; ++it) {
        diag.iterations = it + 1;

        Eigen::LDLT<Eigen::MatrixXd> ldlt(cur.information);
        bool singular = ldlt.info() != Eigen::Success;
        if (!singular) {
            const Eigen::VectorXd d = ldlt.vectorD();
            const double dmax = d.maxCoeff();
            if (!(dmax > 0.0) || d.minCoeff() < dmax * 1e-12) singular = true;
        }
        if (singular) {
            throw ComputeError("fit_coxph: singular information matrix (collinear features?)");
        }

        const Eigen::VectorXd step = ldlt.solve(cur.gradient);
        double scale = 1.0;
        Eigen::VectorXd beta_next;
        Objective next;
        bool improved = false;
        for (int half = 0; half < 30; ++half) {
            beta_next = beta + scale * step;
            next = evaluate(Xs, ds, so, beta_next, true);
            if (next.loglik >= cur.loglik || !std::isfinite(cur.loglik)) {
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) {
            // Step halving exhausted; stay at the current iterate.
            diag.loglik_trace.push_back(cur.loglik);
            break;
        }

        const double prev_ll = cur.loglik;
        beta = beta_next;
        cur = next;
        diag.loglik_trace.push_back(cur.loglik);

        const double grad_max = cur.gradient.cwiseAbs().maxCoeff();
        const double rel_change = std::abs(cur.loglik - prev_ll) / (std::abs(prev_ll) + 1e-300);
        if (grad_max < config.tol || rel_change < config.tol) {
            diag.converged = true;
            break;
        }
    }

    // Back-transform to the original scale; the partial likelihood only sees
    // the linear predictor, so centering cancels.
    std::vector<double> coef(p);
    for (std::size_t j = 0; j < p; ++j) {
        coef[j] = beta[static_cast<Eigen::Index>(j)] / sd[static_cast<Eigen::Index>(j)];
    }

    // Observed information on the original scale for standard errors.
    Eigen::VectorXd beta_orig(p);
    for (std::size_t j = 0; j < p; ++j) beta_orig[static_cast<Eigen::Index>(j)] = coef[j];
    const Objective orig = evaluate(X, ds, so, beta_orig, true);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(orig.information);
    std::vector<double> se(p, std::numeric_limits<double>::quiet_NaN());
    if (ldlt.info() == Eigen::Success) {
        const Eigen::MatrixXd cov =
            ldlt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p),
                                                 static_cast<Eigen::Index>(p)));
        for (std::size_t j = 0; j < p; ++j) {
            const double v = cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j));
            se[j] = v > 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
        }
    }

    // Breslow baseline cumulative hazard at the fitted coefficients.
    Eigen::VectorXd eta = X * beta_orig;
    const double shift = eta.maxCoeff();
    std::vector<double> knots;
    std::vector<double> values;
    {
        double s0 = 0.0;
        std::vector<double> denom(so.tie_start.size(), 0.0);
        std::size_t added = n;
        std::size_t block = so.tie_start.size();
        while (block > 0) {
            --block;
            while (added > so.tie_start[block]) {
                --added;
                s0 += std::exp(eta[static_cast<Eigen::Index>(so.order[added])] - shift);
            }
            denom[block] = s0;
        }
        double h = 0.0;
        for (std::size_t b = 0; b < so.tie_start.size(); ++b) {
            if (so.tie_deaths[b] == 0) continue;
            h += static_cast<double>(so.tie_deaths[b]) / (denom[b] * std::exp(shift));
            knots.push_back(ds.times()[so.order[so.tie_start[b]]]);
            values.push_back(h);
        }
    }

    return CoxModel(std::move(coef), std::move(se),
                    StepFunction(std::move(knots), std::move(values), 0.0), std::move(diag),
                    ds.feature_names(), ds.encoding());
}

double cox_log_partial_likelihood(const SurvivalDataset& ds, std::span<const double> beta) {
    if (beta.size() != ds.n_features()) {
        throw InvalidInput("cox loglik: beta length must equal feature count");
    }
    Eigen::MatrixXd X(ds.n_rows(), ds.n_features());
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        for (std::size_t j = 0; j < ds.n_features(); ++j) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = ds.at(i, j);
        }
    }
    Eigen::VectorXd b(beta.size());
    for (std::size_t j = 0; j < beta.size(); ++j) b[static_cast<Eigen::Index>(j)] = beta[j];
    const SortedOutcome so = sort_outcome(ds);
    return evaluate(X, ds, so, b, false).loglik;
}

} // namespace survkit
