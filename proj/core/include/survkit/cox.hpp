#pragma once

#include <string>
#include <vector>

#include "survkit/dataset.hpp"
#include "survkit/model.hpp"

namespace survkit {

struct CoxFitConfig {
    int max_iter = 50;
    double tol = 1e-7;
    // Ties: Breslow approximation only.
};

struct CoxDiagnostics {
    std::vector<double> loglik_trace; // log partial likelihood per iteration
    int iterations = 0;
    bool converged = false;
};

/// Cox proportional hazards model with a Breslow baseline cumulative hazard.
/// Coefficients are on the original feature scale; features are standardized
/// internally during fitting for conditioning only.
class CoxModel final : public SurvivalModel {
public:
    CoxModel() = default;
    CoxModel(std::vector<double> coefficients, std::vector<double> standard_errors,
             StepFunction baseline_cumhazard, CoxDiagnostics diagnostics,
             std::vector<std::string> feature_names, std::vector<ColumnEncoding> encoding);

    std::size_t n_features() const override { return coefficients_.size(); }
    void predict_survival_into(std::span<const double> x, const TimeGrid& grid,
                               std::span<double> out) const override;
    StepFunction predict_cumhazard(std::span<const double> x, const TimeGrid& grid) const override;

    /// Linear predictor beta' x.
    double risk_score(std::span<const double> x) const;

    const std::vector<double>& coefficients() const { return coefficients_; }
    const std::vector<double>& standard_errors() const { return standard_errors_; }
    const StepFunction& baseline_cumhazard() const { return baseline_cumhazard_; }
    const CoxDiagnostics& diagnostics() const { return diagnostics_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<ColumnEncoding>& encoding() const { return encoding_; }

    /// Two-sided Wald p-values from coefficient / standard error.
    std::vector<double> wald_p_values() const;

private:
    std::vector<double> coefficients_;
    std::vector<double> standard_errors_;
    StepFunction baseline_cumhazard_;
    CoxDiagnostics diagnostics_;
    std::vector<std::string> feature_names_;
    std::vector<ColumnEncoding> encoding_;
};

/// Maximize the Breslow log partial likelihood by safeguarded Newton-Raphson
/// (step halving when the likelihood decreases). Convergence when the largest
/// gradient component or the relative log-likelihood change drops below tol.
/// Non-convergence is reported through the diagnostics, not an error; a
/// singular information matrix (collinear or constant features) throws
/// ComputeError.
CoxModel fit_coxph(const SurvivalDataset& ds, const CoxFitConfig& config = {});

/// Breslow log partial likelihood of beta on the dataset. Exposed so fits can
/// be checked against direct maximization.
double cox_log_partial_likelihood(const SurvivalDataset& ds, std::span<const double> beta);

} // namespace survkit
