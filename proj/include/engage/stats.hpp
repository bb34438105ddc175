#pragma once

#include <optional>
#include <vector>

namespace engage::stats {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation, relative error <= 1e-10 over the tested domain.
double incomplete_beta(double a, double b, double x);

// Two-sided p-value for a Student-t statistic with nu degrees of freedom.
double t_test_p_two_sided(double t, double nu);

// Survival function P(F >= f) for the F distribution.
double f_survival(double f, double df1, double df2);

struct PcaResult {
    // Row-major axes, one unit vector per component, ordered by eigenvalue.
    std::vector<std::vector<double>> axes;
    std::vector<std::vector<double>> projections;  // n_rows x k
    std::vector<double> explained_variance;        // eigenvalues
    std::vector<double> explained_fraction;        // eigenvalue / total variance
    std::size_t rank_limited_to = 0;               // < k when covariance rank fell short
};

// Top-k principal axes of the covariance matrix (Jacobi eigendecomposition,
// off-diagonal residual <= 1e-10). Sign convention: the largest-magnitude
// component of each axis is positive.
PcaResult pca_project(const std::vector<std::vector<double>>& X, std::size_t k = 2);

struct TestResult {
    double statistic = 0.0;
    double p = 1.0;
};

TestResult anova_oneway(const std::vector<std::vector<double>>& groups);

// F = larger/smaller sample variance, two-sided p.
TestResult var_ftest(const std::vector<double>& a, const std::vector<double>& b);

// Per-item counts of raters assigning each category; constant rater total.
using RaterMatrix = std::vector<std::vector<int>>;

// Fleiss' kappa; nullopt when expected agreement is 1 (all raters always
// pick one category).
std::optional<double> fleiss_kappa(const RaterMatrix& m);

// Spearman rank correlation with midranks; nullopt for constant input.
std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y);

// Midranks (1-based, ties averaged).
std::vector<double> ranks(const std::vector<double>& values);

}  // namespace engage::stats
