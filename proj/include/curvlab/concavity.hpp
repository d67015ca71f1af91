#pragma once

// Quadratic-form concavity inequalities for sigma_k on Garding cones and the
// pointwise checks that feed the verification campaigns (see campaign.hpp).

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "curvlab/symfunc.hpp"

namespace curvlab::concavity {

using symfunc::PrincipalCurvatures;

/// Relative gap below which kappa_1 - kappa_i counts as degenerate.
inline constexpr double kDegenerateGap = 1e-8;

/// Ren-Wang query. Valid only for k = n-1 (n >= 3) or k = n-2 (n >= 5),
/// kappa in Gamma_k with kappa_1 strictly above the rest, and N0 <= sigma_k <= N1.
struct RenWangQuery {
    int k = 0;
    PrincipalCurvatures kappa{1.0};
    std::vector<double> xi;
    double beta = 1.0;
    double sigma_lower = 0.0;
    double sigma_upper = 0.0;

    int n() const noexcept { return kappa.n(); }

    /// Validates every hypothesis; throws DomainError, NotInConeError,
    /// BoundViolationError or DegenerateDenominatorError.
    static RenWangQuery make(int k, PrincipalCurvatures kappa, std::vector<double> xi, double beta,
                             double sigma_lower, double sigma_upper);
};

/// The Ren-Wang form splits as beta * beta_coefficient + remainder.
/// `magnitude` is the sum of absolute values of all terms (for tolerances).
struct RenWangParts {
    double beta_coefficient = 0.0;  // kappa_1 (sum_i sigma_k^{ii} xi_i)^2
    double remainder = 0.0;
    double magnitude = 0.0;

    double value(double beta) const noexcept { return beta * beta_coefficient + remainder; }
    double tolerance(double beta) const noexcept;
    bool holds(double beta) const noexcept { return value(beta) >= -tolerance(beta); }
};

RenWangParts renwang_parts(const PrincipalCurvatures& kappa, std::span<const double> xi, int k);

/// kappa_1 [beta (sum sigma^{ii} xi_i)^2 - sum_{p!=q} sigma^{pp,qq} xi_p xi_q]
///   - sigma^{11} xi_1^2 + sum_{i>1} 2 kappa_1 / (kappa_1 - kappa_i) sigma^{ii} xi_i^2
double renwang_form(const RenWangQuery& q);

/// Lu query: 1 <= l < k <= n, eps/delta/delta0/delta_prime in (0,1),
/// kappa_l >= delta kappa_1 and kappa_{l+1} <= delta_prime kappa_1.
/// Indices l are 1-based in the mathematical sense (kappa_l is values()[l-1]).
struct LuQuery {
    int k = 0;
    int l = 0;
    PrincipalCurvatures kappa{1.0};
    std::vector<double> xi;
    double eps = 0.0;
    double delta = 0.0;
    double delta0 = 0.0;
    double delta_prime = 0.0;

    int n() const noexcept { return kappa.n(); }

    static LuQuery make(int k, int l, PrincipalCurvatures kappa, std::vector<double> xi, double eps,
                        double delta, double delta0, double delta_prime);
};

struct LuResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    double magnitude = 0.0;  // sum of absolute values of all terms
};

/// lhs = -sum_{p!=q} sigma^{pp,qq} xi_p xi_q / sigma_k + (sum sigma^{ii} xi_i)^2 / sigma_k^2
/// rhs = (1-eps) xi_1^2 / kappa_1^2 - delta0 sum_{i>l} sigma^{ii} xi_i^2 / (kappa_1 sigma_k)
LuResult lu_form(const LuQuery& q);

/// Symmetric matrix M with xi^T M xi = lhs - rhs of the Lu inequality.
Eigen::MatrixXd lu_difference_matrix(const PrincipalCurvatures& kappa, int k, int l, double eps, double delta0);

struct QuotientResult {
    double value = 0.0;                 // sigma_{k-2}(kappa|ij)
    std::optional<double> quotient;     // (sigma^{jj} - sigma^{ii}) / (kappa_i - kappa_j)
    std::optional<double> discrepancy;  // |value - quotient|
};

/// Second derivative sigma_k^{ii,jj} by the direct formula, cross-checked
/// against the difference quotient of first derivatives when kappa_i and
/// kappa_j are separated. i, j are 0-based positions in kappa.
QuotientResult quotient_second_derivative(const PrincipalCurvatures& kappa, int k, int i, int j);

struct ConcavityCheck {
    bool holds = false;
    double gap = 0.0;  // lhs - rhs
    double lhs = 0.0;
    double rhs = 0.0;
};

/// -sum_{p!=q} sigma^{pp,qq} xi_p xi_q >= -((k-1)/k) (sum sigma^{ii} xi_i)^2 / sigma_k,
/// the concavity of sigma_k^{1/k} on Gamma_k.
ConcavityCheck check_quotient_concavity(const PrincipalCurvatures& kappa, std::span<const double> xi, int k);

struct SemiconvexityResult {
    double eta = 0.0;
    bool holds = false;
};

/// For kappa in Gamma_{k+1} with sigma_k(kappa) <= psi_sup, eta = n psi_sup^{1/k}
/// bounds kappa_k <= eta/n and kappa_n >= -eta.
SemiconvexityResult check_semiconvexity_implication(const PrincipalCurvatures& kappa, int k, double psi_sup);

}  // namespace curvlab::concavity
