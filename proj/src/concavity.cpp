#include "curvlab/concavity.hpp"

#include <cmath>
#include <string>

namespace curvlab::concavity {

using symfunc::geq_tol;
using symfunc::in_cone;
using symfunc::sigma;
using symfunc::sigma_grad;
using symfunc::sigma_hess;

namespace {

void require_xi(std::span<const double> xi, int n, const char* who) {
    if (static_cast<int>(xi.size()) != n)
        throw DomainError(std::string(who) + ": xi has " + std::to_string(xi.size()) + " entries, expected " +
                          std::to_string(n));
    for (double v : xi)
        if (!std::isfinite(v)) throw DomainError(std::string(who) + ": non-finite xi");
}

bool in_unit_interval(double v) { return v > 0.0 && v < 1.0; }

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

// ---------------------------------------------------------------------------
// Ren-Wang

double RenWangParts::tolerance(double beta) const noexcept {
    return 1e-10 * std::max(1.0, beta * std::abs(beta_coefficient) + magnitude);
}

RenWangQuery RenWangQuery::make(int k, PrincipalCurvatures kappa, std::vector<double> xi, double beta,
                                double sigma_lower, double sigma_upper) {
    const int n = kappa.n();
    const bool range_ok = (k == n - 1 && n >= 3) || (k == n - 2 && n >= 5);
    if (!range_ok)
        throw DomainError("RenWangQuery: (n,k)=(" + std::to_string(n) + "," + std::to_string(k) +
                          ") outside k=n-1 (n>=3) or k=n-2 (n>=5)");
    require_xi(xi, n, "RenWangQuery");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("RenWangQuery: beta must be positive");
    if (!(sigma_lower > 0.0) || !(sigma_lower <= sigma_upper))
        throw DomainError("RenWangQuery: need 0 < N0 <= N1");
    if (!in_cone(kappa, k)) throw NotInConeError("RenWangQuery: kappa not in Gamma_" + std::to_string(k));
    const double sk = sigma(kappa, k);
    if (sk < sigma_lower || sk > sigma_upper)
        throw BoundViolationError("RenWangQuery: sigma_k=" + std::to_string(sk) + " outside [N0, N1]");
    const double k1 = kappa.largest();
    if (k1 - kappa[1] < kDegenerateGap * k1)
        throw DegenerateDenominatorError("RenWangQuery: kappa_1 - kappa_2 below 1e-8 kappa_1");

    RenWangQuery q;
    q.k = k;
    q.kappa = std::move(kappa);
    q.xi = std::move(xi);
    q.beta = beta;
    q.sigma_lower = sigma_lower;
    q.sigma_upper = sigma_upper;
    return q;
}

RenWangParts renwang_parts(const PrincipalCurvatures& kappa, std::span<const double> xi, int k) {
    const int n = kappa.n();
    require_xi(xi, n, "renwang_parts");
    const double k1 = kappa.largest();
    const Eigen::VectorXd g = sigma_grad(kappa, k);
    const auto x = as_vector(xi);

    RenWangParts parts;
    const double s = g.dot(x);
    parts.beta_coefficient = k1 * s * s;

    double cross = 0.0;
    double cross_abs = 0.0;
    if (k >= 2) {
        const Eigen::MatrixXd h = sigma_hess(kappa, k);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                if (p == q) continue;
                const double term = h(p, q) * x(p) * x(q);
                cross += term;
                cross_abs += std::abs(term);
            }
    }
    double diag = -g(0) * x(0) * x(0);
    double diag_abs = std::abs(diag);
    for (int i = 1; i < n; ++i) {
        const double gap = k1 - kappa[static_cast<std::size_t>(i)];
        if (!(gap > 0.0)) throw DegenerateDenominatorError("renwang_form: kappa_1 equals kappa_" + std::to_string(i + 1));
        const double term = 2.0 * k1 / gap * g(i) * x(i) * x(i);
        diag += term;
        diag_abs += std::abs(term);
    }
    parts.remainder = -k1 * cross + diag;
    parts.magnitude = k1 * cross_abs + diag_abs;
    return parts;
}

double renwang_form(const RenWangQuery& q) { return renwang_parts(q.kappa, q.xi, q.k).value(q.beta); }

// ---------------------------------------------------------------------------
// Lu

LuQuery LuQuery::make(int k, int l, PrincipalCurvatures kappa, std::vector<double> xi, double eps, double delta,
                      double delta0, double delta_prime) {
    const int n = kappa.n();
    if (!(1 <= l && l < k && k <= n)) throw DomainError("LuQuery: need 1 <= l < k <= n");
    require_xi(xi, n, "LuQuery");
    if (!in_unit_interval(eps) || !in_unit_interval(delta) || !in_unit_interval(delta0) ||
        !in_unit_interval(delta_prime))
        throw DomainError("LuQuery: eps, delta, delta0, delta_prime must lie in (0,1)");
    if (!in_cone(kappa, k))
        throw NotInConeError("LuQuery: kappa not in Gamma_" + std::to_string(k) + " (sigma_k must be positive)");
    const double k1 = kappa.largest();
    if (kappa[static_cast<std::size_t>(l - 1)] < delta * k1)
        throw BoundViolationError("LuQuery: kappa_l < delta kappa_1");
    if (kappa[static_cast<std::size_t>(l)] > delta_prime * k1)
        throw BoundViolationError("LuQuery: kappa_{l+1} > delta' kappa_1");

    LuQuery q;
    q.k = k;
    q.l = l;
    q.kappa = std::move(kappa);
    q.xi = std::move(xi);
    q.eps = eps;
    q.delta = delta;
    q.delta0 = delta0;
    q.delta_prime = delta_prime;
    return q;
}

LuResult lu_form(const LuQuery& q) {
    const int n = q.n();
    const int k = q.k;
    const double sk = sigma(q.kappa, k);
    if (!(sk > 0.0)) throw PreconditionError("lu_form: sigma_k <= 0");
    const double k1 = q.kappa.largest();
    const Eigen::VectorXd g = sigma_grad(q.kappa, k);
    const Eigen::MatrixXd h = sigma_hess(q.kappa, k);
    const auto x = as_vector(q.xi);

    LuResult r;
    double cross = 0.0;
    for (int p = 0; p < n; ++p)
        for (int s = 0; s < n; ++s) {
            if (p == s) continue;
            const double term = h(p, s) * x(p) * x(s);
            cross += term;
            r.magnitude += std::abs(term) / sk;
        }
    const double lin = g.dot(x);
    r.lhs = -cross / sk + lin * lin / (sk * sk);
    r.magnitude += lin * lin / (sk * sk);

    double tail = 0.0;
    for (int i = q.l; i < n; ++i) tail += g(i) * x(i) * x(i);
    const double head = (1.0 - q.eps) * x(0) * x(0) / (k1 * k1);
    const double tail_term = q.delta0 * tail / (k1 * sk);
    r.rhs = head - tail_term;
    r.magnitude += std::abs(head) + std::abs(tail_term);
    r.holds = r.lhs >= r.rhs - 1e-10 * std::max({1.0, std::abs(r.lhs), std::abs(r.rhs), r.magnitude});
    return r;
}

Eigen::MatrixXd lu_difference_matrix(const PrincipalCurvatures& kappa, int k, int l, double eps, double delta0) {
    const int n = kappa.n();
    const double sk = sigma(kappa, k);
    const double k1 = kappa.largest();
    const Eigen::VectorXd g = sigma_grad(kappa, k);
    Eigen::MatrixXd m = -sigma_hess(kappa, k) / sk + g * g.transpose() / (sk * sk);
    m(0, 0) -= (1.0 - eps) / (k1 * k1);
    for (int i = l; i < n; ++i) m(i, i) += delta0 * g(i) / (k1 * sk);
    return m;
}

// ---------------------------------------------------------------------------

QuotientResult quotient_second_derivative(const PrincipalCurvatures& kappa, int k, int i, int j) {
    const int n = kappa.n();
    if (k < 2 || k > n) throw DomainError("quotient_second_derivative: need 2 <= k <= n");
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
        throw DomainError("quotient_second_derivative: need distinct indices in [0, n)");
    const auto vals = kappa.values();
    const std::size_t ij[] = {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
    QuotientResult r;
    r.value = symfunc::sigma_restricted<double>(vals, k - 2, ij);

    const double ki = vals[static_cast<std::size_t>(i)];
    const double kj = vals[static_cast<std::size_t>(j)];
    if (std::abs(ki - kj) > 1e-8 * std::max({1.0, std::abs(ki), std::abs(kj)})) {
        const std::size_t only_i[] = {static_cast<std::size_t>(i)};
        const std::size_t only_j[] = {static_cast<std::size_t>(j)};
        const double di = symfunc::sigma_restricted<double>(vals, k - 1, only_i);
        const double dj = symfunc::sigma_restricted<double>(vals, k - 1, only_j);
        r.quotient = (dj - di) / (ki - kj);
        r.discrepancy = std::abs(r.value - *r.quotient);
    }
    return r;
}

ConcavityCheck check_quotient_concavity(const PrincipalCurvatures& kappa, std::span<const double> xi, int k) {
    const int n = kappa.n();
    if (k < 1 || k > n) throw DomainError("check_quotient_concavity: need 1 <= k <= n");
    require_xi(xi, n, "check_quotient_concavity");
    const double sk = sigma(kappa, k);
    if (!(sk > 0.0)) throw PreconditionError("check_quotient_concavity: sigma_k <= 0");
    if (!in_cone(kappa, k)) throw NotInConeError("check_quotient_concavity: kappa not in Gamma_k");

    ConcavityCheck r;
    if (k == 1) return {true, 0.0, 0.0, 0.0};
    const auto x = as_vector(xi);
    const Eigen::MatrixXd h = sigma_hess(kappa, k);
    const Eigen::VectorXd g = sigma_grad(kappa, k);
    // diagonal of h is zero, so x^T h x is exactly the off-diagonal sum
    const double cross = x.dot(h * x);
    const double lin = g.dot(x);
    r.lhs = -cross;
    r.rhs = -(static_cast<double>(k - 1) / k) * lin * lin / sk;
    r.gap = r.lhs - r.rhs;
    double magnitude = std::abs(r.rhs);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) magnitude += std::abs(h(p, q) * x(p) * x(q));
    r.holds = r.gap >= -1e-10 * std::max(1.0, magnitude);
    return r;
}

SemiconvexityResult check_semiconvexity_implication(const PrincipalCurvatures& kappa, int k, double psi_sup) {
    const int n = kappa.n();
    if (k < 1 || k + 1 > n) throw DomainError("check_semiconvexity_implication: need 1 <= k < n");
    if (!in_cone(kappa, k + 1))
        throw NotInConeError("check_semiconvexity_implication: kappa not in Gamma_" + std::to_string(k + 1));
    const double sk = sigma(kappa, k);
    if (!(psi_sup > 0.0) || !geq_tol(psi_sup, sk))
        throw BoundViolationError("check_semiconvexity_implication: sigma_k exceeds psi_sup");

    SemiconvexityResult r;
    r.eta = n * std::pow(psi_sup, 1.0 / k);
    const double kappa_k = kappa[static_cast<std::size_t>(k - 1)];
    r.holds = geq_tol(r.eta / n, kappa_k) && geq_tol(kappa.smallest(), -r.eta);
    return r;
}

}  // namespace curvlab::concavity
