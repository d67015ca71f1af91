#include "curvlab/symfunc.hpp"

#include "curvlab/parallel.hpp"

#include <numeric>

namespace curvlab::symfunc {

PrincipalCurvatures::PrincipalCurvatures(std::vector<double> values) {
    if (values.empty()) throw DomainError("PrincipalCurvatures: empty vector");
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("PrincipalCurvatures: non-finite entry");
    permutation_.resize(values.size());
    std::iota(permutation_.begin(), permutation_.end(), std::size_t{0});
    std::stable_sort(permutation_.begin(), permutation_.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    values_.reserve(values.size());
    for (std::size_t idx : permutation_) values_.push_back(values[idx]);
}

Eigen::VectorXd sigma_grad(std::span<const double> x, int k) {
    const int n = static_cast<int>(x.size());
    if (k < 1 || k > n) throw DomainError("sigma_grad: k=" + std::to_string(k) + " outside [1, n]");
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) {
        const std::size_t ex[] = {static_cast<std::size_t>(i)};
        g(i) = sigma_restricted<double>(x, k - 1, ex);
    }
    return g;
}

Eigen::MatrixXd sigma_hess(std::span<const double> x, int k) {
    const int n = static_cast<int>(x.size());
    if (k < 2 || k > n) throw DomainError("sigma_hess: k=" + std::to_string(k) + " outside [2, n]");
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const std::size_t ex[] = {static_cast<std::size_t>(p), static_cast<std::size_t>(q)};
            h(p, q) = h(q, p) = sigma_restricted<double>(x, k - 2, ex);
        }
    }
    return h;
}

ConeClassification classify_cone(std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    SmallVec<double> buf(x.begin(), x.end());
    std::sort(buf.begin(), buf.end(), std::greater<>());
    const auto e = elementary_symmetric_all<double>(std::span<const double>(buf.data(), buf.size()), n);

    ConeClassification out;
    out.sigma_values.assign(e.begin(), e.end());
    while (out.max_k < n && e[out.max_k + 1] > 0.0) ++out.max_k;
    return out;
}

bool in_cone(std::span<const double> x, int k) {
    if (k <= 0) return true;
    if (k > static_cast<int>(x.size())) return false;
    SmallVec<double> buf(x.begin(), x.end());
    std::sort(buf.begin(), buf.end(), std::greater<>());
    const auto e = elementary_symmetric_all<double>(std::span<const double>(buf.data(), buf.size()), k);
    for (int j = 1; j <= k; ++j)
        if (!(e[j] > 0.0)) return false;
    return true;
}

// ---------------------------------------------------------------------------

ConeSampler::ConeSampler(int n, int k, double scale) : n_(n), k_(k), scale_(scale) {
    if (n < 1 || k < 1 || k > n) throw DomainError("ConeSampler: need 1 <= k <= n");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("ConeSampler: scale must be positive");
}

PrincipalCurvatures ConeSampler::draw(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (;;) {
        if (window_attempts_ == kWindow) {
            if (window_accepted_ * 1000 < kWindow)
                throw SamplerStarvationError("cone sampler starved for n=" + std::to_string(n_) +
                                                 " k=" + std::to_string(k_) + ": " +
                                                 std::to_string(window_accepted_) + " accepted of " +
                                                 std::to_string(window_attempts_) + " attempts in window",
                                             attempts_, accepted_);
            window_attempts_ = 0;
            window_accepted_ = 0;
        }
        ++attempts_;
        ++window_attempts_;
        for (double& v : x) v = scale_ * (0.5 + gauss(rng));
        if (in_cone(x, k_)) {
            ++accepted_;
            ++window_accepted_;
            return PrincipalCurvatures(x);
        }
    }
}

std::vector<PrincipalCurvatures> sample_cone(int n, int k, std::size_t count, double scale, std::uint64_t seed) {
    if (count < 1) throw DomainError("sample_cone: count must be >= 1");
    ConeSampler sampler(n, k, scale);
    auto rng = stream_rng(seed, 0);
    std::vector<PrincipalCurvatures> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.draw(rng));
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void require_cone(const PrincipalCurvatures& kappa, int k, const char* who) {
    if (k < 1 || k > kappa.n())
        throw DomainError(std::string(who) + ": k=" + std::to_string(k) + " outside [1, n]");
    if (!in_cone(kappa, k))
        throw NotInConeError(std::string(who) + ": kappa is not in Gamma_" + std::to_string(k));
}

double leading_product(const PrincipalCurvatures& kappa, int count) {
    double prod = 1.0;
    for (int i = 0; i < count; ++i) prod *= kappa[static_cast<std::size_t>(i)];
    return prod;
}

}  // namespace

DominanceResult check_sigma_l_dominance(const PrincipalCurvatures& kappa, int k, int l) {
    require_cone(kappa, k, "check_sigma_l_dominance");
    if (l < 1 || l >= k) throw DomainError("check_sigma_l_dominance: need 1 <= l < k");
    DominanceResult r;
    const double sl = sigma(kappa, l);
    const double prod_l = leading_product(kappa, l);
    r.slack = sl - prod_l;
    r.holds = geq_tol(sl, prod_l);
    r.constant_ratio = sigma(kappa, k) / leading_product(kappa, k);
    return r;
}

NegativeKappaResult check_negative_kappa(const PrincipalCurvatures& kappa, int k) {
    require_cone(kappa, k, "check_negative_kappa");
    const int n = kappa.n();
    const double bound = static_cast<double>(n - k) / k * kappa.largest();
    NegativeKappaResult r;
    for (double v : kappa.values()) {
        if (v > 0.0) continue;
        const double margin = bound + v;  // bound - (-v)
        if (r.worst_margin.unbounded || margin < r.worst_margin.value) r.worst_margin = Margin::finite(margin);
        if (!geq_tol(bound, -v)) r.holds = false;
    }
    return r;
}

KappaSquaredTraceResult check_kappa_sq_trace(const PrincipalCurvatures& kappa, int k) {
    require_cone(kappa, k, "check_kappa_sq_trace");
    const int n = kappa.n();
    const Eigen::VectorXd g = sigma_grad(kappa, k);
    KappaSquaredTraceResult r;
    for (int i = 0; i < n; ++i) {
        const double v = kappa[static_cast<std::size_t>(i)];
        r.lhs += v * v * g(i);
    }
    r.rhs = static_cast<double>(k) / n * kappa.largest() * sigma(kappa, k);
    r.holds = geq_tol(r.lhs, r.rhs);
    return r;
}

}  // namespace curvlab::symfunc
