#pragma once

// Elementary symmetric polynomials of principal curvature vectors, their
// first and second partial derivatives, Garding cone membership, and the
// pointwise algebraic inequalities that hold on those cones.
//
// Index conventions: all indices are 0-based. "sigma_{k-1}(kappa|i)" is the
// (k-1)-th elementary symmetric polynomial of kappa with entry i removed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/container/small_vector.hpp>

#include "curvlab/errors.hpp"

namespace curvlab::symfunc {

template <class T>
using SmallVec = boost::container::small_vector<T, 16>;

/// Curvature vector stored sorted descending (kappa_1 >= ... >= kappa_n).
/// `permutation()[i]` is the caller's index of sorted entry i.
class PrincipalCurvatures {
public:
    explicit PrincipalCurvatures(std::vector<double> values);
    PrincipalCurvatures(std::initializer_list<double> values)
        : PrincipalCurvatures(std::vector<double>(values)) {}

    int n() const noexcept { return static_cast<int>(values_.size()); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double largest() const noexcept { return values_.front(); }
    double smallest() const noexcept { return values_.back(); }
    const std::vector<std::size_t>& permutation() const noexcept { return permutation_; }

private:
    std::vector<double> values_;
    std::vector<std::size_t> permutation_;
};

/// e_0..e_kmax of x by the column recurrence e_j <- e_j + x_i e_{j-1}.
/// No sorting; callers that need permutation invariance sort first.
template <class T>
SmallVec<T> elementary_symmetric_all(std::span<const T> x, int kmax) {
    SmallVec<T> e(static_cast<std::size_t>(kmax) + 1, T(0));
    e[0] = T(1);
    int filled = 0;
    for (const T& v : x) {
        filled = std::min(filled + 1, kmax);
        for (int j = filled; j >= 1; --j) e[j] += v * e[j - 1];
    }
    return e;
}

namespace detail {

template <class T>
T sorted_sigma(SmallVec<T>& buf, int k) {
    const int n = static_cast<int>(buf.size());
    if (k == 0) return T(1);
    if (k > n) return T(0);
    std::sort(buf.begin(), buf.end(), [](const T& a, const T& b) { return b < a; });
    return elementary_symmetric_all<T>(std::span<const T>(buf.data(), buf.size()), k)[k];
}

}  // namespace detail

/// sigma_k(x). Entries are sorted descending before the recurrence runs, so
/// the result is bit-identical under any permutation of x.
template <class T>
T sigma(std::span<const T> x, int k) {
    if (k < 0 || k > static_cast<int>(x.size()))
        throw DomainError("sigma: k=" + std::to_string(k) + " outside [0, " + std::to_string(x.size()) + "]");
    SmallVec<T> buf(x.begin(), x.end());
    return detail::sorted_sigma(buf, k);
}

/// sigma_k of x with the entries at `excluded` removed.
template <class T>
T sigma_restricted(std::span<const T> x, int k, std::span<const std::size_t> excluded) {
    const std::size_t n = x.size();
    SmallVec<bool> drop(n, false);
    for (std::size_t idx : excluded) {
        if (idx >= n) throw DomainError("sigma_restricted: index " + std::to_string(idx) + " out of range");
        if (drop[idx]) throw DomainError("sigma_restricted: index " + std::to_string(idx) + " repeated");
        drop[idx] = true;
    }
    const int remaining = static_cast<int>(n - excluded.size());
    if (k < 0 || k > remaining)
        throw DomainError("sigma_restricted: k=" + std::to_string(k) + " outside [0, " + std::to_string(remaining) + "]");
    SmallVec<T> buf;
    buf.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!drop[i]) buf.push_back(x[i]);
    return detail::sorted_sigma(buf, k);
}

inline double sigma(const PrincipalCurvatures& kappa, int k) { return sigma<double>(kappa.values(), k); }
inline double sigma(std::span<const double> x, int k) { return sigma<double>(x, k); }
inline double sigma(std::initializer_list<double> x, int k) {
    return sigma<double>(std::span<const double>(x.begin(), x.size()), k);
}

inline double sigma_restricted(std::span<const double> x, int k, std::span<const std::size_t> excluded) {
    return sigma_restricted<double>(x, k, excluded);
}
inline double sigma_restricted(const PrincipalCurvatures& kappa, int k, std::initializer_list<std::size_t> excluded) {
    return sigma_restricted<double>(kappa.values(), k, std::span<const std::size_t>(excluded.begin(), excluded.size()));
}

/// Component i is d sigma_k / d x_i = sigma_{k-1}(x|i). Requires 1 <= k <= n.
Eigen::VectorXd sigma_grad(std::span<const double> x, int k);
inline Eigen::VectorXd sigma_grad(const PrincipalCurvatures& kappa, int k) { return sigma_grad(kappa.values(), k); }

/// Entry (p,q) is sigma_{k-2}(x|pq) for p != q; the diagonal is zero because
/// sigma_k is affine in each variable. Requires 2 <= k <= n.
Eigen::MatrixXd sigma_hess(std::span<const double> x, int k);
inline Eigen::MatrixXd sigma_hess(const PrincipalCurvatures& kappa, int k) { return sigma_hess(kappa.values(), k); }

struct ConeClassification {
    int max_k = 0;                     // largest k with sigma_j > 0 for all 1 <= j <= k
    std::vector<double> sigma_values;  // sigma_0 .. sigma_n

    bool contains(int k) const noexcept { return max_k >= k; }
};

ConeClassification classify_cone(std::span<const double> x);
inline ConeClassification classify_cone(const PrincipalCurvatures& kappa) { return classify_cone(kappa.values()); }
bool in_cone(std::span<const double> x, int k);
inline bool in_cone(const PrincipalCurvatures& kappa, int k) { return in_cone(kappa.values(), k); }

// ---------------------------------------------------------------------------
// Tolerance policy and the +infinity sentinel.

/// Absolute tolerance used by all inequality checks: 1e-10 * max(1, |lhs|, |rhs|).
inline double inequality_tolerance(double lhs, double rhs) {
    return 1e-10 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}
inline bool geq_tol(double lhs, double rhs) { return lhs >= rhs - inequality_tolerance(lhs, rhs); }

/// Either a finite value or "unbounded" (+infinity); never stored as a float infinity.
struct Margin {
    bool unbounded = true;
    double value = 0.0;

    static Margin infinite() noexcept { return {}; }
    static Margin finite(double v) noexcept { return {false, v}; }
    bool operator==(const Margin&) const = default;
};

// ---------------------------------------------------------------------------
// Cone sampler.

/// Rejection sampler for Gamma_k: entries scale * (0.5 + z), z ~ N(0,1),
/// accepted when classify_cone(x).max_k >= k. Throws SamplerStarvationError
/// when fewer than 0.1% of the attempts in a window of kWindow draws succeed.
class ConeSampler {
public:
    static constexpr std::size_t kWindow = 100000;

    ConeSampler(int n, int k, double scale);
    PrincipalCurvatures draw(std::mt19937_64& rng);

    std::size_t attempts() const noexcept { return attempts_; }
    std::size_t accepted() const noexcept { return accepted_; }

private:
    int n_;
    int k_;
    double scale_;
    std::size_t attempts_ = 0;
    std::size_t accepted_ = 0;
    std::size_t window_attempts_ = 0;
    std::size_t window_accepted_ = 0;
};

/// `count` samples of Gamma_k, deterministic given seed.
std::vector<PrincipalCurvatures> sample_cone(int n, int k, std::size_t count, double scale, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Pointwise lemmas. Every check expects kappa sorted descending (guaranteed by
// PrincipalCurvatures) and throws NotInConeError when kappa is outside Gamma_k.

struct DominanceResult {
    bool holds = false;
    double slack = 0.0;           // sigma_l - kappa_1 ... kappa_l
    double constant_ratio = 0.0;  // sigma_k / (kappa_1 ... kappa_k)
};
/// sigma_l(kappa) > kappa_1...kappa_l for 1 <= l < k, plus the empirical
/// ratio sigma_k / (kappa_1...kappa_k) bounded by an unspecified constant.
DominanceResult check_sigma_l_dominance(const PrincipalCurvatures& kappa, int k, int l);

struct NegativeKappaResult {
    bool holds = true;
    Margin worst_margin;  // min over kappa_i <= 0 of ((n-k)/k) kappa_1 + kappa_i
};
NegativeKappaResult check_negative_kappa(const PrincipalCurvatures& kappa, int k);

struct KappaSquaredTraceResult {
    bool holds = false;
    double lhs = 0.0;  // sum_i kappa_i^2 sigma_{k-1}(kappa|i)
    double rhs = 0.0;  // (k/n) kappa_1 sigma_k
};
KappaSquaredTraceResult check_kappa_sq_trace(const PrincipalCurvatures& kappa, int k);

}  // namespace curvlab::symfunc
