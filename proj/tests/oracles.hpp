#pragma once

// Test-only reference computations. None of these call into the library's
// evaluation paths, so they can serve as independent checks.

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace oracle {

inline std::vector<double> abs_values(std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    for (double& v : out) v = std::abs(v);
    return out;
}

/// sigma_k by explicit enumeration of all k-subsets (bitmask over n <= 20).
inline double sigma_by_subsets(std::span<const double> x, int k) {
    const int n = static_cast<int>(x.size());
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        double prod = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) prod *= x[static_cast<std::size_t>(i)];
        total += prod;
    }
    return total;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// sigma_k of x with the listed positions deleted, by subset enumeration.
inline double sigma_without(std::span<const double> x, int k, std::initializer_list<std::size_t> drop) {
    std::vector<double> rest;
    for (std::size_t i = 0; i < x.size(); ++i) {
        bool skip = false;
        for (std::size_t d : drop) skip = skip || d == i;
        if (!skip) rest.push_back(x[i]);
    }
    if (k < 0) return 0.0;
    return sigma_by_subsets(rest, k);
}

using ScalarField = std::function<double(std::span<const double>)>;

inline std::vector<double> fd_gradient(const ScalarField& f, std::span<const double> x, double h) {
    std::vector<double> y(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + h;
        const double fp = f(y);
        y[i] = x[i] - h;
        const double fm = f(y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2 * h);
    }
    return g;
}

/// Central second differences; diagonal entries use the three-point stencil.
inline std::vector<std::vector<double>> fd_hessian(const ScalarField& f, std::span<const double> x, double h) {
    const std::size_t n = x.size();
    std::vector<double> y(x.begin(), x.end());
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    const double f0 = f(y);
    for (std::size_t p = 0; p < n; ++p) {
        y[p] = x[p] + h;
        const double fp = f(y);
        y[p] = x[p] - h;
        const double fm = f(y);
        y[p] = x[p];
        H[p][p] = (fp - 2 * f0 + fm) / (h * h);
        for (std::size_t q = p + 1; q < n; ++q) {
            auto eval = [&](double sp, double sq) {
                y[p] = x[p] + sp * h;
                y[q] = x[q] + sq * h;
                const double v = f(y);
                y[p] = x[p];
                y[q] = x[q];
                return v;
            };
            H[p][q] = H[q][p] = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4 * h * h);
        }
    }
    return H;
}

}  // namespace oracle
