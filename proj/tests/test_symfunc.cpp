#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "curvlab/symfunc.hpp"
#include "oracles.hpp"

using namespace curvlab;
using namespace curvlab::symfunc;
using Rational = boost::multiprecision::cpp_rational;

namespace {

std::vector<double> gaussian_vector(std::mt19937_64& rng, int n, double shift = 0.5) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = shift + g(rng);
    return x;
}

}  // namespace

TEST_CASE("sigma on hand examples") {
    CHECK(sigma({1.0, 1.0, 1.0, 1.0}, 2) == 6.0);
    CHECK(sigma({3.0, 2.0, 1.0}, 2) == 11.0);
    CHECK(sigma({2.0, 1.0}, 0) == 1.0);
    CHECK(sigma({3.0, 2.0, 1.0}, 3) == 6.0);
    CHECK_THROWS_AS(sigma({1.0, 2.0}, 3), DomainError);
    CHECK_THROWS_AS(sigma({1.0, 2.0}, -1), DomainError);
}

TEST_CASE("sigma agrees with subset enumeration") {
    std::mt19937_64 rng(11);
    for (int n = 1; n <= 10; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto x = gaussian_vector(rng, n, 0.0);
            for (int k = 0; k <= n; ++k) {
                const double expect = oracle::sigma_by_subsets(x, k);
                const double scale = oracle::sigma_by_subsets(oracle::abs_values(x), k);
                CHECK(std::abs(sigma(x, k) - expect) <= 1e-13 * std::max(1.0, scale));
            }
        }
    }
}

TEST_CASE("sigma_restricted") {
    const std::vector<double> ones{1, 1, 1};
    const std::size_t ex0[] = {0};
    CHECK(sigma_restricted(ones, 1, ex0) == 2.0);
    const PrincipalCurvatures k321{3, 2, 1};
    CHECK(sigma_restricted(k321, 2, {2}) == 6.0);

    const std::size_t dup[] = {1, 1};
    const std::size_t bad[] = {3};
    CHECK_THROWS_AS(sigma_restricted(std::span<const double>(ones), 1, dup), DomainError);
    CHECK_THROWS_AS(sigma_restricted(std::span<const double>(ones), 1, bad), DomainError);
    const std::size_t two[] = {0, 1};
    CHECK_THROWS_AS(sigma_restricted(std::span<const double>(ones), 2, two), DomainError);
}

TEST_CASE("sigma identities hold exactly in rational arithmetic") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> num(-40, 40);
    std::uniform_int_distribution<int> den(1, 9);
    for (int n = 1; n <= 7; ++n) {
        std::vector<Rational> x(static_cast<std::size_t>(n));
        for (auto& v : x) v = Rational(num(rng), den(rng));
        const std::span<const Rational> xs(x);
        for (int k = 1; k <= n; ++k) {
            Rational euler = 0, trace = 0;
            for (int i = 0; i < n; ++i) {
                const std::size_t ex[] = {static_cast<std::size_t>(i)};
                const Rational s_km1 = sigma_restricted<Rational>(xs, k - 1, ex);
                const Rational s_k = (k <= n - 1) ? sigma_restricted<Rational>(xs, k, ex) : Rational(0);
                CHECK(sigma<Rational>(xs, k) == x[static_cast<std::size_t>(i)] * s_km1 + s_k);
                euler += x[static_cast<std::size_t>(i)] * s_km1;
                trace += s_km1;
            }
            CHECK(euler == k * sigma<Rational>(xs, k));
            CHECK(trace == (n - k + 1) * sigma<Rational>(xs, k - 1));
        }
    }
}

TEST_CASE("sigma identities in double precision") {
    std::mt19937_64 rng(17);
    for (int n = 1; n <= 10; ++n) {
        for (int trial = 0; trial < 50; ++trial) {
            auto x = gaussian_vector(rng, n);
            for (double& v : x) v *= 100.0;
            const auto absx = oracle::abs_values(x);
            for (int k = 1; k <= n; ++k) {
                const auto g = sigma_grad(x, k);
                const double sk = sigma(x, k);
                double euler = 0.0;
                for (int i = 0; i < n; ++i) {
                    const std::size_t ex[] = {static_cast<std::size_t>(i)};
                    const double rest = (k <= n - 1) ? sigma_restricted(std::span<const double>(x), k, ex) : 0.0;
                    CHECK(std::abs(sk - (x[static_cast<std::size_t>(i)] * g(i) + rest)) <=
                          1e-12 * sigma(absx, k));
                    euler += x[static_cast<std::size_t>(i)] * g(i);
                }
                CHECK(std::abs(euler - k * sk) <= 1e-12 * k * sigma(absx, k));
                CHECK(std::abs(g.sum() - (n - k + 1) * sigma(x, k - 1)) <= 1e-12 * (n - k + 1) * sigma(absx, k - 1));
            }
        }
    }
}

TEST_CASE("sigma_grad matches hand values and finite differences") {
    const auto g = sigma_grad(std::vector<double>{1, 1, 1}, 2);
    CHECK(g(0) == 2.0);
    CHECK(g(1) == 2.0);
    CHECK(g(2) == 2.0);
    CHECK_THROWS_AS(sigma_grad(std::vector<double>{1, 1}, 0), DomainError);

    const auto samples = sample_cone(6, 3, 200, 1.0, 3);
    for (const auto& kappa : samples) {
        const auto grad = sigma_grad(kappa, 3);
        const auto fd = oracle::fd_gradient([](std::span<const double> v) { return sigma(v, 3); },
                                            kappa.values(), 1e-6);
        for (int i = 0; i < kappa.n(); ++i) CHECK(std::abs(grad(i) - fd[static_cast<std::size_t>(i)]) <= 1e-6);
    }
}

TEST_CASE("sigma_hess matches hand values and finite differences") {
    const auto h = sigma_hess(std::vector<double>{1, 1, 1}, 2);
    for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) CHECK(h(p, q) == (p == q ? 0.0 : 1.0));
    CHECK(sigma_hess(PrincipalCurvatures{3, 2, 1}, 3)(0, 1) == 1.0);
    CHECK_THROWS_AS(sigma_hess(std::vector<double>{1, 1}, 1), DomainError);

    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = gaussian_vector(rng, 5);
        for (int k = 2; k <= 5; ++k) {
            const auto hess = sigma_hess(x, k);
            const auto fd = oracle::fd_hessian([k](std::span<const double> v) { return sigma(v, k); }, x, 1e-3);
            for (int p = 0; p < 5; ++p)
                for (int q = 0; q < 5; ++q) CHECK(std::abs(hess(p, q) - fd[p][q]) <= 1e-5);
        }
    }
}

TEST_CASE("classify_cone") {
    const auto c = classify_cone(std::vector<double>{1, 1, -0.4});
    CHECK(c.max_k == 2);
    CHECK(c.sigma_values[0] == 1.0);
    CHECK(c.sigma_values[1] == doctest::Approx(1.6));
    CHECK(c.sigma_values[2] == doctest::Approx(0.2));
    CHECK(c.sigma_values[3] == doctest::Approx(-0.4));
    CHECK(classify_cone(std::vector<double>{1, 1, 1}).max_k == 3);
    CHECK(classify_cone(std::vector<double>{-1, -1, -1}).max_k == 0);
}

TEST_CASE("classify_cone is monotone and matches in_cone") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = 1 + trial % 8;
        const auto x = gaussian_vector(rng, n, 0.3);
        const auto c = classify_cone(x);
        for (int j = 1; j <= n; ++j) {
            CHECK(in_cone(x, j) == (j <= c.max_k));
            if (j <= c.max_k) CHECK(c.sigma_values[static_cast<std::size_t>(j)] > 0.0);
        }
        if (c.max_k < n) CHECK(c.sigma_values[static_cast<std::size_t>(c.max_k) + 1] <= 0.0);
    }
}

TEST_CASE("sigma is permutation invariant and homogeneous") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 9;
        auto x = gaussian_vector(rng, n);
        auto y = x;
        std::shuffle(y.begin(), y.end(), rng);
        const double t = std::exp(std::uniform_real_distribution<double>(-2.0, 2.0)(rng));
        std::vector<double> tx(x);
        for (double& v : tx) v *= t;
        const auto absx = oracle::abs_values(x);
        for (int k = 0; k <= n; ++k) {
            CHECK(sigma(x, k) == sigma(y, k));
            CHECK(std::abs(sigma(tx, k) - std::pow(t, k) * sigma(x, k)) <=
                  1e-12 * std::pow(t, k) * std::max(1e-300, sigma(absx, k)));
        }
    }
}

TEST_CASE("PrincipalCurvatures sorts and records the permutation") {
    const PrincipalCurvatures kappa{1.0, 3.0, -2.0, 2.0};
    CHECK(kappa.values()[0] == 3.0);
    CHECK(kappa.values()[3] == -2.0);
    CHECK(kappa.permutation() == std::vector<std::size_t>{1, 3, 0, 2});
    CHECK_THROWS_AS(PrincipalCurvatures(std::vector<double>{}), DomainError);
    CHECK_THROWS_AS(PrincipalCurvatures({1.0, NAN}), DomainError);
}

TEST_CASE("sample_cone") {
    const auto s = sample_cone(5, 3, 100, 1.0, 7);
    CHECK(s.size() == 100);
    for (const auto& kappa : s) CHECK(classify_cone(kappa).max_k >= 3);

    for (const auto& kappa : sample_cone(3, 3, 100, 2.0, 1))
        for (double v : kappa.values()) CHECK(v > 0.0);

    const auto a = sample_cone(6, 4, 50, 1.0, 99);
    const auto b = sample_cone(6, 4, 50, 1.0, 99);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::equal(a[i].values().begin(), a[i].values().end(), b[i].values().begin()));

    CHECK_THROWS_AS(sample_cone(3, 4, 1, 1.0, 1), DomainError);
    CHECK_THROWS_AS(sample_cone(3, 2, 0, 1.0, 1), DomainError);
}

TEST_CASE("cone sampler reports starvation") {
    // Gamma_40 under a unit Gaussian shifted by 0.5 accepts with probability ~0.69^40.
    ConeSampler sampler(40, 40, 1.0);
    std::mt19937_64 rng(1);
    CHECK_THROWS_AS(sampler.draw(rng), SamplerStarvationError);
}

TEST_CASE("sigma_l dominance") {
    const auto r = check_sigma_l_dominance(PrincipalCurvatures{1, 1, 1}, 2, 1);
    CHECK(r.holds);
    CHECK(r.slack == 2.0);
    const auto r2 = check_sigma_l_dominance(PrincipalCurvatures{3, 2, 1}, 3, 2);
    CHECK(r2.holds);
    CHECK(r2.slack == 5.0);
    CHECK(r2.constant_ratio == 1.0);
    CHECK_THROWS_AS(check_sigma_l_dominance(PrincipalCurvatures{1, 1, -0.4}, 3, 1), NotInConeError);
    CHECK_THROWS_AS(check_sigma_l_dominance(PrincipalCurvatures{1, 1, 1}, 2, 2), DomainError);
}

TEST_CASE("negative kappa bound") {
    const auto r = check_negative_kappa(PrincipalCurvatures{1, 1, -0.4}, 2);
    CHECK(r.holds);
    REQUIRE_FALSE(r.worst_margin.unbounded);
    CHECK(r.worst_margin.value == doctest::Approx(0.1));
    const auto pos = check_negative_kappa(PrincipalCurvatures{1, 2, 3}, 3);
    CHECK(pos.holds);
    CHECK(pos.worst_margin.unbounded);
    CHECK_THROWS_AS(check_negative_kappa(PrincipalCurvatures{1, 1, -0.4}, 3), NotInConeError);
}

TEST_CASE("kappa squared trace bound") {
    const auto r = check_kappa_sq_trace(PrincipalCurvatures{1, 1, 1}, 2);
    CHECK(r.lhs == 6.0);
    CHECK(r.rhs == doctest::Approx(2.0));
    CHECK(r.holds);
    for (int n = 1; n <= 8; ++n) {
        const PrincipalCurvatures ones(std::vector<double>(static_cast<std::size_t>(n), 1.0));
        for (int k = 1; k <= n; ++k) {
            const auto t = check_kappa_sq_trace(ones, k);
            CHECK(t.lhs == doctest::Approx(n * oracle::binomial(n - 1, k - 1)));
            CHECK(t.rhs == doctest::Approx(oracle::binomial(n - 1, k - 1)));
            CHECK(t.holds);
        }
    }
}

TEST_CASE("pointwise lemmas on random cone samples") {
    for (int n = 2; n <= 6; ++n) {
        for (int k = 2; k <= n; ++k) {
            for (const auto& kappa : sample_cone(n, k, 300, 1.0, static_cast<std::uint64_t>(10 * n + k))) {
                CHECK(check_negative_kappa(kappa, k).holds);
                CHECK(check_kappa_sq_trace(kappa, k).holds);
                for (int l = 1; l < k; ++l) CHECK(check_sigma_l_dominance(kappa, k, l).holds);
            }
        }
    }
}
