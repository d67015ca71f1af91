#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "curvlab/errors.hpp"
#include "curvlab/estimates.hpp"

using namespace curvlab;
using namespace curvlab::estimates;
using namespace curvlab::solver;
using curvlab::geometry::Warp;

namespace {

Problem sphere_problem(Warp w, int n, int k, double p, double R) {
    Problem pr;
    pr.n = n;
    pr.k = k;
    pr.p = p;
    pr.warp = std::move(w);
    pr.psi = PsiSpec{PsiSphereExact{R}};
    pr.grid.m_theta = 32;
    return pr;
}

}  // namespace

TEST_CASE("barrier equality on exact round spheres") {
    struct Case {
        Warp w;
        int n, k;
        double p, R;
    };
    for (const auto& c : {Case{Warp::euclidean(), 2, 1, 1, 1.0}, Case{Warp::euclidean(), 3, 3, 0.5, 2.0},
                          Case{Warp::hyperbolic(), 5, 3, 1, 1.0}, Case{Warp::hyperbolic(), 6, 4, -1, 0.4},
                          Case{Warp::spherical(), 5, 4, 0.5, 0.5}}) {
        const auto pr = sphere_problem(c.w, c.n, c.k, c.p, c.R);
        const auto b = barrier_check(pr, perturbed_sphere(pr, c.R, 0.0));
        CHECK(b.passed());
        CHECK(std::abs(b.lhs_at_max - b.rhs_at_max) <= 1e-12 * std::max(1.0, b.rhs_at_max));
        CHECK(std::abs(b.lhs_at_min - b.rhs_at_min) <= 1e-12 * std::max(1.0, b.rhs_at_min));
        CHECK(b.argmax_node == 0);
        CHECK(b.argmin_node == 0);
    }
}

TEST_CASE("barrier on converged non-round solutions") {
    Problem pr;
    pr.n = 2;
    pr.k = 1;
    pr.p = 1.0;
    pr.psi = PsiSpec{PsiHarmonic{2.0, 0.1, 2, 0.0, 0.0}};
    pr.grid.m_theta = 48;
    const auto rep = solve(pr, default_init(pr));
    REQUIRE(rep.converged);
    const auto b = barrier_check(pr, rep.final_graph);
    CHECK(b.passed());
    CHECK(b.slack_at_max() > 0.0);
    CHECK(b.slack_at_min() > 0.0);
    CHECK(b.max_r > b.min_r);
}

TEST_CASE("barrier refuses inadmissible graphs") {
    Problem pr;
    pr.n = 2;
    pr.k = 2;
    pr.p = 1.0;
    const auto peanut = geometry::RadialGraph::axisym(2, 32, Warp::euclidean(), [](double t) { return 1 + 0.6 * std::cos(2 * t); });
    CHECK_THROWS_AS(barrier_check(pr, peanut), AdmissibilityError);
}

TEST_CASE("C1 monitor and p-range constant") {
    const auto round = geometry::RadialGraph::axisym(3, 32, Warp::hyperbolic(), [](double) { return 0.9; });
    const auto c = c1_monitor(round);
    CHECK(c.min_u == doctest::Approx(std::sinh(0.9)).epsilon(1e-14));
    CHECK(c.epsilon0 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p_range_constant(round, 2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p_range_constant(round, 1) == 1.0);

    const auto bumpy = geometry::RadialGraph::axisym(2, 64, Warp::euclidean(), [](double t) { return 1 + 0.1 * std::cos(t); });
    const auto cb = c1_monitor(bumpy);
    CHECK(cb.epsilon0 < 1.0);
    CHECK(cb.epsilon0 > 0.0);
    // pointwise oracle: u^2/|V|^2 = phi^2 / (phi^2 + |grad r|^2), with the exact derivative of r
    double oracle_min = 1.0;
    for (std::size_t i = 0; i < bumpy.node_count(); ++i) {
        const double t = bumpy.theta(i);
        const double r = 1 + 0.1 * std::cos(t);
        const double dr = -0.1 * std::sin(t);
        oracle_min = std::min(oracle_min, r * r / (r * r + dr * dr));
    }
    CHECK(std::abs(cb.epsilon0 - oracle_min) < 1e-4);
    const double pr2 = p_range_constant(bumpy, 2);
    CHECK(pr2 > 1.0);
    CHECK(pr2 < 2.0);
    CHECK(p_range_constant(bumpy, 1) == 1.0);

    const auto steeper = geometry::RadialGraph::axisym(2, 64, Warp::euclidean(), [](double t) { return 1 + 0.2 * std::cos(t); });
    CHECK(c1_monitor(steeper).epsilon0 < cb.epsilon0);
    CHECK_THROWS_AS(p_range_constant(bumpy, 0), DomainError);
}

TEST_CASE("Q field") {
    const auto round = geometry::RadialGraph::axisym(3, 16, Warp::euclidean(), [](double) { return 1.5; });
    const auto q = q_field(round, {2.0, 1.0, 0.5});
    for (double v : q.values) CHECK(v == doctest::Approx(q.values.front()).epsilon(1e-14));
    CHECK(q.argmax_node == 0);
    CHECK_THROWS_AS(q_field(round, {2.0, 1.0, 1.5}), DomainError);

    // N = alpha = a = 0 reduces Q to log kappa_1
    const auto g = geometry::RadialGraph::axisym(2, 40, Warp::euclidean(), [](double t) { return 1 + 0.1 * std::cos(t) + 0.05 * std::cos(2 * t); });
    const auto q0 = q_field(g, {0.0, 0.0, 0.0});
    const auto frames = geometry::frame_field(g);
    std::size_t best = 0;
    for (std::size_t i = 0; i < frames.size(); ++i)
        if (frames[i].kappa.largest() > frames[best].kappa.largest()) best = i;
    CHECK(q0.argmax_node == best);
    for (std::size_t i = 0; i < frames.size(); ++i)
        CHECK(q0.values[i] == doctest::Approx(std::log(frames[i].kappa.largest())).epsilon(1e-14));
}

TEST_CASE("Q critical residual is O(h) at an off-pole maximum") {
    // psi peaks near theta = pi/3, so the maximum of Q is interior and off-grid
    for (int m : {32, 64, 128, 256}) {
        Problem pr;
        pr.n = 2;
        pr.k = 2;
        pr.p = 1.0;
        pr.psi = blend(PsiSpec{PsiHarmonic{2.0, 0.05, 1, 0.0, 0.0}}, PsiSpec{PsiHarmonic{2.0, -0.1, 3, 0.0, 0.0}}, 0.5);
        pr.grid.m_theta = m;
        const auto rep = solve(pr, default_init(pr));
        REQUIRE(rep.converged);
        const auto q = q_field(rep.final_graph, {2.0, 1.0, 0.0});
        CHECK_FALSE(rep.final_graph.is_pole(q.argmax_node));
        CHECK(q.critical_residual > 0.0);
        CHECK(q.critical_residual <= 0.5 * rep.final_graph.spacing());
    }
}

TEST_CASE("continuation monitor") {
    CHECK(monitor_continuation({}).empty());

    Problem pr;
    pr.n = 2;
    pr.k = 2;
    pr.p = 1.0;
    pr.psi = PsiSpec{PsiSphereExact{1.0}};
    pr.grid.m_theta = 32;
    const auto flat = continuation(pr, perturbed_sphere(pr, 1.0, 0.0), PPath{{1.0, 1.0, 1.0}, 1.0});
    const auto series = monitor_continuation(flat.steps);
    REQUIRE(series.size() == 3);
    for (const auto& e : series) {
        CHECK(e.kappa_max == doctest::Approx(series.front().kappa_max).epsilon(1e-8));
        CHECK(e.barrier_passed);
        CHECK_FALSE(e.kappa_growth_flag);
        CHECK_FALSE(e.min_u_flag);
    }

    const PsiSpec from{PsiHarmonic{2.0, 0.1, 2, 0.0, 0.0}};
    const PsiSpec to{PsiHarmonic{3.0, 0.15, 2, 0.0, 0.0}};
    pr.psi = from;
    std::vector<double> t;
    for (int i = 0; i <= 10; ++i) t.push_back(i / 10.0);
    const auto ramp = continuation(pr, default_init(pr), AmplitudePath{from, to, t});
    REQUIRE(ramp.completed);
    const auto rs = monitor_continuation(ramp.steps);
    REQUIRE(rs.size() == 11);
    for (const auto& e : rs) {
        CHECK(e.converged);
        CHECK(e.barrier_passed);
        CHECK_FALSE(e.kappa_growth_flag);
        CHECK(e.kappa_max < 10 * rs.front().kappa_max);
    }
}

TEST_CASE("estimate bundles the records") {
    const auto pr = sphere_problem(Warp::spherical(), 5, 4, 0.5, 0.5);
    const auto rep = estimate(pr, perturbed_sphere(pr, 0.5, 0.0));
    CHECK(rep.c0.passed());
    CHECK(rep.c1.epsilon0 == doctest::Approx(1.0));
    CHECK(rep.c2.kappa_max == doctest::Approx(std::cos(0.5) / std::sin(0.5)).epsilon(1e-12));
    CHECK(rep.p_range == doctest::Approx(4.0));
}
