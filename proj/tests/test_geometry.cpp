#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "curvlab/errors.hpp"
#include "curvlab/geometry.hpp"

using namespace curvlab;
using namespace curvlab::geometry;
using std::numbers::pi;

namespace {

double test_graph(double theta) { return 1.0 + 0.1 * std::cos(theta); }

// Surface of revolution in R^3 generated by the meridian r(a)(sin a, cos a),
// r = 1 + 0.1 cos a. Plane-curve formulas give both principal curvatures.
std::pair<double, double> revolution_curvatures(double a) {
    const double r = 1 + 0.1 * std::cos(a);
    const double r1 = -0.1 * std::sin(a);
    const double r2 = -0.1 * std::cos(a);
    const double x1 = r1 * std::sin(a) + r * std::cos(a);
    const double z1 = r1 * std::cos(a) - r * std::sin(a);
    const double x2 = r2 * std::sin(a) + 2 * r1 * std::cos(a) - r * std::sin(a);
    const double z2 = r2 * std::cos(a) - 2 * r1 * std::sin(a) - r * std::cos(a);
    const double speed = std::hypot(x1, z1);
    const double kappa_m = -(x1 * z2 - z1 * x2) / (speed * speed * speed);
    const double x = r * std::sin(a);
    // at the poles the azimuthal curvature equals the meridional one
    const double kappa_a = x < 1e-12 ? kappa_m : -z1 / (x * speed);
    return {kappa_m, kappa_a};
}

double max_kappa_difference_on_shared_nodes(const RadialGraph& coarse, const RadialGraph& fine) {
    const auto a = frame_field(coarse);
    const auto b = frame_field(fine);
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t i = 0; i < a[j].kappa.values().size(); ++i)
            worst = std::max(worst, std::abs(a[j].kappa[i] - b[2 * j].kappa[i]));
    return worst;
}

}  // namespace

TEST_CASE("warp closed forms") {
    const auto e = eval_warp(Warp::euclidean(), 2.0);
    CHECK(e.phi == 2.0);
    CHECK(e.dphi == 1.0);
    CHECK(e.ddphi == 0.0);
    CHECK(e.Phi == 2.0);

    const auto s = eval_warp(Warp::spherical(), pi / 4);
    CHECK(s.phi == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(s.dphi == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(s.ddphi == doctest::Approx(-std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(s.Phi == doctest::Approx(1 - std::sqrt(2.0) / 2).epsilon(1e-15));

    CHECK_THROWS_AS(eval_warp(Warp::hyperbolic(), 0.0), DomainError);
    CHECK_THROWS_AS(eval_warp(Warp::euclidean(), -1.0), DomainError);
    CHECK_THROWS_AS(eval_warp(Warp::spherical(), pi / 2), DomainError);
    CHECK_NOTHROW(eval_warp(Warp::hyperbolic(), 3.0));
}

TEST_CASE("warp derivatives and primitive agree with finite differences") {
    for (const auto& w : {Warp::euclidean(), Warp::hyperbolic(), Warp::spherical()}) {
        for (double r : {0.1, 0.5, 1.2}) {
            const double h = 1e-5;
            const auto c = w.eval(r);
            const auto p = w.eval(r + h);
            const auto m = w.eval(r - h);
            CHECK(std::abs((p.Phi - m.Phi) / (2 * h) - c.phi) < 1e-8);
            CHECK(std::abs((p.phi - m.phi) / (2 * h) - c.dphi) < 1e-8);
            CHECK(std::abs((p.dphi - m.dphi) / (2 * h) - c.ddphi) < 1e-8);
        }
    }
    CHECK(Warp::hyperbolic().eval(1e-6).Phi == doctest::Approx(0.5e-12).epsilon(1e-9));
}

TEST_CASE("custom warp interpolates a sampled sinh") {
    const double step = 0.01;
    std::vector<double> table;
    for (int i = 0; i <= 300; ++i) table.push_back(std::sinh(i * step));
    const auto w = Warp::custom(table, step);
    CHECK(w.kind() == WarpKind::custom);
    CHECK_FALSE(w.is_space_form());
    for (double r : {0.3, 1.234, 2.5}) {
        const auto v = w.eval(r);
        CHECK(std::abs(v.phi - std::sinh(r)) < 1e-8);
        CHECK(std::abs(v.dphi - std::cosh(r)) < 1e-6);
        CHECK(std::abs(v.ddphi - std::sinh(r)) < 1e-3);
        CHECK(std::abs(v.Phi - (std::cosh(r) - 1)) < 1e-8);
    }
    CHECK_NOTHROW(w.eval(3.0));
    CHECK_THROWS_AS(w.eval(3.01), DomainError);
    CHECK_THROWS_AS(Warp::custom({0.0, 1.0, 2.0}, 0.1), DomainError);
    CHECK_THROWS_AS(Warp::custom({0.1, 1.0, 2.0, 3.0}, 0.1), DomainError);

    const auto back = Warp::from_json(w.to_json());
    CHECK(back.eval(1.0).phi == w.eval(1.0).phi);
}

TEST_CASE("round spheres are exact in every space form") {
    struct Case {
        Warp warp;
        double R;
    };
    for (const auto& c : {Case{Warp::euclidean(), 1.7}, Case{Warp::hyperbolic(), 0.8}, Case{Warp::spherical(), 0.5}}) {
        const auto v = c.warp.eval(c.R);
        const double expected = v.dphi / v.phi;
        for (int n : {2, 5, 8}) {
            const auto g = RadialGraph::axisym(n, 16, c.warp, [&](double) { return c.R; });
            for (const auto& f : frame_field(g)) {
                for (double k : f.kappa.values()) CHECK(std::abs(k - expected) <= 1e-12 * std::max(1.0, expected));
                CHECK(f.u == doctest::Approx(v.phi).epsilon(1e-14));
                CHECK((f.g * f.g_inv - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
            }
            const auto id = check_geometric_identities(g);
            CHECK(id.grad_u_residual < 1e-12);
            CHECK(*id.hess_phi_residual < 1e-12);
            CHECK(codazzi_defect(g).defect <= 1e-10);
        }
        const auto grid = RadialGraph::grid_s2(8, 16, c.warp, [&](double, double) { return c.R; });
        for (const auto& f : frame_field(grid))
            for (double k : f.kappa.values()) CHECK(std::abs(k - expected) <= 1e-12 * std::max(1.0, expected));
        CHECK(check_geometric_identities(grid).grad_u_residual < 1e-12);
        CHECK_FALSE(check_geometric_identities(grid).hess_phi_residual.has_value());
    }
    const auto unit = frame_field(RadialGraph::axisym(3, 8, Warp::euclidean(), [](double) { return 2.0; }));
    CHECK(unit[3].kappa[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(unit[3].u == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("axisymmetric curvatures converge to the surface-of-revolution oracle") {
    double prev = 0.0;
    for (int m : {32, 64, 128}) {
        const auto g = RadialGraph::axisym(2, m, Warp::euclidean(), test_graph);
        double err = 0.0;
        for (const auto& f : frame_field(g)) {
            const auto [km, ka] = revolution_curvatures(g.theta(f.node));
            const double hi = std::max(km, ka);
            const double lo = std::min(km, ka);
            err = std::max({err, std::abs(f.kappa[0] - hi), std::abs(f.kappa[1] - lo)});
        }
        if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.125));
        prev = err;
    }
}

TEST_CASE("Richardson ratio of kappa on three grids") {
    for (const auto& w : {Warp::euclidean(), Warp::hyperbolic()}) {
        const auto g1 = RadialGraph::axisym(4, 32, w, test_graph);
        const auto g2 = RadialGraph::axisym(4, 64, w, test_graph);
        const auto g3 = RadialGraph::axisym(4, 128, w, test_graph);
        const double ratio = max_kappa_difference_on_shared_nodes(g1, g2) / max_kappa_difference_on_shared_nodes(g2, g3);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }
}

TEST_CASE("identity residuals and Codazzi defects decay at second order") {
    for (const auto& w : {Warp::euclidean(), Warp::hyperbolic(), Warp::spherical()}) {
        std::vector<IdentityReport> id;
        std::vector<double> cod;
        for (int m : {32, 64, 128}) {
            const auto g = RadialGraph::axisym(5, m, w, test_graph);
            id.push_back(check_geometric_identities(g));
            cod.push_back(codazzi_defect(g).defect);
        }
        for (std::size_t i = 1; i < id.size(); ++i) {
            const double gu = id[i - 1].grad_u_residual / id[i].grad_u_residual;
            const double hp = *id[i - 1].hess_phi_residual / *id[i].hess_phi_residual;
            const double cd = cod[i - 1] / cod[i];
            CHECK(gu >= 3.5);
            CHECK(gu <= 4.5);
            CHECK(hp >= 3.5);
            CHECK(hp <= 4.5);
            CHECK(cd >= 3.5);
            CHECK(cd <= 4.5);
        }
    }
}

TEST_CASE("support function bound") {
    const auto g = RadialGraph::axisym(3, 64, Warp::hyperbolic(), test_graph);
    for (const auto& f : frame_field(g)) {
        CHECK(f.u <= f.warp.phi * (1 + 1e-15));
        if (g.is_pole(f.node))
            CHECK(f.u == doctest::Approx(f.warp.phi).epsilon(1e-15));
        else
            CHECK(f.u < f.warp.phi);
    }
}

TEST_CASE("reflection through the equator permutes nodes") {
    const auto g = RadialGraph::axisym(4, 40, Warp::euclidean(), [](double t) { return 1 + 0.1 * std::cos(t) + 0.05 * std::cos(3 * t); });
    const auto a = frame_field(g);
    const auto b = frame_field(g.reflected());
    for (std::size_t j = 0; j < a.size(); ++j) {
        const auto& mirror = b[a.size() - 1 - j];
        for (std::size_t i = 0; i < 4; ++i) CHECK(a[j].kappa[i] == doctest::Approx(mirror.kappa[i]).epsilon(1e-12));
        CHECK(a[j].u == doctest::Approx(mirror.u).epsilon(1e-14));
    }
}

TEST_CASE("lat-long grid on a tilted surface of revolution") {
    // The first latitude ring sits half a cell from the pole, where the
    // longitudinal terms carry 1/sin^2 factors: convergence there is first
    // order, second order on any band bounded away from the poles.
    const double tilt = 0.7;
    auto polar_from_axis = [tilt](double th, double la) {
        const double c = std::sin(th) * std::cos(la) * std::sin(tilt) + std::cos(th) * std::cos(tilt);
        return std::acos(std::clamp(c, -1.0, 1.0));
    };
    auto in_band = [](double th) { return th > pi / 6 && th < 5 * pi / 6; };
    std::vector<double> all_err;
    std::vector<double> band_err;
    std::vector<double> band_gu;
    for (int m : {16, 32, 64}) {
        const auto g = RadialGraph::grid_s2(m, 2 * m, Warp::euclidean(),
                                            [&](double th, double la) { return test_graph(polar_from_axis(th, la)); });
        double all = 0.0;
        double band = 0.0;
        for (const auto& f : frame_field(g)) {
            const auto [km, ka] = revolution_curvatures(polar_from_axis(g.theta(f.node), g.lambda(f.node)));
            const double e = std::max(std::abs(f.kappa[0] - std::max(km, ka)), std::abs(f.kappa[1] - std::min(km, ka)));
            all = std::max(all, e);
            if (in_band(g.theta(f.node))) band = std::max(band, e);
        }
        all_err.push_back(all);
        band_err.push_back(band);
        const auto id = check_geometric_identities(g);
        double gu = 0.0;
        for (std::size_t i = 0; i < g.node_count(); ++i)
            if (in_band(g.theta(i))) gu = std::max(gu, id.grad_u_by_node[i]);
        band_gu.push_back(gu);
    }
    CHECK(all_err[1] / all_err[2] >= 1.7);
    CHECK(all_err[2] < 2e-3);
    CHECK(band_err[1] / band_err[2] >= 3.5);
    CHECK(band_err[1] / band_err[2] <= 4.5);
    CHECK(band_gu[1] / band_gu[2] >= 3.5);
    CHECK(band_gu[1] / band_gu[2] <= 4.5);
}

TEST_CASE("graph validation, stencils and serialization") {
    CHECK_THROWS_AS(RadialGraph::axisym(1, 8, Warp::euclidean(), [](double) { return 1.0; }), DomainError);
    CHECK_THROWS_AS(RadialGraph::axisym(3, 8, Warp::spherical(), [](double) { return 2.0; }), DomainError);
    CHECK_THROWS_AS(RadialGraph::grid_s2(8, 15, Warp::euclidean(), [](double, double) { return 1.0; }), DomainError);
    auto g = RadialGraph::axisym(3, 8, Warp::euclidean(), test_graph);
    CHECK_THROWS_AS(g.set_r(4, -1.0), DomainError);
    CHECK(g.stencil(0) == std::vector<std::size_t>{0, 1});
    CHECK(g.stencil(4) == std::vector<std::size_t>{3, 4, 5});

    const auto grid = RadialGraph::grid_s2(6, 8, Warp::euclidean(), [](double, double) { return 1.0; });
    // first row: the ghost row is the same row rotated by half a turn
    CHECK(grid.stencil(0) == std::vector<std::size_t>{0, 1, 3, 4, 5, 7, 8, 9, 15});
    for (std::size_t node = 0; node < grid.node_count(); ++node)
        for (std::size_t other : grid.stencil(node)) {
            const auto back = grid.stencil(other);
            CHECK(std::find(back.begin(), back.end(), node) != back.end());
        }

    const auto copy = RadialGraph::from_json(g.to_json());
    CHECK(copy.dim() == 3);
    CHECK(std::equal(copy.r().begin(), copy.r().end(), g.r().begin(), g.r().end()));
    auto bad = g.to_json();
    bad["format_version"] = 99;
    CHECK_THROWS_AS(RadialGraph::from_json(bad), DomainError);

    std::ostringstream csv;
    write_csv(csv, g, frame_field(g));
    const std::string text = csv.str();
    CHECK(text.rfind("node,theta,r,kappa_1,kappa_2,kappa_3,u\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);
}

TEST_CASE("Codazzi defect is unsupported outside axisymmetric space forms") {
    std::vector<double> table;
    for (int i = 0; i <= 200; ++i) table.push_back(i * 0.01);
    const auto custom = RadialGraph::axisym(3, 16, Warp::custom(table, 0.01), [](double) { return 1.0; });
    CHECK_THROWS_AS(codazzi_defect(custom), UnsupportedError);
    const auto grid = RadialGraph::grid_s2(6, 8, Warp::euclidean(), [](double, double) { return 1.0; });
    CHECK_THROWS_AS(codazzi_defect(grid), UnsupportedError);
}
