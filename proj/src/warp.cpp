#include "curvlab/warp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "curvlab/errors.hpp"

namespace curvlab::geometry {

struct Warp::Table {
    std::vector<double> phi;
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
    std::vector<double> cumulative;  // Phi at the table nodes
};

namespace {

// The spline is cubic on each cell, so 4 Gauss points integrate it exactly.
using CellQuadrature = boost::math::quadrature::gauss<double, 4>;

}  // namespace

std::string to_string(WarpKind kind) {
    switch (kind) {
        case WarpKind::euclidean: return "euclidean";
        case WarpKind::hyperbolic: return "hyperbolic";
        case WarpKind::spherical: return "spherical";
        case WarpKind::custom: return "custom";
    }
    return "unknown";
}

WarpKind warp_kind_from_string(const std::string& name) {
    if (name == "euclidean") return WarpKind::euclidean;
    if (name == "hyperbolic") return WarpKind::hyperbolic;
    if (name == "spherical") return WarpKind::spherical;
    if (name == "custom") return WarpKind::custom;
    throw DomainError("unknown warp kind '" + name + "'");
}

Warp Warp::euclidean() { return {WarpKind::euclidean, std::numeric_limits<double>::infinity()}; }
Warp Warp::hyperbolic() { return {WarpKind::hyperbolic, std::numeric_limits<double>::infinity()}; }
Warp Warp::spherical() { return {WarpKind::spherical, std::numbers::pi / 2}; }

Warp Warp::custom(std::vector<double> phi_table, double step) {
    if (phi_table.size() < 4) throw DomainError("custom warp: need at least 4 table entries");
    if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("custom warp: step must be positive");
    if (phi_table.front() != 0.0) throw DomainError("custom warp: phi(0) must be 0");
    for (std::size_t i = 1; i < phi_table.size(); ++i)
        if (!(phi_table[i] > 0.0) || !std::isfinite(phi_table[i]))
            throw DomainError("custom warp: phi must be positive away from r=0");

    auto t = std::make_shared<Table>();
    t->phi = phi_table;
    t->spline = boost::math::interpolators::cardinal_cubic_b_spline<double>(t->phi.data(), t->phi.size(), 0.0, step);
    t->cumulative.assign(t->phi.size(), 0.0);
    const auto& s = t->spline;
    for (std::size_t i = 1; i < t->phi.size(); ++i) {
        const double a = static_cast<double>(i - 1) * step;
        t->cumulative[i] = t->cumulative[i - 1] + CellQuadrature::integrate([&s](double x) { return s(x); }, a, a + step);
    }

    Warp w(WarpKind::custom, static_cast<double>(phi_table.size() - 1) * step);
    w.step_ = step;
    w.table_ = std::move(t);
    return w;
}

bool Warp::contains(double r) const noexcept {
    if (!(r > 0.0) || !std::isfinite(r)) return false;
    return upper_included() ? r <= upper_ : r < upper_;
}

WarpValues Warp::eval(double r) const {
    if (!contains(r))
        throw DomainError("warp " + to_string(kind_) + ": r=" + std::to_string(r) + " outside the working interval");
    WarpValues v;
    switch (kind_) {
        case WarpKind::euclidean:
            v = {r, 1.0, 0.0, 0.5 * r * r};
            break;
        case WarpKind::hyperbolic:
            // cosh(r) - 1 loses digits for small r
            v = {std::sinh(r), std::cosh(r), std::sinh(r), 2.0 * std::pow(std::sinh(0.5 * r), 2)};
            break;
        case WarpKind::spherical:
            v = {std::sin(r), std::cos(r), -std::sin(r), 2.0 * std::pow(std::sin(0.5 * r), 2)};
            break;
        case WarpKind::custom: {
            const auto& t = *table_;
            const auto cell = std::min(static_cast<std::size_t>(r / step_), t.phi.size() - 2);
            const double a = static_cast<double>(cell) * step_;
            v.phi = t.spline(r);
            v.dphi = t.spline.prime(r);
            v.ddphi = t.spline.double_prime(r);
            v.Phi = t.cumulative[cell] + CellQuadrature::integrate([&t](double x) { return t.spline(x); }, a, r);
            break;
        }
    }
    if (!(v.phi > 0.0) || !(v.dphi > 0.0))
        throw DomainError("warp " + to_string(kind_) + ": phi or phi' not positive at r=" + std::to_string(r));
    return v;
}

const std::vector<double>& Warp::table() const {
    static const std::vector<double> empty;
    return table_ ? table_->phi : empty;
}

nlohmann::json Warp::to_json() const {
    nlohmann::json j = {{"kind", to_string(kind_)}};
    if (kind_ == WarpKind::custom) {
        j["step"] = step_;
        j["phi"] = table_->phi;
    }
    return j;
}

Warp Warp::from_json(const nlohmann::json& j) {
    const auto kind = warp_kind_from_string(j.at("kind").get<std::string>());
    switch (kind) {
        case WarpKind::euclidean: return euclidean();
        case WarpKind::hyperbolic: return hyperbolic();
        case WarpKind::spherical: return spherical();
        case WarpKind::custom: return custom(j.at("phi").get<std::vector<double>>(), j.at("step").get<double>());
    }
    throw DomainError("unknown warp kind");
}

}  // namespace curvlab::geometry
