#pragma once

// Warping functions phi of the ambient metric dr^2 + phi(r)^2 g_sphere.

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace curvlab::geometry {

enum class WarpKind { euclidean, hyperbolic, spherical, custom };

std::string to_string(WarpKind kind);
WarpKind warp_kind_from_string(const std::string& name);

struct WarpValues {
    double phi = 0.0;
    double dphi = 0.0;
    double ddphi = 0.0;
    double Phi = 0.0;  // integral of phi from 0
};

class Warp {
public:
    static Warp euclidean();
    static Warp hyperbolic();
    static Warp spherical();
    /// phi sampled at r = 0, step, 2 step, ... (at least 4 samples), with
    /// phi(0) = 0. Interpolated by a cubic B-spline; Phi by Gauss quadrature
    /// accumulated cell by cell. Working interval is (0, (N-1) step].
    static Warp custom(std::vector<double> phi_table, double step);

    WarpKind kind() const noexcept { return kind_; }
    double lower() const noexcept { return 0.0; }  // always excluded
    double upper() const noexcept { return upper_; }
    bool upper_included() const noexcept { return kind_ == WarpKind::custom; }
    bool contains(double r) const noexcept;
    /// Ambient sectional curvature is constant, so R_{0ijk} vanishes in adapted frames.
    bool is_space_form() const noexcept { return kind_ != WarpKind::custom; }

    /// Throws DomainError when r is outside the working interval or when
    /// phi or phi' fails to be positive there.
    WarpValues eval(double r) const;

    const std::vector<double>& table() const;
    double step() const noexcept { return step_; }

    nlohmann::json to_json() const;
    static Warp from_json(const nlohmann::json& j);

private:
    struct Table;
    Warp(WarpKind kind, double upper) : kind_(kind), upper_(upper) {}

    WarpKind kind_;
    double upper_;
    double step_ = 0.0;
    std::shared_ptr<const Table> table_;
};

inline WarpValues eval_warp(const Warp& w, double r) { return w.eval(r); }

}  // namespace curvlab::geometry
