#pragma once

// Star-shaped radial graphs r : S^n -> I over a discretized round sphere.
//
// axisym:  r(theta) on theta_j = j pi / m_theta, j = 0..m_theta, both poles
//          included; any n >= 2 (the n-1 azimuthal directions coincide).
// grid_s2: n = 2, r on offset latitudes theta_i = (i + 1/2) pi / m_lat and
//          longitudes lambda_j = 2 pi j / m_lon (m_lon even). No node sits on
//          a pole; the ghost row across a pole is the first row shifted by pi.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvlab/warp.hpp"

namespace curvlab::geometry {

enum class GraphMode { axisym, grid_s2 };

inline constexpr int kGraphFormatVersion = 1;

class RadialGraph {
public:
    static RadialGraph axisym(int n, int m_theta, Warp warp, std::vector<double> r);
    static RadialGraph axisym(int n, int m_theta, Warp warp, const std::function<double(double)>& r_of_theta);
    static RadialGraph grid_s2(int m_lat, int m_lon, Warp warp, std::vector<double> r);
    static RadialGraph grid_s2(int m_lat, int m_lon, Warp warp,
                               const std::function<double(double, double)>& r_of_theta_lambda);

    GraphMode mode() const noexcept { return mode_; }
    int dim() const noexcept { return n_; }
    std::size_t node_count() const noexcept { return r_.size(); }
    const Warp& warp() const noexcept { return warp_; }
    std::span<const double> r() const noexcept { return r_; }
    double r(std::size_t node) const { return r_.at(node); }

    /// Replaces the radial function; throws DomainError if any value leaves
    /// the warp's working interval.
    void set_r(std::vector<double> r);
    void set_r(std::size_t node, double value);

    int m_theta() const noexcept { return m_theta_; }
    int m_lat() const noexcept { return m_lat_; }
    int m_lon() const noexcept { return m_lon_; }
    /// Mesh spacing in theta (axisym) or latitude (grid_s2).
    double spacing() const noexcept;

    /// Polar angle of a node; for grid_s2 also its longitude.
    double theta(std::size_t node) const;
    double lambda(std::size_t node) const;
    bool is_pole(std::size_t node) const noexcept;

    /// Nodes whose finite-difference stencil includes `node`, sorted. The
    /// stencils are symmetric, so this is also the stencil of `node`.
    std::vector<std::size_t> stencil(std::size_t node) const;

    /// Graph over the same sphere with theta reversed (axisym only).
    RadialGraph reflected() const;

    nlohmann::json to_json() const;
    static RadialGraph from_json(const nlohmann::json& j);

private:
    RadialGraph(GraphMode mode, int n, Warp warp) : mode_(mode), n_(n), warp_(std::move(warp)) {}
    void validate(std::span<const double> r) const;

    GraphMode mode_;
    int n_;
    Warp warp_;
    int m_theta_ = 0;
    int m_lat_ = 0;
    int m_lon_ = 0;
    std::vector<double> r_;
};

std::string to_string(GraphMode mode);

}  // namespace curvlab::geometry
