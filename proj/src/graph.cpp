#include "curvlab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"

namespace curvlab::geometry {

using std::numbers::pi;

std::string to_string(GraphMode mode) { return mode == GraphMode::axisym ? "axisym" : "grid_s2"; }

RadialGraph RadialGraph::axisym(int n, int m_theta, Warp warp, std::vector<double> r) {
    if (n < 2) throw DomainError("axisym graph: need n >= 2");
    if (m_theta < 4) throw DomainError("axisym graph: need m_theta >= 4");
    if (r.size() != static_cast<std::size_t>(m_theta) + 1)
        throw DomainError("axisym graph: expected m_theta+1 values");
    RadialGraph g(GraphMode::axisym, n, std::move(warp));
    g.m_theta_ = m_theta;
    g.validate(r);
    g.r_ = std::move(r);
    return g;
}

RadialGraph RadialGraph::axisym(int n, int m_theta, Warp warp, const std::function<double(double)>& r_of_theta) {
    if (m_theta < 4) throw DomainError("axisym graph: need m_theta >= 4");
    std::vector<double> r(static_cast<std::size_t>(m_theta) + 1);
    for (int j = 0; j <= m_theta; ++j) r[static_cast<std::size_t>(j)] = r_of_theta(j * pi / m_theta);
    return axisym(n, m_theta, std::move(warp), std::move(r));
}

RadialGraph RadialGraph::grid_s2(int m_lat, int m_lon, Warp warp, std::vector<double> r) {
    if (m_lat < 3) throw DomainError("grid_s2 graph: need m_lat >= 3");
    if (m_lon < 4 || m_lon % 2 != 0) throw DomainError("grid_s2 graph: m_lon must be even and >= 4");
    if (r.size() != static_cast<std::size_t>(m_lat) * static_cast<std::size_t>(m_lon))
        throw DomainError("grid_s2 graph: expected m_lat*m_lon values");
    RadialGraph g(GraphMode::grid_s2, 2, std::move(warp));
    g.m_lat_ = m_lat;
    g.m_lon_ = m_lon;
    g.validate(r);
    g.r_ = std::move(r);
    return g;
}

RadialGraph RadialGraph::grid_s2(int m_lat, int m_lon, Warp warp,
                                 const std::function<double(double, double)>& r_of_theta_lambda) {
    if (m_lat < 3 || m_lon < 4) throw DomainError("grid_s2 graph: grid too small");
    std::vector<double> r(static_cast<std::size_t>(m_lat) * static_cast<std::size_t>(m_lon));
    for (int i = 0; i < m_lat; ++i)
        for (int j = 0; j < m_lon; ++j)
            r[static_cast<std::size_t>(i * m_lon + j)] =
                r_of_theta_lambda((i + 0.5) * pi / m_lat, 2.0 * pi * j / m_lon);
    return grid_s2(m_lat, m_lon, std::move(warp), std::move(r));
}

void RadialGraph::validate(std::span<const double> r) const {
    for (std::size_t i = 0; i < r.size(); ++i)
        if (!warp_.contains(r[i]))
            throw DomainError("radial graph: r=" + std::to_string(r[i]) + " at node " + std::to_string(i) +
                              " outside the warp's working interval");
}

void RadialGraph::set_r(std::vector<double> r) {
    if (r.size() != r_.size()) throw DomainError("radial graph: wrong number of values");
    validate(r);
    r_ = std::move(r);
}

void RadialGraph::set_r(std::size_t node, double value) {
    const double v[] = {value};
    validate(v);
    r_.at(node) = value;
}

double RadialGraph::spacing() const noexcept { return mode_ == GraphMode::axisym ? pi / m_theta_ : pi / m_lat_; }

double RadialGraph::theta(std::size_t node) const {
    if (node >= r_.size()) throw DomainError("radial graph: node out of range");
    if (mode_ == GraphMode::axisym) return static_cast<double>(node) * pi / m_theta_;
    return (static_cast<double>(node / static_cast<std::size_t>(m_lon_)) + 0.5) * pi / m_lat_;
}

double RadialGraph::lambda(std::size_t node) const {
    if (node >= r_.size()) throw DomainError("radial graph: node out of range");
    if (mode_ == GraphMode::axisym) return 0.0;
    return 2.0 * pi * static_cast<double>(node % static_cast<std::size_t>(m_lon_)) / m_lon_;
}

bool RadialGraph::is_pole(std::size_t node) const noexcept {
    return mode_ == GraphMode::axisym && (node == 0 || node == static_cast<std::size_t>(m_theta_));
}

std::vector<std::size_t> RadialGraph::stencil(std::size_t node) const {
    std::vector<std::size_t> out;
    if (mode_ == GraphMode::axisym) {
        const auto last = static_cast<std::size_t>(m_theta_);
        if (node > 0) out.push_back(node - 1);
        out.push_back(node);
        if (node < last) out.push_back(node + 1);
        return out;
    }
    const int i = static_cast<int>(node) / m_lon_;
    const int j = static_cast<int>(node) % m_lon_;
    for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
            int ii = i + di;
            int jj = j + dj;
            if (ii < 0 || ii >= m_lat_) {
                ii = ii < 0 ? -ii - 1 : 2 * m_lat_ - ii - 1;
                jj += m_lon_ / 2;
            }
            jj = ((jj % m_lon_) + m_lon_) % m_lon_;
            out.push_back(static_cast<std::size_t>(ii * m_lon_ + jj));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RadialGraph RadialGraph::reflected() const {
    if (mode_ != GraphMode::axisym) throw UnsupportedError("reflected: axisym graphs only");
    std::vector<double> r(r_.rbegin(), r_.rend());
    return axisym(n_, m_theta_, warp_, std::move(r));
}

nlohmann::json RadialGraph::to_json() const {
    nlohmann::json j = {{"format_version", kGraphFormatVersion},
                        {"mode", to_string(mode_)},
                        {"n", n_},
                        {"warp", warp_.to_json()},
                        {"r", r_}};
    if (mode_ == GraphMode::axisym) {
        j["m_theta"] = m_theta_;
    } else {
        j["m_lat"] = m_lat_;
        j["m_lon"] = m_lon_;
    }
    return j;
}

RadialGraph RadialGraph::from_json(const nlohmann::json& j) {
    const int version = j.value("format_version", 0);
    if (version != kGraphFormatVersion)
        throw DomainError("radial graph: unsupported format_version " + std::to_string(version));
    const auto mode = j.at("mode").get<std::string>();
    auto warp = Warp::from_json(j.at("warp"));
    auto r = j.at("r").get<std::vector<double>>();
    if (mode == "axisym") return axisym(j.at("n").get<int>(), j.at("m_theta").get<int>(), std::move(warp), std::move(r));
    if (mode == "grid_s2") return grid_s2(j.at("m_lat").get<int>(), j.at("m_lon").get<int>(), std::move(warp), std::move(r));
    throw DomainError("radial graph: unknown mode '" + mode + "'");
}

}  // namespace curvlab::geometry
