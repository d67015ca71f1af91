#include "curvlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>

#include "curvlab/errors.hpp"
#include "curvlab/parallel.hpp"

namespace curvlab::geometry {

namespace {

using std::numbers::pi;

FieldJet axisym_jet(const RadialGraph& graph, std::span<const double> f, std::size_t node) {
    const int n = graph.dim();
    const auto last = static_cast<std::size_t>(graph.m_theta());
    const double h = graph.spacing();
    // even reflection across both poles
    const double fm = node == 0 ? f[1] : f[node - 1];
    const double fp = node == last ? f[last - 1] : f[node + 1];
    const double d1 = (fp - fm) / (2 * h);
    const double d2 = (fp - 2 * f[node] + fm) / (h * h);
    // azimuthal second derivative cot(theta) f'; its limit at a pole is f''
    const double az = graph.is_pole(node) ? d2 : d1 * std::cos(graph.theta(node)) / std::sin(graph.theta(node));

    FieldJet jet{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
    jet.grad(0) = d1;
    jet.hess(0, 0) = d2;
    for (int i = 1; i < n; ++i) jet.hess(i, i) = az;
    return jet;
}

FieldJet grid_jet(const RadialGraph& graph, std::span<const double> f, std::size_t node) {
    const int m_lat = graph.m_lat();
    const int m_lon = graph.m_lon();
    const int i = static_cast<int>(node) / m_lon;
    const int j = static_cast<int>(node) % m_lon;
    auto at = [&](int ii, int jj) {
        if (ii < 0 || ii >= m_lat) {
            ii = ii < 0 ? -ii - 1 : 2 * m_lat - ii - 1;
            jj += m_lon / 2;
        }
        jj = ((jj % m_lon) + m_lon) % m_lon;
        return f[static_cast<std::size_t>(ii * m_lon + jj)];
    };
    const double ht = pi / m_lat;
    const double hl = 2 * pi / m_lon;
    const double f0 = at(i, j);
    const double ft = (at(i + 1, j) - at(i - 1, j)) / (2 * ht);
    const double fl = (at(i, j + 1) - at(i, j - 1)) / (2 * hl);
    const double ftt = (at(i + 1, j) - 2 * f0 + at(i - 1, j)) / (ht * ht);
    const double fll = (at(i, j + 1) - 2 * f0 + at(i, j - 1)) / (hl * hl);
    const double ftl = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4 * ht * hl);

    const double th = graph.theta(node);
    const double s = std::sin(th);
    const double cot = std::cos(th) / s;
    FieldJet jet{Eigen::VectorXd(2), Eigen::MatrixXd(2, 2)};
    jet.grad << ft, fl / s;
    jet.hess(0, 0) = ftt;
    jet.hess(0, 1) = jet.hess(1, 0) = (ftl - cot * fl) / s;
    jet.hess(1, 1) = fll / (s * s) + cot * ft;
    return jet;
}

/// d/dtheta of a field that is odd under reflection through the poles.
double odd_meridional_derivative(const RadialGraph& graph, std::span<const double> f, std::size_t node) {
    const auto last = static_cast<std::size_t>(graph.m_theta());
    const double fm = node == 0 ? -f[1] : f[node - 1];
    const double fp = node == last ? -f[last - 1] : f[node + 1];
    return (fp - fm) / (2 * graph.spacing());
}

}  // namespace

FieldJet field_jet(const RadialGraph& graph, std::span<const double> f, std::size_t node) {
    if (f.size() != graph.node_count()) throw DomainError("field_jet: field size does not match the graph");
    if (node >= graph.node_count()) throw DomainError("field_jet: node out of range");
    return graph.mode() == GraphMode::axisym ? axisym_jet(graph, f, node) : grid_jet(graph, f, node);
}

PointFrameData fundamental_forms(const RadialGraph& graph, std::size_t node) {
    const int n = graph.dim();
    const FieldJet jet = field_jet(graph, graph.r(), node);

    PointFrameData d;
    d.node = node;
    d.r = graph.r(node);
    d.warp = graph.warp().eval(d.r);
    d.grad_r = jet.grad;
    d.hess_r = jet.hess;
    const double phi = d.warp.phi;
    const double dphi = d.warp.dphi;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd rr = jet.grad * jet.grad.transpose();
    const double w = std::sqrt(phi * phi + jet.grad.squaredNorm());

    d.g = phi * phi * id + rr;
    d.h = (-phi * jet.hess + 2 * dphi * rr + phi * phi * dphi * id) / w;
    d.h = 0.5 * (d.h + d.h.transpose());
    d.u = phi * phi / w;

    Eigen::LLT<Eigen::MatrixXd> llt(d.g);
    if (llt.info() != Eigen::Success)
        throw DiscretizationError("induced metric not positive definite at node " + std::to_string(node), node);
    d.g_inv = llt.solve(id);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(d.h, d.g, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success)
        throw DiscretizationError("principal curvature solve failed at node " + std::to_string(node), node);
    const Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(ev(i)))
            throw DiscretizationError("non-finite principal curvature at node " + std::to_string(node), node);
    d.kappa = symfunc::PrincipalCurvatures(std::vector<double>(ev.data(), ev.data() + n));
    return d;
}

std::vector<PointFrameData> frame_field(const RadialGraph& graph, unsigned threads) {
    std::vector<PointFrameData> out(graph.node_count());
    parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = fundamental_forms(graph, i); });
    return out;
}

IdentityReport check_geometric_identities(const RadialGraph& graph, unsigned threads) {
    const auto frames = frame_field(graph, threads);
    const std::size_t count = frames.size();
    std::vector<double> u(count);
    std::vector<double> Phi(count);
    std::vector<double> g11(count);
    for (std::size_t i = 0; i < count; ++i) {
        u[i] = frames[i].u;
        Phi[i] = frames[i].warp.Phi;
        g11[i] = frames[i].g(0, 0);
    }

    std::vector<double> grad_res(count);
    std::vector<double> hess_res(count, 0.0);
    const bool axisym = graph.mode() == GraphMode::axisym;
    parallel_for(count, threads, [&](std::size_t i) {
        const auto& f = frames[i];
        const FieldJet ju = field_jet(graph, u, i);
        const Eigen::VectorXd rhs = f.h * (f.g_inv * (f.warp.phi * f.grad_r));
        grad_res[i] = (ju.grad - rhs).cwiseAbs().maxCoeff();

        if (axisym) {
            // meridional component in the coordinate theta, then the azimuthal
            // one with Phi's Hessian entry cot(theta) Phi' read off its jet
            const FieldJet jp = field_jet(graph, Phi, i);
            const FieldJet jg = field_jet(graph, g11, i);
            const double a = f.g(0, 0);
            const double kappa_m = f.h(0, 0) / a;
            const double dphi = f.warp.dphi;
            const double merid = jp.hess(0, 0) - jg.grad(0) / (2 * a) * jp.grad(0) - a * (dphi - f.u * kappa_m);
            double worst = std::abs(merid) / a;
            if (graph.dim() > 1) {
                const double kappa_a = f.h(1, 1) / f.g(1, 1);
                const double lhs = (dphi * f.grad_r(0) * jp.grad(0) / f.warp.phi + jp.hess(1, 1)) / a;
                worst = std::max(worst, std::abs(lhs - (dphi - f.u * kappa_a)));
            }
            hess_res[i] = worst;
        }
    });

    IdentityReport rep;
    rep.nodes = count;
    rep.grad_u_by_node = grad_res;
    for (std::size_t i = 0; i < count; ++i) {
        if (grad_res[i] > rep.grad_u_residual) {
            rep.grad_u_residual = grad_res[i];
            rep.grad_u_worst_node = i;
        }
    }
    if (axisym) rep.hess_phi_residual = *std::max_element(hess_res.begin(), hess_res.end());
    return rep;
}

CodazziReport codazzi_defect(const RadialGraph& graph, unsigned threads) {
    if (!graph.warp().is_space_form())
        throw UnsupportedError("codazzi_defect: ambient curvature terms are only available for space forms");
    if (graph.mode() != GraphMode::axisym) throw UnsupportedError("codazzi_defect: axisym graphs only");
    const auto frames = frame_field(graph, threads);
    const std::size_t count = frames.size();
    std::vector<double> rho(count);
    std::vector<double> rho_ka(count);
    for (std::size_t i = 0; i < count; ++i) {
        rho[i] = frames[i].warp.phi * std::sin(graph.theta(i));
        rho_ka[i] = rho[i] * frames[i].h(1, 1) / frames[i].g(1, 1);
    }
    rho.front() = rho_ka.front() = 0.0;
    rho.back() = rho_ka.back() = 0.0;

    CodazziReport rep;
    for (std::size_t i = 0; i < count; ++i) {
        const double kappa_m = frames[i].h(0, 0) / frames[i].g(0, 0);
        const double defect = std::abs(odd_meridional_derivative(graph, rho_ka, i) -
                                       kappa_m * odd_meridional_derivative(graph, rho, i));
        if (defect > rep.defect) {
            rep.defect = defect;
            rep.worst_node = i;
        }
    }
    return rep;
}

void write_csv(std::ostream& out, const RadialGraph& graph, const std::vector<PointFrameData>& frames) {
    const bool axisym = graph.mode() == GraphMode::axisym;
    out << (axisym ? "node,theta,r" : "node,theta,lambda,r");
    for (int i = 1; i <= graph.dim(); ++i) out << ",kappa_" << i;
    out << ",u\n";
    const auto old = out.precision(17);
    for (const auto& f : frames) {
        out << f.node << ',' << graph.theta(f.node);
        if (!axisym) out << ',' << graph.lambda(f.node);
        out << ',' << f.r;
        for (double k : f.kappa.values()) out << ',' << k;
        out << ',' << f.u << '\n';
    }
    out.precision(old);
}

}  // namespace curvlab::geometry
