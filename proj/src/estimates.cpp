#include "curvlab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/binomial.hpp>

#include "curvlab/errors.hpp"

namespace curvlab::estimates {

namespace {

double sphere_value(int n, int k, const geometry::WarpValues& w) {
    const double c = boost::math::binomial_coefficient<double>(static_cast<unsigned>(n), static_cast<unsigned>(k));
    return c * std::pow(w.dphi / w.phi, k);
}

}  // namespace

BarrierRecord barrier_check(const Problem& problem, const RadialGraph& graph) {
    problem.validate();
    const auto frames = geometry::frame_field(graph);
    for (const auto& f : frames)
        if (!symfunc::in_cone(f.kappa, problem.k))
            throw AdmissibilityError("barrier_check: graph not in Gamma_" + std::to_string(problem.k) + " at node " +
                                         std::to_string(f.node),
                                     f.node);
    const auto r = graph.r();
    // max_element/min_element return the first extremal element
    const auto imax = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    const auto imin = static_cast<std::size_t>(std::min_element(r.begin(), r.end()) - r.begin());

    BarrierRecord b;
    b.min_r = r[imin];
    b.max_r = r[imax];
    b.argmax_node = imax;
    b.argmin_node = imin;
    b.mesh_spacing = graph.spacing();
    const double h2 = b.mesh_spacing * b.mesh_spacing;
    b.lhs_at_max = symfunc::sigma(frames[imax].kappa, problem.k);
    b.rhs_at_max = sphere_value(problem.n, problem.k, frames[imax].warp);
    b.lhs_at_min = symfunc::sigma(frames[imin].kappa, problem.k);
    b.rhs_at_min = sphere_value(problem.n, problem.k, frames[imin].warp);
    b.tolerance_at_max = 10 * h2 * std::max(1.0, std::abs(b.rhs_at_max));
    b.tolerance_at_min = 10 * h2 * std::max(1.0, std::abs(b.rhs_at_min));
    b.pass_at_max = b.lhs_at_max >= b.rhs_at_max - b.tolerance_at_max;
    b.pass_at_min = b.lhs_at_min <= b.rhs_at_min + b.tolerance_at_min;
    return b;
}

C1Record c1_monitor(const RadialGraph& graph) {
    const auto frames = geometry::frame_field(graph);
    C1Record c;
    c.min_u = std::numeric_limits<double>::infinity();
    c.epsilon0 = std::numeric_limits<double>::infinity();
    for (const auto& f : frames) {
        if (f.u < c.min_u) {
            c.min_u = f.u;
            c.argmin_node = f.node;
        }
        c.epsilon0 = std::min(c.epsilon0, f.u * f.u / (f.warp.phi * f.warp.phi));
    }
    return c;
}

QField q_field(const RadialGraph& graph, const QParams& params) {
    const auto frames = geometry::frame_field(graph);
    QField q;
    q.values.resize(frames.size());
    for (const auto& f : frames) {
        if (!(f.u > params.a))
            throw DomainError("q_field: u <= a at node " + std::to_string(f.node));
        const double k1 = f.kappa.largest();
        if (!(k1 > 0.0)) throw DomainError("q_field: kappa_1 <= 0 at node " + std::to_string(f.node));
        q.values[f.node] = std::log(k1) - params.N * std::log(f.u - params.a) + params.alpha * f.warp.Phi;
    }
    q.argmax_node = static_cast<std::size_t>(std::max_element(q.values.begin(), q.values.end()) - q.values.begin());
    q.max = q.values[q.argmax_node];
    q.critical_residual = geometry::field_jet(graph, q.values, q.argmax_node).grad.cwiseAbs().maxCoeff();
    return q;
}

double p_range_constant(const RadialGraph& graph, int k) {
    if (k < 1) throw DomainError("p_range_constant: need k >= 1");
    if (k == 1) return 1.0;
    return 1.0 + c1_monitor(graph).epsilon0 * (k - 1);
}

EstimateReport estimate(const Problem& problem, const RadialGraph& graph, const QParams& qp) {
    EstimateReport rep;
    rep.c0 = barrier_check(problem, graph);
    rep.c1 = c1_monitor(graph);
    const auto frames = geometry::frame_field(graph);
    rep.c2.kappa_max = -std::numeric_limits<double>::infinity();
    for (const auto& f : frames)
        if (f.kappa.largest() > rep.c2.kappa_max) {
            rep.c2.kappa_max = f.kappa.largest();
            rep.c2.argmax_node = f.node;
        }
    const auto q = q_field(graph, qp);
    rep.c2.q_max = q.max;
    rep.c2.q_argmax_node = q.argmax_node;
    rep.c2.q_critical_residual = q.critical_residual;
    rep.p_range = problem.k == 1 ? 1.0 : 1.0 + rep.c1.epsilon0 * (problem.k - 1);
    return rep;
}

std::vector<SeriesEntry> monitor_continuation(const std::vector<solver::ContinuationStep>& steps) {
    std::vector<SeriesEntry> out;
    out.reserve(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& rep = steps[i].report;
        SeriesEntry e;
        e.step = i;
        e.parameter = steps[i].parameter;
        e.converged = rep.converged;
        const auto& g = rep.final_graph;
        const auto frames = geometry::frame_field(g);
        e.kappa_max = -std::numeric_limits<double>::infinity();
        e.min_u = std::numeric_limits<double>::infinity();
        for (const auto& f : frames) {
            e.kappa_max = std::max(e.kappa_max, f.kappa.largest());
            e.min_u = std::min(e.min_u, f.u);
        }
        const auto [lo, hi] = std::minmax_element(g.r().begin(), g.r().end());
        e.min_r = *lo;
        e.max_r = *hi;
        if (rep.converged) {
            try {
                const auto b = barrier_check(rep.problem, g);
                e.barrier_slack_at_max = b.slack_at_max();
                e.barrier_slack_at_min = b.slack_at_min();
                e.barrier_passed = b.passed();
            } catch (const AdmissibilityError&) {
                e.barrier_passed = false;
            }
        }
        if (!out.empty()) {
            e.kappa_growth_flag = e.kappa_max > kKappaGrowthLimit * out.front().kappa_max;
            e.min_u_flag = e.min_u < kMinUFraction * out.front().min_u;
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace curvlab::estimates
