#include "curvlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/binomial.hpp>

#include "curvlab/errors.hpp"
#include "curvlab/geometry.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/symfunc.hpp"

namespace curvlab::solver {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

struct NodeValue {
    double F = 0.0;
    double u = 0.0;
    double kappa_max = 0.0;
    double rhs = 0.0;
    bool admissible = false;
};

NodeValue evaluate_node(const Problem& problem, const RadialGraph& graph, std::size_t node) {
    const auto f = geometry::fundamental_forms(graph, node);
    if (!(f.u > 0.0)) throw GeometryError("support function not positive at node " + std::to_string(node));
    NodeValue v;
    v.u = f.u;
    v.kappa_max = f.kappa.largest();
    v.admissible = symfunc::in_cone(f.kappa, problem.k);
    v.rhs = std::pow(f.u, problem.p) * psi_value(problem, graph, node, f.r);
    v.F = symfunc::sigma(f.kappa, problem.k) - v.rhs;
    return v;
}

struct Evaluation {
    std::vector<double> F;
    std::optional<std::size_t> first_inadmissible;
    double norm = 0.0;
    double kappa_max = -std::numeric_limits<double>::infinity();
    double min_u = std::numeric_limits<double>::infinity();
    double rhs_scale = 0.0;
};

Evaluation evaluate(const Problem& problem, const RadialGraph& graph, unsigned threads) {
    std::vector<NodeValue> values(graph.node_count());
    parallel_for(values.size(), threads, [&](std::size_t i) { values[i] = evaluate_node(problem, graph, i); });
    Evaluation e;
    e.F.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& v = values[i];
        e.F[i] = v.F;
        if (!v.admissible && !e.first_inadmissible) e.first_inadmissible = i;
        e.norm = std::max(e.norm, std::abs(v.F));
        e.kappa_max = std::max(e.kappa_max, v.kappa_max);
        e.min_u = std::min(e.min_u, v.u);
        e.rhs_scale = std::max(e.rhs_scale, std::abs(v.rhs));
    }
    return e;
}

double radial_profile(const Problem& problem, const PsiSpec& psi, double R) {
    return std::visit(Overloaded{
                          [](const PsiConstant& c) { return c.value; },
                          [&](const PsiSphereExact& s) { return sphere_exact_value(problem, s.R); },
                          [&](const PsiHarmonic& h) { return h.base * std::pow(R, h.radial_power); },
                          [](const PsiTable& t) {
                              if (t.values.empty()) throw DomainError("psi table is empty");
                              return std::accumulate(t.values.begin(), t.values.end(), 0.0) / t.values.size();
                          },
                          [&](const PsiBlend& b) {
                              return (1 - b.t) * radial_profile(problem, *b.from, R) +
                                     b.t * radial_profile(problem, *b.to, R);
                          },
                      },
                      psi.kind);
}

double psi_at(const Problem& problem, const PsiSpec& psi, const RadialGraph& graph, std::size_t node, double r) {
    return std::visit(Overloaded{
                          [](const PsiConstant& c) { return c.value; },
                          [&](const PsiSphereExact& s) { return sphere_exact_value(problem, s.R); },
                          [&](const PsiHarmonic& h) {
                              const double th = graph.theta(node);
                              const double la = graph.lambda(node);
                              return h.base *
                                     (1 + h.amplitude * std::cos(h.mode * th) +
                                      h.lon_amplitude * std::sin(th) * std::cos(la)) *
                                     std::pow(r, h.radial_power);
                          },
                          [&](const PsiTable& t) {
                              if (t.values.size() != graph.node_count())
                                  throw DomainError("psi table size does not match the graph");
                              return t.values[node];
                          },
                          [&](const PsiBlend& b) {
                              return (1 - b.t) * psi_at(problem, *b.from, graph, node, r) +
                                     b.t * psi_at(problem, *b.to, graph, node, r);
                          },
                      },
                      psi.kind);
}

Eigen::VectorXd solve_linear(const Problem& problem, const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs) {
    if (problem.grid.mode == GraphMode::axisym) {
        const Eigen::MatrixXd dense(J);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(dense);
        if (!lu.isInvertible()) throw StallError("Newton step: Jacobian is singular");
        return lu.solve(rhs);
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(J);
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw StallError("Newton step: sparse factorization failed: " + lu.lastErrorMessage());
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) throw StallError("Newton step: sparse solve failed");
    return x;
}

std::vector<double> r_values(const RadialGraph& g) { return {g.r().begin(), g.r().end()}; }

}  // namespace

PsiSpec blend(const PsiSpec& from, const PsiSpec& to, double t) {
    return PsiSpec{PsiBlend{std::make_shared<const PsiSpec>(from), std::make_shared<const PsiSpec>(to), t}};
}

void Problem::validate() const {
    if (n < 1 || k < 1 || k > n) throw DomainError("problem: need 1 <= k <= n");
    if (!std::isfinite(p)) throw DomainError("problem: p must be finite");
    if (grid.mode == GraphMode::grid_s2 && n != 2) throw DomainError("problem: grid_s2 requires n = 2");
    if (grid.mode == GraphMode::axisym && n < 2) throw DomainError("problem: axisym requires n >= 2");
}

double sphere_exact_value(const Problem& problem, double R) {
    const auto w = problem.warp.eval(R);
    const double c = boost::math::binomial_coefficient<double>(static_cast<unsigned>(problem.n),
                                                               static_cast<unsigned>(problem.k));
    return c * std::pow(w.dphi, problem.k) * std::pow(w.phi, -problem.k - problem.p);
}

double psi_value(const Problem& problem, const RadialGraph& graph, std::size_t node, double r) {
    const double v = psi_at(problem, problem.psi, graph, node, r);
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("psi not positive at node " + std::to_string(node) + " (value " + std::to_string(v) + ")");
    return v;
}

double round_radius(const Problem& problem) {
    problem.validate();
    if (const auto* s = std::get_if<PsiSphereExact>(&problem.psi.kind)) {
        if (!problem.warp.contains(s->R)) throw DomainError("round_radius: sphere-exact R outside the warp interval");
        return s->R;
    }
    const double lo = 1e-6;
    double hi = 1e3;
    switch (problem.warp.kind()) {
        case geometry::WarpKind::hyperbolic: hi = 300.0; break;
        case geometry::WarpKind::spherical: hi = problem.warp.upper() * (1 - 1e-9); break;
        case geometry::WarpKind::custom: hi = problem.warp.upper(); break;
        default: break;
    }
    auto f = [&](double R) -> std::optional<double> {
        try {
            const double target = radial_profile(problem, problem.psi, R);
            if (!(target > 0.0)) return std::nullopt;
            const double v = std::log(sphere_exact_value(problem, R)) - std::log(target);
            return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
        } catch (const DomainError&) {
            return std::nullopt;
        }
    };
    constexpr int kScan = 4000;
    std::optional<double> prev_val;
    double prev_R = lo;
    for (int i = 0; i <= kScan; ++i) {
        const double R = lo * std::pow(hi / lo, static_cast<double>(i) / kScan);
        const auto v = f(R);
        if (v && *v == 0.0) return R;
        if (v && prev_val && (*v > 0) != (*prev_val > 0)) {
            double a = prev_R;
            double b = R;
            const bool a_positive = *prev_val > 0;
            for (int it = 0; it < 200 && b - a > 1e-16 * b; ++it) {
                const double mid = 0.5 * (a + b);
                const auto fm = f(mid);
                if (!fm) throw DomainError("round_radius: evaluation failed during bisection");
                ((*fm > 0) == a_positive ? a : b) = mid;
            }
            return 0.5 * (a + b);
        }
        if (v) {
            prev_val = v;
            prev_R = R;
        }
    }
    throw DomainError("round_radius: no round solution in the warp's working interval");
}

RadialGraph perturbed_sphere(const Problem& problem, double R, double relative) {
    problem.validate();
    if (problem.grid.mode == GraphMode::axisym)
        return RadialGraph::axisym(problem.n, problem.grid.m_theta, problem.warp,
                                   [&](double th) { return R * (1 + relative * std::cos(th)); });
    return RadialGraph::grid_s2(problem.grid.m_lat, problem.grid.m_lon, problem.warp,
                                [&](double th, double) { return R * (1 + relative * std::cos(th)); });
}

RadialGraph default_init(const Problem& problem) { return perturbed_sphere(problem, round_radius(problem), 0.0); }

std::vector<double> residual(const Problem& problem, const RadialGraph& graph, unsigned threads) {
    problem.validate();
    auto e = evaluate(problem, graph, threads);
    if (e.first_inadmissible)
        throw AdmissibilityError("graph not in Gamma_" + std::to_string(problem.k) + " at node " +
                                     std::to_string(*e.first_inadmissible),
                                 *e.first_inadmissible);
    return std::move(e.F);
}

Eigen::SparseMatrix<double> jacobian(const Problem& problem, const RadialGraph& graph, unsigned threads) {
    const std::size_t count = graph.node_count();
    std::vector<std::vector<Eigen::Triplet<double>>> columns(count);
    parallel_for(count, threads, [&](std::size_t j) {
        RadialGraph work = graph;
        const double r0 = graph.r(j);
        const double h = 1e-6 * std::max(1.0, std::abs(r0));
        const auto rows = graph.stencil(j);
        std::vector<double> plus(rows.size());
        work.set_r(j, r0 + h);
        for (std::size_t a = 0; a < rows.size(); ++a) plus[a] = evaluate_node(problem, work, rows[a]).F;
        work.set_r(j, r0 - h);
        for (std::size_t a = 0; a < rows.size(); ++a) {
            const double minus = evaluate_node(problem, work, rows[a]).F;
            columns[j].emplace_back(static_cast<int>(rows[a]), static_cast<int>(j), (plus[a] - minus) / (2 * h));
        }
    });
    std::vector<Eigen::Triplet<double>> all;
    for (auto& c : columns) all.insert(all.end(), c.begin(), c.end());
    Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
    J.setFromTriplets(all.begin(), all.end());
    return J;
}

StepResult newton_step(const Problem& problem, const RadialGraph& graph, double damping, unsigned threads) {
    problem.validate();
    if (!(damping > 0.0) || damping > 1.0) throw DomainError("newton_step: damping must lie in (0,1]");
    const auto start = evaluate(problem, graph, threads);
    if (start.first_inadmissible)
        throw AdmissibilityError("newton_step: start not in Gamma_" + std::to_string(problem.k) + " at node " +
                                     std::to_string(*start.first_inadmissible),
                                 *start.first_inadmissible);

    const auto J = jacobian(problem, graph, threads);
    const Eigen::Map<const Eigen::VectorXd> F(start.F.data(), static_cast<Eigen::Index>(start.F.size()));
    const Eigen::VectorXd delta = solve_linear(problem, J, -F);
    // below this the max-norm only measures rounding in sigma_k
    const double floor = 1e-14 * std::max(1.0, start.rhs_scale);

    StepResult out{graph};
    out.residual_before = start.norm;
    double lambda = damping;
    const auto r0 = r_values(graph);
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, lambda *= 0.5) {
        std::vector<double> r(r0);
        bool in_domain = true;
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] += lambda * delta(static_cast<Eigen::Index>(i));
            in_domain = in_domain && graph.warp().contains(r[i]);
        }
        if (!in_domain) {
            ++out.rejections;
            ++out.admissibility_rejections;
            continue;
        }
        RadialGraph candidate = graph;
        candidate.set_r(std::move(r));
        std::optional<Evaluation> e;
        try {
            e = evaluate(problem, candidate, threads);
        } catch (const Error&) {
            ++out.rejections;
            ++out.admissibility_rejections;
            continue;
        }
        if (e->first_inadmissible) {
            ++out.rejections;
            ++out.admissibility_rejections;
            continue;
        }
        if (e->norm <= (1 - kArmijo * lambda) * start.norm || e->norm <= floor) {
            out.graph = std::move(candidate);
            out.lambda = lambda;
            out.step_norm = lambda * delta.cwiseAbs().maxCoeff();
            out.residual_after = e->norm;
            return out;
        }
        ++out.rejections;
    }
    throw StallError("newton_step: line search exhausted " + std::to_string(kMaxHalvings) +
                     " halvings at residual " + std::to_string(start.norm) + " (|delta|=" +
                     std::to_string(delta.cwiseAbs().maxCoeff()) + ")");
}

double default_tolerance(GridSpec grid) { return grid.mode == GraphMode::axisym ? 1e-10 : 1e-8; }

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iterations: return "max_iterations";
        case SolveStatus::stalled: return "stalled";
        case SolveStatus::inadmissible: return "inadmissible";
        case SolveStatus::failed: return "failed";
    }
    return "unknown";
}

SolveReport solve(const Problem& problem, const RadialGraph& init, const SolveOptions& opts) {
    SolveReport rep{problem, false, SolveStatus::failed, 0, opts.tol.value_or(default_tolerance(problem.grid)),
                    {}, {}, {}, {}, {}, {}, 0, 0, std::nullopt, init};
    if (std::isinf(rep.tolerance) && rep.tolerance > 0) {
        rep.converged = true;
        rep.status = SolveStatus::converged;
        return rep;
    }
    auto record = [&rep](const Evaluation& e, const RadialGraph& g) {
        rep.residual_history.push_back(e.norm);
        rep.kappa_max_history.push_back(e.kappa_max);
        rep.min_u_history.push_back(e.min_u);
        const auto [lo, hi] = std::minmax_element(g.r().begin(), g.r().end());
        rep.min_r_history.push_back(*lo);
        rep.max_r_history.push_back(*hi);
    };

    try {
        problem.validate();
        auto e = evaluate(problem, init, opts.threads);
        record(e, init);
        if (e.first_inadmissible) {
            rep.status = SolveStatus::inadmissible;
            rep.message = "initial graph not in Gamma_" + std::to_string(problem.k) + " at node " +
                          std::to_string(*e.first_inadmissible);
            return rep;
        }
        double norm = e.norm;
        while (true) {
            if (norm <= rep.tolerance) {
                rep.converged = true;
                rep.status = SolveStatus::converged;
                return rep;
            }
            if (rep.iterations >= opts.max_iter) {
                rep.status = SolveStatus::max_iterations;
                rep.message = "residual " + std::to_string(norm) + " above tolerance after " +
                              std::to_string(rep.iterations) + " iterations";
                return rep;
            }
            auto step = newton_step(problem, rep.final_graph, opts.damping, opts.threads);
            ++rep.iterations;
            rep.admissibility_breaches += static_cast<std::size_t>(step.admissibility_rejections);
            rep.line_search_rejections += static_cast<std::size_t>(step.rejections);
            rep.step_norm_history.push_back(step.step_norm);
            rep.final_graph = std::move(step.graph);
            e = evaluate(problem, rep.final_graph, opts.threads);
            if (e.first_inadmissible)
                throw AdmissibilityError("accepted iterate left the cone", *e.first_inadmissible);
            record(e, rep.final_graph);
            norm = e.norm;
        }
    } catch (const StallError& ex) {
        rep.status = SolveStatus::stalled;
        rep.message = ex.what();
    } catch (const AdmissibilityError& ex) {
        rep.status = SolveStatus::inadmissible;
        rep.message = ex.what();
    } catch (const Error& ex) {
        rep.status = SolveStatus::failed;
        rep.message = ex.what();
    }
    return rep;
}

ContinuationResult continuation(const Problem& base, const RadialGraph& init, const Path& path,
                                const SolveOptions& opts) {
    ContinuationResult out;
    RadialGraph current = init;
    auto run = [&](double parameter, const Problem& problem) {
        auto report = solve(problem, current, opts);
        const bool ok = report.converged;
        if (ok) current = report.final_graph;
        out.steps.push_back({parameter, std::move(report)});
        if (!ok) {
            const auto& r = out.steps.back().report;
            out.failure = "step " + std::to_string(out.steps.size() - 1) + " (parameter " + std::to_string(parameter) +
                          "): " + to_string(r.status) + (r.message ? ": " + *r.message : std::string());
        }
        return ok;
    };
    const bool done = std::visit(Overloaded{
                                     [&](const PPath& pp) {
                                         for (double p : pp.values) {
                                             Problem pr = base;
                                             pr.p = p;
                                             if (pp.rescale_to_radius) pr.psi = PsiSpec{PsiSphereExact{*pp.rescale_to_radius}};
                                             if (!run(p, pr)) return false;
                                         }
                                         return true;
                                     },
                                     [&](const AmplitudePath& ap) {
                                         for (double t : ap.t) {
                                             Problem pr = base;
                                             pr.psi = blend(ap.from, ap.to, t);
                                             if (!run(t, pr)) return false;
                                         }
                                         return true;
                                     },
                                 },
                                 path);
    out.completed = done;
    return out;
}

}  // namespace curvlab::solver
