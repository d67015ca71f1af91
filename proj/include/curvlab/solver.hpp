#pragma once

// Damped Newton solver for sigma_k(kappa) = u^p psi(X) on radial graphs.

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "curvlab/graph.hpp"

namespace curvlab::solver {

using geometry::GraphMode;
using geometry::RadialGraph;
using geometry::Warp;

struct PsiSpec;

struct PsiConstant {
    double value = 1.0;
};
/// The constant C(n,k) phi'(R)^k phi(R)^(-k-p) that makes r = R an exact solution.
struct PsiSphereExact {
    double R = 1.0;
};
/// base * (1 + amplitude cos(mode theta) + lon_amplitude sin(theta) cos(lambda)) * r^radial_power
struct PsiHarmonic {
    double base = 1.0;
    double amplitude = 0.0;
    int mode = 1;
    double radial_power = 0.0;
    double lon_amplitude = 0.0;
};
/// One value per node.
struct PsiTable {
    std::vector<double> values;
};
/// (1 - t) * from + t * to
struct PsiBlend {
    std::shared_ptr<const PsiSpec> from;
    std::shared_ptr<const PsiSpec> to;
    double t = 0.0;
};

struct PsiSpec {
    std::variant<PsiConstant, PsiSphereExact, PsiHarmonic, PsiTable, PsiBlend> kind;
};

PsiSpec blend(const PsiSpec& from, const PsiSpec& to, double t);

struct GridSpec {
    GraphMode mode = GraphMode::axisym;
    int m_theta = 64;
    int m_lat = 16;
    int m_lon = 32;
};

struct Problem {
    int n = 2;
    int k = 1;
    double p = 0.0;
    PsiSpec psi{PsiConstant{}};
    Warp warp = Warp::euclidean();
    GridSpec grid;

    /// Throws DomainError on k outside [1,n] or grid_s2 with n != 2.
    void validate() const;
};

/// C(n,k) phi'(R)^k phi(R)^(-k-p).
double sphere_exact_value(const Problem& problem, double R);

/// psi at a node with radial value r (the table kind ignores r).
double psi_value(const Problem& problem, const RadialGraph& graph, std::size_t node, double r);

/// Radius R of the round solution for the r-dependent part of psi (angular
/// modulation dropped; a table contributes its mean). Log-spaced scan of the
/// warp's working interval, then bisection on the first sign change.
/// Throws DomainError if no root is found.
double round_radius(const Problem& problem);

/// Round sphere at round_radius on the problem's grid.
RadialGraph default_init(const Problem& problem);
/// Round sphere of radius R times (1 + relative * cos(theta)).
RadialGraph perturbed_sphere(const Problem& problem, double R, double relative);

/// F[node] = sigma_k(kappa) - u^p psi. Throws AdmissibilityError naming the
/// first node outside Gamma_k, GeometryError if u <= 0 somewhere.
std::vector<double> residual(const Problem& problem, const RadialGraph& graph, unsigned threads = 1);

/// Jacobian of the residual with respect to nodal r by central differences
/// over each node's stencil. No admissibility check.
Eigen::SparseMatrix<double> jacobian(const Problem& problem, const RadialGraph& graph, unsigned threads = 1);

inline constexpr int kMaxHalvings = 40;
inline constexpr double kArmijo = 1e-4;

struct StepResult {
    RadialGraph graph;
    double step_norm = 0.0;      // max-norm of the accepted update
    double lambda = 1.0;         // accepted damping
    double residual_before = 0.0;
    double residual_after = 0.0;
    int rejections = 0;          // line-search rejections (inadmissible or no decrease)
    int admissibility_rejections = 0;
};

/// One damped Newton step. Throws AdmissibilityError if the input graph is
/// inadmissible and StallError when the line search exhausts kMaxHalvings.
StepResult newton_step(const Problem& problem, const RadialGraph& graph, double damping = 1.0, unsigned threads = 1);

struct SolveOptions {
    std::optional<double> tol;  // default: 1e-10 axisym, 1e-8 grid_s2
    int max_iter = 50;
    double damping = 1.0;
    unsigned threads = 1;
};

double default_tolerance(GridSpec grid);

enum class SolveStatus { converged, max_iterations, stalled, inadmissible, failed };
std::string to_string(SolveStatus s);

struct SolveReport {
    Problem problem;
    bool converged = false;
    SolveStatus status = SolveStatus::failed;
    int iterations = 0;
    double tolerance = 0.0;
    std::vector<double> residual_history;  // max-norm, one entry per iterate including the start
    std::vector<double> kappa_max_history;
    std::vector<double> min_u_history;
    std::vector<double> min_r_history;
    std::vector<double> max_r_history;
    std::vector<double> step_norm_history;
    std::size_t admissibility_breaches = 0;  // line-search candidates rejected as inadmissible
    std::size_t line_search_rejections = 0;  // all rejected candidates
    std::optional<std::string> message;
    RadialGraph final_graph;
};

/// Errors (stall, inadmissible start, geometry failures) are recorded in the
/// report, never thrown.
SolveReport solve(const Problem& problem, const RadialGraph& init, const SolveOptions& opts = {});

struct PPath {
    std::vector<double> values;
    /// Replace psi by the sphere-exact value for this R at every step.
    std::optional<double> rescale_to_radius;
};
struct AmplitudePath {
    PsiSpec from;
    PsiSpec to;
    std::vector<double> t;
};
using Path = std::variant<PPath, AmplitudePath>;

struct ContinuationStep {
    double parameter = 0.0;
    SolveReport report;
};

struct ContinuationResult {
    std::vector<ContinuationStep> steps;
    bool completed = false;
    std::optional<std::string> failure;
};

/// Warm-started solves along the path; stops at the first failed step.
ContinuationResult continuation(const Problem& base, const RadialGraph& init, const Path& path,
                                const SolveOptions& opts = {});

}  // namespace curvlab::solver
