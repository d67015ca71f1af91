#pragma once

// A priori estimate quantities evaluated on discrete graphs and solver output.

#include <cstddef>
#include <optional>
#include <vector>

#include "curvlab/geometry.hpp"
#include "curvlab/solver.hpp"

namespace curvlab::estimates {

using geometry::RadialGraph;
using solver::Problem;

struct BarrierRecord {
    double min_r = 0.0;
    double max_r = 0.0;
    std::size_t argmax_node = 0;
    std::size_t argmin_node = 0;
    // at the argmax of r: sigma_k(kappa) >= C(n,k) (phi'/phi)^k
    double lhs_at_max = 0.0;
    double rhs_at_max = 0.0;
    // at the argmin of r: sigma_k(kappa) <= C(n,k) (phi'/phi)^k
    double lhs_at_min = 0.0;
    double rhs_at_min = 0.0;
    double tolerance_at_max = 0.0;
    double tolerance_at_min = 0.0;
    double mesh_spacing = 0.0;
    bool pass_at_max = false;
    bool pass_at_min = false;

    bool passed() const noexcept { return pass_at_max && pass_at_min; }
    double slack_at_max() const noexcept { return lhs_at_max - rhs_at_max; }
    double slack_at_min() const noexcept { return rhs_at_min - lhs_at_min; }
};

/// Discrete extremum version of the C0 barrier argument. The extremum of the
/// continuum r lies within a cell of the grid one, so each inequality is
/// allowed a slack of 10 h^2 max(1, |rhs|). Throws AdmissibilityError if the
/// graph is not in Gamma_k at some node. Ties go to the lowest node index.
BarrierRecord barrier_check(const Problem& problem, const RadialGraph& graph);

struct C1Record {
    double min_u = 0.0;
    std::size_t argmin_node = 0;
    double epsilon0 = 0.0;  // min over nodes of u^2 / phi(r)^2
};

C1Record c1_monitor(const RadialGraph& graph);

struct QParams {
    double N = 2.0;
    double alpha = 1.0;
    double a = 0.0;
};

struct QField {
    std::vector<double> values;
    double max = 0.0;
    std::size_t argmax_node = 0;
    /// max-norm of the central-difference gradient of Q at the argmax: the
    /// residual of the first-order critical condition
    /// grad kappa_1 / kappa_1 = N grad u / (u - a) - alpha grad Phi.
    double critical_residual = 0.0;
};

/// Q = log kappa_1 - N log(u - a) + alpha Phi(r) per node. Throws DomainError
/// where u <= a or kappa_1 <= 0.
QField q_field(const RadialGraph& graph, const QParams& params);

/// 1 + epsilon0 (k - 1).
double p_range_constant(const RadialGraph& graph, int k);

struct C2Record {
    double kappa_max = 0.0;
    std::size_t argmax_node = 0;
    double q_max = 0.0;
    std::size_t q_argmax_node = 0;
    double q_critical_residual = 0.0;
};

struct EstimateReport {
    BarrierRecord c0;
    C1Record c1;
    C2Record c2;
    double p_range = 0.0;
};

EstimateReport estimate(const Problem& problem, const RadialGraph& graph, const QParams& q = {});

struct SeriesEntry {
    std::size_t step = 0;
    double parameter = 0.0;
    bool converged = false;
    double kappa_max = 0.0;
    double min_u = 0.0;
    double min_r = 0.0;
    double max_r = 0.0;
    std::optional<double> barrier_slack_at_max;
    std::optional<double> barrier_slack_at_min;
    bool barrier_passed = false;
    bool kappa_growth_flag = false;  // kappa_max above 10x the first step's
    bool min_u_flag = false;         // min u below 1e-3 of the first step's
};

inline constexpr double kKappaGrowthLimit = 10.0;
inline constexpr double kMinUFraction = 1e-3;

/// One entry per continuation step; barrier quantities only for converged steps.
std::vector<SeriesEntry> monitor_continuation(const std::vector<solver::ContinuationStep>& steps);

}  // namespace curvlab::estimates
