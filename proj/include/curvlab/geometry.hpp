#pragma once

// Induced metric, second fundamental form, principal curvatures and support
// function of a radial graph, plus finite-difference checks of the geometric
// identities they satisfy. Tensor components are taken in the orthonormal
// frame of the round sphere (meridional direction first).

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "curvlab/graph.hpp"
#include "curvlab/symfunc.hpp"

namespace curvlab::geometry {

/// Gradient and Hessian of a scalar field on the round sphere at a node,
/// by second-order central differences.
struct FieldJet {
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

FieldJet field_jet(const RadialGraph& graph, std::span<const double> f, std::size_t node);

struct PointFrameData {
    std::size_t node = 0;
    double r = 0.0;
    WarpValues warp;
    Eigen::VectorXd grad_r;
    Eigen::MatrixXd hess_r;
    Eigen::MatrixXd g;
    Eigen::MatrixXd g_inv;
    Eigen::MatrixXd h;
    symfunc::PrincipalCurvatures kappa{1.0};
    double u = 0.0;  // support function
};

/// Throws DiscretizationError (naming the node) if g is not numerically SPD
/// or the generalized eigen-solve fails.
PointFrameData fundamental_forms(const RadialGraph& graph, std::size_t node);

/// fundamental_forms at every node, in node order.
std::vector<PointFrameData> frame_field(const RadialGraph& graph, unsigned threads = 1);

struct IdentityReport {
    /// max over nodes of |grad u - h g^{-1} grad Phi| (componentwise max)
    double grad_u_residual = 0.0;
    std::size_t grad_u_worst_node = 0;
    std::vector<double> grad_u_by_node;
    /// max over nodes and frame directions of the Hessian-of-Phi identity
    /// residual; axisym only.
    std::optional<double> hess_phi_residual;
    std::size_t nodes = 0;
};

IdentityReport check_geometric_identities(const RadialGraph& graph, unsigned threads = 1);

struct CodazziReport {
    double defect = 0.0;  // max over nodes
    std::size_t worst_node = 0;
};

/// Axisymmetric graphs in space-form warps. The meridional Codazzi equation
/// is checked in the form d(rho kappa_a) = kappa_m d rho along the meridian,
/// rho = phi(r) sin(theta) the orbit radius, which stays regular at the poles.
/// Throws UnsupportedError for custom warps or grid_s2 graphs.
CodazziReport codazzi_defect(const RadialGraph& graph, unsigned threads = 1);

/// One row per node: coordinates, r, kappa_1..kappa_n, u.
void write_csv(std::ostream& out, const RadialGraph& graph, const std::vector<PointFrameData>& frames);

}  // namespace curvlab::geometry
