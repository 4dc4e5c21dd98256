#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rbsn/geometry.hpp"
#include "rbsn/theory.hpp"

namespace rbsn {

/// Per node: u_x, u_y, phi.
using DofVector = Eigen::VectorXd;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using JumpOperator = Eigen::Matrix<double, 2, 6>;

inline constexpr int dofs_per_node = 3;

/// Maps [u_a, phi_a, u_b, phi_b] to the displacement jump at the face
/// centroid.
JumpOperator jump_operator(const ContactElement& e, Vec2 xa, Vec2 xb);

/// (E0 A / l) B^T (n n^T + alpha (1 - n n^T)) B. Throws SolverError when
/// l <= min_length.
Matrix6 element_stiffness(const ContactElement& e, const MaterialParams& params, Vec2 xa, Vec2 xb,
                          double min_length = 0.0);

struct SparseSystem
{
    Eigen::SparseMatrix<double> stiffness;  // over free DOFs
    Eigen::VectorXd rhs;
    std::vector<int> free_dofs;         // reduced index -> global DOF
    std::vector<char> constrained;      // per global DOF
    Eigen::VectorXd prescribed;         // per global DOF, used where constrained

    int dof_count() const { return static_cast<int>(constrained.size()); }
};

/// Global stiffness with every DOF free and zero right-hand side. Throws
/// SolverError naming nodes without any contact.
SparseSystem assemble(const Tessellation& t, const MaterialParams& params, int threads = 1);

/// Macroscopic strain imposed on the boundary through u = eps x, phi = 0.
struct StrainLoad
{
    Eigen::Matrix2d eps = Eigen::Matrix2d::Zero();

    static StrainLoad uniaxial(double p, double q);
    Eigen::Vector2d displacement(Vec2 x) const { return eps * Eigen::Vector2d(x.x, x.y); }
};

/// Eliminates the DOFs of the flagged nodes by substitution.
SparseSystem apply_strain_bc(const SparseSystem& sys, const Tessellation& t, const StrainLoad& load,
                             const std::vector<char>& boundary_nodes);

enum class LinearSolver { Cholesky, ConjugateGradient };

struct SolveOptions
{
    LinearSolver method = LinearSolver::Cholesky;
    double cg_tolerance = 1e-10;
    int cg_max_iterations = 0;  // 0: 10 x system size
};

/// Solves the reduced system and returns the full DOF vector.
DofVector solve(const SparseSystem& sys, const SolveOptions& options = {});

struct ContactState
{
    Vec2 delta;
    double e_n = 0.0;
    Vec2 e_t;
    double s_n = 0.0;
    Vec2 s_t;
    Vec2 force;  // A (s_N n + s_T), exerted on a by b
};

ContactState contact_state(const ContactElement& e, const DofVector& d, const Tessellation& t,
                           const MaterialParams& params);
std::vector<ContactState> contact_states(const Tessellation& t, const DofVector& d, const MaterialParams& params,
                                         int threads = 1);

struct Residual
{
    double force = 0.0;   // max |sum f| / (E0 l_min)
    double moment = 0.0;  // max |sum r x f| / (E0 l_min^2)
};

/// Out-of-balance force and moment over the nodes that are not flagged.
Residual residual(const Tessellation& t, const std::vector<ContactState>& states, const MaterialParams& params,
                  const std::vector<char>& excluded);

/// Voigt field u = eps x, phi = 0 at every node.
DofVector voigt_field(const Tessellation& t, const StrainLoad& load);

struct Simulation
{
    DofVector dofs;
    std::vector<ContactState> states;
    std::vector<char> boundary;
    Residual residual;
};

/// Assemble, constrain the boundary bodies, solve and evaluate contacts.
Simulation simulate(const Tessellation& t, const MaterialParams& params, const StrainLoad& load,
                    const SolveOptions& options = {}, int threads = 1);

/// Human-readable DOF name, e.g. "node 12 phi".
std::string dof_name(int dof);

}  // namespace rbsn
