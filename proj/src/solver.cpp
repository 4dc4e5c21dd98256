#include "rbsn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "rbsn/errors.hpp"
#include "rbsn/log.hpp"
#include "rbsn/parallel.hpp"

namespace rbsn {

std::string dof_name(int dof)
{
    static const char* names[] = {"u_x", "u_y", "phi"};
    return "node " + std::to_string(dof / dofs_per_node) + " " + names[dof % dofs_per_node];
}

JumpOperator jump_operator(const ContactElement& e, Vec2 xa, Vec2 xb)
{
    const Vec2 pa = perp(e.centroid - xa), pb = perp(e.centroid - xb);
    JumpOperator b;
    b << -1.0, 0.0, -pa.x, 1.0, 0.0, pb.x,
          0.0, -1.0, -pa.y, 0.0, 1.0, pb.y;
    return b;
}

Matrix6 element_stiffness(const ContactElement& e, const MaterialParams& params, Vec2 xa, Vec2 xb, double min_length)
{
    if (!(e.length > min_length))
        throw SolverError("contact " + std::to_string(e.a) + "-" + std::to_string(e.b) + " has length "
                          + std::to_string(e.length) + " below the minimum " + std::to_string(min_length));
    const Eigen::Vector2d n(e.normal.x, e.normal.y);
    const Eigen::Matrix2d nn = n * n.transpose();
    const Eigen::Matrix2d c = params.e0 * e.area / e.length * (nn + params.alpha * (Eigen::Matrix2d::Identity() - nn));
    const JumpOperator b = jump_operator(e, xa, xb);
    Matrix6 k = b.transpose() * c * b;
    return 0.5 * (k + k.transpose());
}

SparseSystem assemble(const Tessellation& t, const MaterialParams& params, int threads)
{
    params.validate();
    const int n = static_cast<int>(t.nodes.size());
    std::vector<char> touched(n, 0);
    for (const auto& e : t.contacts) {
        if (e.a < 0 || e.b >= n || e.a >= e.b)
            throw SolverError("contact refers to invalid node pair " + std::to_string(e.a) + ", " + std::to_string(e.b));
        touched[e.a] = touched[e.b] = 1;
    }
    std::vector<int> orphans;
    for (int i = 0; i < n; ++i)
        if (!touched[i])
            orphans.push_back(i);
    if (!orphans.empty()) {
        std::ostringstream msg;
        msg << "detached bodies without contacts:";
        for (std::size_t i = 0; i < std::min<std::size_t>(orphans.size(), 20); ++i)
            msg << ' ' << orphans[i];
        if (orphans.size() > 20)
            msg << " ... (" << orphans.size() << " total)";
        throw SolverError(msg.str());
    }

    std::vector<Matrix6> local(t.contacts.size());
    const double min_length = 1e-9 * t.l_min;
    parallel_for(t.contacts.size(), threads, [&](std::size_t i) {
        const auto& e = t.contacts[i];
        local[i] = element_stiffness(e, params, t.nodes[e.a], t.nodes[e.b], min_length);
    });

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(36 * t.contacts.size());
    for (std::size_t i = 0; i < t.contacts.size(); ++i) {
        const auto& e = t.contacts[i];
        const int base[2] = {dofs_per_node * e.a, dofs_per_node * e.b};
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 6; ++c)
                triplets.emplace_back(base[r / 3] + r % 3, base[c / 3] + c % 3, local[i](r, c));
    }
    const int size = dofs_per_node * n;
    SparseSystem sys;
    sys.stiffness.resize(size, size);
    sys.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    sys.stiffness.makeCompressed();
    sys.rhs = Eigen::VectorXd::Zero(size);
    sys.free_dofs.resize(size);
    for (int i = 0; i < size; ++i)
        sys.free_dofs[i] = i;
    sys.constrained.assign(size, 0);
    sys.prescribed = Eigen::VectorXd::Zero(size);
    return sys;
}

StrainLoad StrainLoad::uniaxial(double p, double q)
{
    StrainLoad load;
    load.eps << p, 0.0, 0.0, q;
    return load;
}

SparseSystem apply_strain_bc(const SparseSystem& sys, const Tessellation& t, const StrainLoad& load,
                             const std::vector<char>& boundary_nodes)
{
    const int size = sys.dof_count();
    if (sys.stiffness.rows() != size || static_cast<int>(sys.free_dofs.size()) != size)
        throw std::invalid_argument("apply_strain_bc expects an unconstrained system");
    if (static_cast<int>(boundary_nodes.size()) * dofs_per_node != size)
        throw std::invalid_argument("boundary flags do not match the node count");
    if (std::none_of(boundary_nodes.begin(), boundary_nodes.end(), [](char c) { return c != 0; }))
        throw std::invalid_argument("no boundary nodes to constrain");

    SparseSystem out;
    out.constrained.assign(size, 0);
    out.prescribed = Eigen::VectorXd::Zero(size);
    for (std::size_t i = 0; i < boundary_nodes.size(); ++i) {
        if (!boundary_nodes[i])
            continue;
        const auto u = load.displacement(t.nodes[i]);
        const int base = dofs_per_node * static_cast<int>(i);
        out.prescribed[base] = u.x();
        out.prescribed[base + 1] = u.y();
        out.prescribed[base + 2] = 0.0;
        out.constrained[base] = out.constrained[base + 1] = out.constrained[base + 2] = 1;
    }
    std::vector<int> reduced(size, -1);
    for (int i = 0; i < size; ++i)
        if (!out.constrained[i]) {
            reduced[i] = static_cast<int>(out.free_dofs.size());
            out.free_dofs.push_back(i);
        }
    const int nf = static_cast<int>(out.free_dofs.size());
    if (nf == 0)
        warn("all degrees of freedom are prescribed");

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(sys.stiffness.nonZeros());
    out.rhs = Eigen::VectorXd::Zero(nf);
    for (int col = 0; col < size; ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.stiffness, col); it; ++it) {
            const int row = static_cast<int>(it.row());
            if (reduced[row] < 0)
                continue;
            if (reduced[col] >= 0)
                triplets.emplace_back(reduced[row], reduced[col], it.value());
            else
                out.rhs[reduced[row]] -= it.value() * out.prescribed[col];
        }
    }
    for (int i = 0; i < nf; ++i)
        out.rhs[i] += sys.rhs[out.free_dofs[i]];
    out.stiffness.resize(nf, nf);
    out.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    out.stiffness.makeCompressed();
    return out;
}

DofVector solve(const SparseSystem& sys, const SolveOptions& options)
{
    const int nf = static_cast<int>(sys.free_dofs.size());
    DofVector d = sys.prescribed;
    if (nf == 0)
        return d;
    Eigen::VectorXd x;
    if (options.method == LinearSolver::Cholesky) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(sys.stiffness);
        const Eigen::VectorXd diag = ldlt.vectorD();
        double scale = 0.0;
        for (int i = 0; i < sys.stiffness.outerSize(); ++i)
            scale = std::max(scale, std::abs(sys.stiffness.coeff(i, i)));
        if (diag.size() == nf) {
            Eigen::Index worst = 0;
            const double smallest = diag.minCoeff(&worst);
            if (smallest <= 1e-13 * scale) {
                // vectorD is in permuted order; map back through P.
                const auto& perm = ldlt.permutationP().indices();
                int original = 0;
                for (int i = 0; i < perm.size(); ++i)
                    if (perm[i] == worst)
                        original = i;
                std::ostringstream msg;
                msg << "stiffness matrix is not positive definite: pivot " << smallest << " at "
                    << dof_name(sys.free_dofs[original]);
                throw SolverError(msg.str());
            }
        }
        if (ldlt.info() != Eigen::Success)
            throw SolverError("sparse factorization failed");
        x = ldlt.solve(sys.rhs);
        if (ldlt.info() != Eigen::Success)
            throw SolverError("sparse back-substitution failed");
    } else {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg(sys.stiffness);
        cg.setTolerance(options.cg_tolerance);
        cg.setMaxIterations(options.cg_max_iterations > 0 ? options.cg_max_iterations : 10 * nf);
        x = cg.solve(sys.rhs);
        if (cg.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "conjugate gradient did not converge: relative residual " << cg.error() << " after "
                << cg.iterations() << " iterations";
            throw SolverError(msg.str());
        }
    }
    for (int i = 0; i < nf; ++i)
        d[sys.free_dofs[i]] = x[i];
    if (!d.allFinite())
        throw SolverError("solution contains non-finite values");
    return d;
}

ContactState contact_state(const ContactElement& e, const DofVector& d, const Tessellation& t,
                           const MaterialParams& params)
{
    Eigen::Matrix<double, 6, 1> local;
    local << d.segment<3>(dofs_per_node * e.a), d.segment<3>(dofs_per_node * e.b);
    const Eigen::Vector2d jump = jump_operator(e, t.nodes[e.a], t.nodes[e.b]) * local;
    ContactState s;
    s.delta = {jump.x(), jump.y()};
    s.e_n = dot(e.normal, s.delta) / e.length;
    s.e_t = s.delta / e.length - s.e_n * e.normal;
    s.s_n = params.e0 * s.e_n;
    s.s_t = params.e0 * params.alpha * s.e_t;
    s.force = e.area * (s.s_n * e.normal + s.s_t);
    return s;
}

std::vector<ContactState> contact_states(const Tessellation& t, const DofVector& d, const MaterialParams& params,
                                         int threads)
{
    if (d.size() != dofs_per_node * static_cast<Eigen::Index>(t.nodes.size()))
        throw std::invalid_argument("DOF vector size does not match the node count");
    std::vector<ContactState> out(t.contacts.size());
    parallel_for(t.contacts.size(), threads,
                 [&](std::size_t i) { out[i] = contact_state(t.contacts[i], d, t, params); });
    return out;
}

Residual residual(const Tessellation& t, const std::vector<ContactState>& states, const MaterialParams& params,
                  const std::vector<char>& excluded)
{
    const std::size_t n = t.nodes.size();
    std::vector<Vec2> force(n);
    std::vector<double> moment(n, 0.0);
    for (std::size_t i = 0; i < t.contacts.size(); ++i) {
        const auto& e = t.contacts[i];
        const Vec2 f = states[i].force;
        force[e.a] -= f;
        force[e.b] += f;
        moment[e.a] -= cross(e.centroid - t.nodes[e.a], f);
        moment[e.b] += cross(e.centroid - t.nodes[e.b], f);
    }
    Residual r;
    for (std::size_t i = 0; i < n; ++i) {
        if (!excluded.empty() && excluded[i])
            continue;
        r.force = std::max(r.force, norm(force[i]));
        r.moment = std::max(r.moment, std::abs(moment[i]));
    }
    r.force /= params.e0 * t.l_min;
    r.moment /= params.e0 * t.l_min * t.l_min;
    return r;
}

DofVector voigt_field(const Tessellation& t, const StrainLoad& load)
{
    DofVector d = DofVector::Zero(dofs_per_node * static_cast<Eigen::Index>(t.nodes.size()));
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        d.segment<2>(dofs_per_node * static_cast<Eigen::Index>(i)) = load.displacement(t.nodes[i]);
    return d;
}

Simulation simulate(const Tessellation& t, const MaterialParams& params, const StrainLoad& load,
                    const SolveOptions& options, int threads)
{
    Simulation sim;
    sim.boundary = t.boundary_nodes();
    const auto sys = apply_strain_bc(assemble(t, params, threads), t, load, sim.boundary);
    sim.dofs = solve(sys, options);
    sim.states = contact_states(t, sim.dofs, params, threads);
    sim.residual = residual(t, sim.states, params, sim.boundary);
    return sim;
}

}  // namespace rbsn
