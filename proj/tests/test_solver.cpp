#include "doctest.h"
#include "helpers.hpp"

#include <Eigen/Dense>

#include "rbsn/errors.hpp"
#include "rbsn/log.hpp"
#include "rbsn/solver.hpp"

using namespace rbsn;
using testutil::uniform;

namespace {

Vec2 random_point(double s = 3.0) { return {uniform(-s, s), uniform(-s, s)}; }

Vec2 random_dir()
{
    const double a = uniform(-3.14159, 3.14159);
    return {std::cos(a), std::sin(a)};
}

struct Pair
{
    ContactElement e;
    Vec2 xa, xb;
};

Pair random_pair()
{
    Pair p;
    p.xa = random_point();
    p.xb = p.xa + random_dir() * uniform(0.5, 2.0);
    p.e.a = 0;
    p.e.b = 1;
    p.e.area = uniform(0.2, 1.5);
    p.e.length = norm(p.xb - p.xa);
    p.e.contact = (p.xb - p.xa) / p.e.length;
    p.e.normal = random_dir();
    p.e.centroid = random_point();
    p.e.chi = std::atan2(cross(p.e.normal, p.e.contact), dot(p.e.normal, p.e.contact));
    return p;
}

Eigen::Matrix<double, 6, 1> random_dofs()
{
    Eigen::Matrix<double, 6, 1> d;
    for (int i = 0; i < 6; ++i)
        d[i] = uniform();
    return d;
}

/// Jump at the centroid written out directly from the rigid-body kinematics.
Vec2 jump(const Pair& p, const Eigen::Matrix<double, 6, 1>& d)
{
    const Vec2 ra = p.e.centroid - p.xa, rb = p.e.centroid - p.xb;
    const Vec2 ua{d[0] - d[2] * ra.y, d[1] + d[2] * ra.x};
    const Vec2 ub{d[3] - d[5] * rb.y, d[4] + d[5] * rb.x};
    return ub - ua;
}

Tessellation two_bodies(const Pair& p)
{
    Tessellation t;
    t.nodes = {p.xa, p.xb};
    t.bodies.resize(2);
    t.contacts = {p.e};
    return t;
}

Tessellation quiet_generate(TessellationKind kind, double size, std::uint64_t seed)
{
    set_warning_handler({});
    auto t = generate(kind, size, size, 1.0, seed);
    set_warning_handler([](const std::string& m) { std::fprintf(stderr, "warning: %s\n", m.c_str()); });
    return t;
}

Eigen::MatrixXd dense(const Eigen::SparseMatrix<double>& m) { return Eigen::MatrixXd(m); }

}  // namespace

TEST_CASE("element stiffness is symmetric positive semidefinite with rigid modes in its nullspace")
{
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_pair();
        const MaterialParams params{uniform(0.5, 3.0), uniform(0.0, 3.0)};
        const Matrix6 k = element_stiffness(p.e, params, p.xa, p.xb);
        const double scale = k.cwiseAbs().maxCoeff();
        CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale);
        const Eigen::SelfAdjointEigenSolver<Matrix6> eig(k);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-12 * scale);

        Eigen::Matrix<double, 6, 1> trans;
        trans << 0.3, -0.7, 0.0, 0.3, -0.7, 0.0;
        CHECK((k * trans).norm() <= 1e-10 * scale);

        // Rotation of the pair by omega about an arbitrary pivot.
        const Vec2 pivot = random_point(5.0);
        const double omega = uniform();
        const Vec2 va = perp(p.xa - pivot) * omega, vb = perp(p.xb - pivot) * omega;
        Eigen::Matrix<double, 6, 1> rot;
        rot << va.x, va.y, omega, vb.x, vb.y, omega;
        CHECK((k * rot).norm() <= 1e-10 * scale * rot.norm());
    }
}

TEST_CASE("element energy equals the facet strain energy")
{
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_pair();
        const MaterialParams params{uniform(0.5, 3.0), uniform(0.0, 3.0)};
        const Matrix6 k = element_stiffness(p.e, params, p.xa, p.xb);
        const auto d = random_dofs();
        const Vec2 delta = jump(p, d);
        const double en = dot(p.e.normal, delta) / p.e.length;
        const Vec2 et = delta / p.e.length - en * p.e.normal;
        const double expected = 0.5 * p.e.area * p.e.length * params.e0 * (en * en + params.alpha * dot(et, et));
        CHECK(0.5 * d.dot(k * d) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("element stiffness rejects vanishing length")
{
    auto p = random_pair();
    p.e.length = 1e-12;
    CHECK_THROWS_AS(element_stiffness(p.e, {1.0, 0.5}, p.xa, p.xb, 1e-9), SolverError);
}

TEST_CASE("two-body assembly reproduces the element matrix")
{
    const auto p = random_pair();
    const MaterialParams params{2.0, 0.4};
    const auto sys = assemble(two_bodies(p), params);
    CHECK(sys.stiffness.rows() == 6);
    const Eigen::MatrixXd k = dense(sys.stiffness);
    CHECK((k - element_stiffness(p.e, params, p.xa, p.xb)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("global stiffness is symmetric with exactly three rigid modes")
{
    const auto t = quiet_generate(TessellationKind::Random, 4.0, 5);
    REQUIRE(t.nodes.size() <= 30);
    const MaterialParams params{1.0, 0.3};
    const auto sys = assemble(t, params);
    const Eigen::MatrixXd k = dense(sys.stiffness);
    const double scale = k.cwiseAbs().maxCoeff();
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    for (int col = 0; col < sys.stiffness.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.stiffness, col); it; ++it)
            CHECK(sys.stiffness.coeff(col, it.row()) == doctest::Approx(it.value()));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
    const double top = eig.eigenvalues().maxCoeff();
    int zero = 0;
    for (int i = 0; i < eig.eigenvalues().size(); ++i)
        zero += eig.eigenvalues()[i] < 1e-10 * top;
    CHECK(zero == 3);
}

TEST_CASE("assembly reports detached bodies")
{
    auto t = two_bodies(random_pair());
    t.nodes.push_back({10.0, 10.0});
    t.bodies.emplace_back();
    try {
        assemble(t, {1.0, 0.5});
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("zero strain gives the zero solution")
{
    const auto t = quiet_generate(TessellationKind::RandomizedVoronoi, 8.0, 3);
    const auto boundary = t.boundary_nodes();
    const auto sys = apply_strain_bc(assemble(t, {1.0, 0.3}), t, StrainLoad{}, boundary);
    int flagged = 0;
    for (char b : boundary)
        flagged += b;
    int constrained = 0;
    for (char c : sys.constrained)
        constrained += c;
    CHECK(constrained == 3 * flagged);
    CHECK(solve(sys).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a free body between two prescribed bodies matches a dense solve")
{
    Tessellation t;
    t.l_min = 1.0;
    t.nodes = {{0.0, 0.0}, {1.0, 0.2}, {2.1, 0.0}};
    t.bodies.resize(3);
    ContactElement e0, e1;
    e0.a = 0, e0.b = 1, e0.area = 0.8, e0.centroid = {0.5, 0.3}, e0.normal = {0.98, 0.2};
    e1.a = 1, e1.b = 2, e1.area = 1.1, e1.centroid = {1.6, -0.1}, e1.normal = {0.95, -0.3};
    for (auto* e : {&e0, &e1}) {
        e->normal = e->normal / norm(e->normal);
        const Vec2 d = t.nodes[e->b] - t.nodes[e->a];
        e->length = norm(d);
        e->contact = d / e->length;
        e->chi = std::atan2(cross(e->normal, e->contact), dot(e->normal, e->contact));
    }
    t.contacts = {e0, e1};
    const MaterialParams params{1.5, 0.35};
    const auto load = StrainLoad::uniaxial(1e-3, -4e-4);
    const std::vector<char> fixed{1, 0, 1};
    const auto full = assemble(t, params);
    const auto d = solve(apply_strain_bc(full, t, load, fixed));

    const Eigen::MatrixXd k = dense(full.stiffness);
    Eigen::VectorXd uc(6);
    uc << load.displacement(t.nodes[0]), 0.0, load.displacement(t.nodes[2]), 0.0;
    const std::vector<int> cidx{0, 1, 2, 6, 7, 8};
    Eigen::Matrix3d kff = k.block<3, 3>(3, 3);
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 6; ++j)
            rhs[i] -= k(3 + i, cidx[j]) * uc[j];
    const Eigen::Vector3d x = kff.ldlt().solve(rhs);
    for (int i = 0; i < 3; ++i)
        CHECK(d[3 + i] == doctest::Approx(x[i]).epsilon(1e-12));
    for (int j = 0; j < 6; ++j)
        CHECK(d[cidx[j]] == uc[j]);
}

TEST_CASE("singular systems report the offending pivot")
{
    // One element with a fixed neighbour leaves the free body able to spin
    // about the contact centroid.
    const auto p = random_pair();
    const auto t = two_bodies(p);
    const auto sys = apply_strain_bc(assemble(t, {1.0, 0.5}), t, StrainLoad::uniaxial(1e-3, 0.0), {1, 0});
    try {
        solve(sys);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(std::string(e.what()).find("node 1") != std::string::npos);
    }
}

TEST_CASE("conjugate gradients agree with Cholesky")
{
    const auto t = quiet_generate(TessellationKind::Random, 20.0, 2);
    const auto sys = apply_strain_bc(assemble(t, {1.0, 0.3}), t, StrainLoad::uniaxial(1e-3, 0.0), t.boundary_nodes());
    const auto a = solve(sys);
    SolveOptions cg;
    cg.method = LinearSolver::ConjugateGradient;
    const auto b = solve(sys, cg);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-8 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("contact states under the Voigt field")
{
    const auto t = quiet_generate(TessellationKind::Random, 10.0, 4);
    Eigen::Matrix2d eps;
    eps << 1.3e-3, 0.4e-3, 0.4e-3, -0.7e-3;
    const StrainLoad load{eps};
    const MaterialParams params{2.0, 0.6};
    const auto states = contact_states(t, voigt_field(t, load), params);
    for (std::size_t i = 0; i < t.contacts.size(); ++i) {
        const auto& e = t.contacts[i];
        const Eigen::Vector2d n(e.normal.x, e.normal.y), tv(e.contact.x, e.contact.y);
        const Eigen::Vector2d et = eps * tv - n.dot(eps * tv) * n;
        CHECK(std::abs(states[i].e_n - n.dot(eps * tv)) <= 1e-12 * 1.3e-3);
        CHECK(std::abs(states[i].e_t.x - et.x()) <= 1e-12 * 1.3e-3);
        CHECK(std::abs(states[i].e_t.y - et.y()) <= 1e-12 * 1.3e-3);
        CHECK(std::abs(dot(states[i].e_t, e.normal)) <= 1e-12 * 1.3e-3);
    }
}

TEST_CASE("zero tangential stiffness transmits normal forces only")
{
    const auto t = quiet_generate(TessellationKind::RandomizedVoronoi, 8.0, 9);
    Eigen::VectorXd d = Eigen::VectorXd::Random(3 * static_cast<Eigen::Index>(t.nodes.size())) * 1e-3;
    const auto states = contact_states(t, d, {1.0, 0.0});
    for (std::size_t i = 0; i < states.size(); ++i) {
        CHECK(norm(states[i].s_t) == 0.0);
        CHECK(std::abs(cross(states[i].force, t.contacts[i].normal)) <= 1e-15);
    }
}

TEST_CASE("rigid motion produces no contact strain")
{
    const auto t = quiet_generate(TessellationKind::Random, 8.0, 6);
    const Vec2 pivot{3.0, -1.0};
    const double omega = 2e-3;
    Eigen::VectorXd d(3 * static_cast<Eigen::Index>(t.nodes.size()));
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const Vec2 u = Vec2{0.01, -0.02} + perp(t.nodes[i] - pivot) * omega;
        d.segment<3>(3 * static_cast<Eigen::Index>(i)) << u.x, u.y, omega;
    }
    for (const auto& s : contact_states(t, d, {1.0, 0.8})) {
        CHECK(std::abs(s.e_n) <= 1e-15);
        CHECK(norm(s.force) <= 1e-15);
    }
    const auto r = residual(t, contact_states(t, d, {1.0, 0.8}), {1.0, 0.8}, {});
    CHECK(r.force <= 1e-15);
    CHECK(r.moment <= 1e-15);
}

TEST_CASE("Voronoi structure at alpha = 1 reproduces the Voigt field")
{
    const auto t = quiet_generate(TessellationKind::Voronoi, 20.0, 11);
    const auto load = StrainLoad::uniaxial(1e-3, 0.0);
    const auto sim = simulate(t, {1.0, 1.0}, load);
    const auto voigt = voigt_field(t, load);
    CHECK((sim.dofs - voigt).cwiseAbs().maxCoeff() <= 1e-9 * 1e-3 * t.domain.width());
    CHECK(sim.residual.force < 1e-9);
    CHECK(sim.residual.moment < 1e-9);
}

TEST_CASE("solved systems are in equilibrium and the Voigt field is not for random bodies")
{
    const auto t = quiet_generate(TessellationKind::Random, 15.0, 8);
    const MaterialParams params{1.0, 0.3};
    const auto load = StrainLoad::uniaxial(1e-3, 0.0);
    const auto sim = simulate(t, params, load);
    CHECK(sim.residual.force < 1e-9);
    CHECK(sim.residual.moment < 1e-9);
    const auto voigt = residual(t, contact_states(t, voigt_field(t, load), params), params, sim.boundary);
    CHECK(voigt.force > 1e-6);
}

TEST_CASE("energy of the assembled system equals the sum of facet energies")
{
    const auto t = quiet_generate(TessellationKind::Random, 8.0, 12);
    const MaterialParams params{1.7, 0.45};
    const auto sys = assemble(t, params);
    const Eigen::VectorXd d = Eigen::VectorXd::Random(sys.stiffness.rows());
    double facets = 0.0;
    const auto states = contact_states(t, d, params);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& e = t.contacts[i];
        facets += 0.5 * e.area * e.length * params.e0
                  * (states[i].e_n * states[i].e_n + params.alpha * dot(states[i].e_t, states[i].e_t));
    }
    CHECK(0.5 * d.dot(sys.stiffness * d) == doctest::Approx(facets).epsilon(1e-10));
}

TEST_CASE("scaling E0 scales forces and leaves displacements unchanged")
{
    const auto t = quiet_generate(TessellationKind::CenteredRandom, 10.0, 13);
    const auto load = StrainLoad::uniaxial(1e-3, 2e-4);
    const auto a = simulate(t, {1.0, 0.4}, load);
    const auto b = simulate(t, {7.5, 0.4}, load);
    CHECK((a.dofs - b.dofs).cwiseAbs().maxCoeff() <= 1e-12 * a.dofs.cwiseAbs().maxCoeff());
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        CHECK(b.states[i].force.x == doctest::Approx(7.5 * a.states[i].force.x).epsilon(1e-9).scale(1e-12));
        CHECK(b.states[i].force.y == doctest::Approx(7.5 * a.states[i].force.y).epsilon(1e-9).scale(1e-12));
    }
}

TEST_CASE("moving governing nodes changes the solution")
{
    const auto random = quiet_generate(TessellationKind::Random, 15.0, 21);
    const auto centered = center_nodes(random);
    const auto load = StrainLoad::uniaxial(1e-3, 0.0);
    const auto a = simulate(random, {1.0, 0.2}, load);
    const auto b = simulate(centered, {1.0, 0.2}, load);
    CHECK((a.dofs - b.dofs).cwiseAbs().maxCoeff() > 1e-3 * a.dofs.cwiseAbs().maxCoeff());
}
