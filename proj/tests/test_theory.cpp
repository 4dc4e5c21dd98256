#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"

#include "rbsn/theory.hpp"

using namespace rbsn;
using std::numbers::pi;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
const AnalysisMode all_modes[] = {AnalysisMode::PlaneStress, AnalysisMode::PlaneStrain, AnalysisMode::ThreeD};

Tensor2 random_rotation(int dim)
{
    if (dim == 2)
        return rotation_2d(testutil::uniform(-pi, pi));
    return rotation_3d(testutil::uniform(0, 2 * pi), testutil::uniform(0, pi), testutil::uniform(0, 2 * pi),
                       testutil::uniform(0, pi));
}

/// Exact averages over a uniform 2D cone: trapezoid in xi (exact for the
/// trigonometric polynomials involved) times Simpson in chi.
Expectations quadrature_expectations_2d(double gamma)
{
    const int nxi = 64, nchi = 2000;
    Expectations ex(2);
    ex.volume = 0;
    for (int i = 0; i < nxi; ++i) {
        const double xi = 2 * pi * i / nxi;
        const Vector n = normal_from_angles(2, xi);
        for (int j = 0; j <= nchi; ++j) {
            const double chi = -gamma + 2 * gamma * j / nchi;
            const double w = (j == 0 || j == nchi ? 1.0 : (j % 2 ? 4.0 : 2.0)) / (3.0 * nchi) / nxi;
            const Tensor2 rho = rotation_2d(chi);
            const auto st = script_tensors(n, rho);
            ex.volume += w * ddot(rho, outer(n, n));
            ex.normal_sym += symmetrize_minor(st.normal) * w;
            ex.tangential_sym += symmetrize_minor(st.tangential) * w;
        }
    }
    return ex;
}

}  // namespace

TEST_CASE("rotations")
{
    CHECK(rotation_2d(0.0) == identity2(2));
    for (int k = 0; k < 20; ++k) {
        // Zero chi leaves only the spin theta about the normal, so n is fixed.
        const double xi = testutil::uniform(0, 6), zeta = testutil::uniform(0, 3);
        const Vector n = normal_from_angles(3, xi, zeta);
        CHECK(max_abs_diff(rotation_3d(xi, zeta, 0.0, 0.0), identity2(3)) < 1e-15);
        CHECK((dot(rotation_3d(xi, zeta, testutil::uniform(0, 6), 0.0), n) - n).max_abs() < 1e-15);
    }
    for (int dim : {2, 3}) {
        const Tensor2 r = random_rotation(dim);
        CHECK(max_abs_diff(dot(transpose(r), r), identity2(dim)) < 1e-12);
        CHECK(determinant(r) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rotation contracted with the normal dyad gives cos chi")
{
    double worst = 0;
    for (int k = 0; k < 10000; ++k) {
        const double xi = testutil::uniform(0, 2 * pi), zeta = testutil::uniform(0, pi);
        const double theta = testutil::uniform(0, 2 * pi), chi = testutil::uniform(0, pi);
        const Vector n = normal_from_angles(3, xi, zeta);
        const double v = ddot(rotation_3d(xi, zeta, theta, chi), outer(n, n));
        worst = std::max(worst, std::fabs(v - std::cos(chi)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("script tensors for an axis-aligned contact")
{
    const auto st = script_tensors(make_vector(1.0, 0.0), identity2(2));
    CHECK(st.normal(0, 0, 0, 0) == 1.0);
    CHECK(st.normal.max_abs() == 1.0);
    double sum = 0;
    st.normal.for_each_index([&](const std::array<int, 4>& i) { sum += std::fabs(st.normal.at(i)); });
    CHECK(sum == 1.0);
}

TEST_CASE("script tensors reproduce the facet strain energy")
{
    for (int dim : {2, 3})
        for (int k = 0; k < 200; ++k) {
            const Vector n = testutil::random_unit(dim);
            const Tensor2 rho = random_rotation(dim);
            const Tensor2 eps = testutil::random_symmetric(dim);
            const double alpha = testutil::uniform(0, 3);
            const Vector t = dot(rho, n);

            const double e_n = dot(n, dot(eps, t));
            const Vector e_t = dot(eps, t) - n * e_n;
            const auto st = script_tensors(n, rho);
            const double lhs = ddot(eps, ddot(st.normal + st.tangential * alpha, eps));
            CHECK(lhs == doctest::Approx(e_n * e_n + alpha * dot(e_t, e_t)).epsilon(1e-12));
        }
}

TEST_CASE("tangential energy vanishes when the strained contact vector stays normal")
{
    for (int dim : {2, 3}) {
        const Vector n = testutil::random_unit(dim);
        const Tensor2 rho = random_rotation(dim);
        const Tensor2 eps = outer(n, n) * 0.37;
        const auto st = script_tensors(n, rho);
        CHECK(std::fabs(ddot(eps, ddot(st.tangential, eps))) < 1e-14);
    }
}

TEST_CASE("closed-form expectations")
{
    SUBCASE("2D small cone angle")
    {
        const auto ex = closed_expectations(0.0, 2);
        CHECK(max_abs_diff(ex.normal_sym, identity_sym(2) * 0.25 + identity_vol(2) * 0.375) < 1e-15);
        CHECK(ex.volume == 1.0);
    }
    SUBCASE("3D zero cone angle")
    {
        const auto ex = closed_expectations(0.0, 3);
        CHECK(max_abs_diff(ex.normal_sym, identity_sym(3) * (2.0 / 15.0) + identity_vol(3) * 0.2) < 1e-15);
        CHECK(ex.volume == 1.0);
    }
    SUBCASE("3D volume expectation vanishes at gamma = pi")
    {
        CHECK(closed_expectations(pi, 3).volume < 1e-30);
    }
    SUBCASE("2D closed forms equal deterministic quadrature of the definitions")
    {
        for (double gamma : {0.3, 1.0, 2.0, 3.0}) {
            const auto q = quadrature_expectations_2d(gamma);
            const auto c = closed_expectations(gamma, 2);
            CHECK(q.volume == doctest::Approx(c.volume).epsilon(1e-10));
            CHECK(max_abs_diff(q.normal_sym, c.normal_sym) < 1e-10);
            CHECK(max_abs_diff(q.tangential_sym, c.tangential_sym) < 1e-10);
        }
    }
    SUBCASE("general expectations reduce to the cone forms")
    {
        for (int dim : {2, 3})
            for (double gamma : {0.2, 1.1, 2.5}) {
                const auto g = general_expectations(cone_moments(gamma, dim), dim);
                const auto c = closed_expectations(gamma, dim);
                CHECK(g.volume == doctest::Approx(c.volume).epsilon(1e-14));
                CHECK(max_abs_diff(g.normal_sym, c.normal_sym) < 1e-14);
                CHECK(max_abs_diff(g.tangential_sym, c.tangential_sym) < 1e-14);
            }
    }
}

TEST_CASE("Monte-Carlo oracle")
{
    SUBCASE("zero cone angle is exact in the volume term")
    {
        for (int dim : {2, 3}) {
            const auto est = expectation_oracle(OrientationDistribution::cone(0.0, dim), 20000, 7);
            CHECK(est.mean.volume == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(est.volume_se < 1e-12);
        }
    }
    SUBCASE("2D quarter-turn cone volume")
    {
        const auto est = expectation_oracle(OrientationDistribution::cone(pi / 2, 2), 200000, 11);
        CHECK(std::fabs(est.mean.volume - 2 / pi) < 3 * est.volume_se + 1e-12);
        CHECK(2 / pi == doctest::Approx(0.63662).epsilon(1e-5));
    }
    SUBCASE("3D full cone volume vanishes")
    {
        const auto est = expectation_oracle(OrientationDistribution::cone(pi, 3), 200000, 12);
        CHECK(std::fabs(est.mean.volume) < 3 * est.volume_se);
    }
    SUBCASE("agrees with closed forms")
    {
        for (int dim : {2, 3})
            for (double gamma : {0.3, 1.0, 2.0, 3.0}) {
                const auto est = expectation_oracle(OrientationDistribution::cone(gamma, dim), 200000, 99);
                const auto c = closed_expectations(gamma, dim);
                int outside = 0, total = 0;
                est.mean.normal_sym.for_each_index([&](const std::array<int, 4>& i) {
                    outside += std::fabs(est.mean.normal_sym.at(i) - c.normal_sym.at(i)) > 5 * est.normal_se.at(i) + 1e-12;
                    outside += std::fabs(est.mean.tangential_sym.at(i) - c.tangential_sym.at(i))
                               > 5 * est.tangential_se.at(i) + 1e-12;
                    total += 2;
                });
                CHECK(outside == 0);
                CHECK(std::fabs(est.mean.volume - c.volume) < 5 * est.volume_se);
            }
    }
    SUBCASE("deterministic and independent of thread count")
    {
        const auto d = OrientationDistribution::cone(1.3, 3);
        const auto a = expectation_oracle(d, 5000, 3, 1);
        const auto b = expectation_oracle(d, 5000, 3, 4);
        CHECK(a.mean.volume == b.mean.volume);
        CHECK(a.mean.normal_sym == b.mean.normal_sym);
        CHECK(a.tangential_se == b.tangential_se);
        const auto c = expectation_oracle(d, 5000, 4, 1);
        CHECK_FALSE(a.mean.normal_sym == c.mean.normal_sym);
    }
    CHECK_THROWS_AS(expectation_oracle(OrientationDistribution::cone(1.0, 2), 0, 1), std::invalid_argument);
}

TEST_CASE("angle moments")
{
    SUBCASE("quadrature confirms the closed forms")
    {
        for (int dim : {2, 3})
            for (int k = 1; k <= 31; ++k) {
                const double gamma = k == 31 ? pi : k / 10.0;
                const auto q = chi_moments_quadrature(OrientationDistribution::cone(gamma, dim));
                const auto c = cone_moments(gamma, dim);
                CHECK(q.i1 == doctest::Approx(c.i1).epsilon(1e-12).scale(1));
                CHECK(q.i2 == doctest::Approx(c.i2).epsilon(1e-12).scale(1));
            }
    }
    SUBCASE("Dirac distributions")
    {
        const auto par = chi_moments(OrientationDistribution::parallel(2));
        CHECK(par.i1 == 1.0);
        CHECK(par.i2 == 1.0);
        const auto perp = chi_moments(OrientationDistribution::perpendicular(3));
        CHECK(perp.i1 == 0.0);
        CHECK(perp.i2 == -1.0);
    }
    SUBCASE("tabulated uniform density")
    {
        const auto d = OrientationDistribution::tabulated(std::vector<double>(401, 5.0), 2);
        const auto m = chi_moments(d);
        CHECK(std::fabs(m.i1) < 1e-12);
        CHECK(std::fabs(m.i2) < 1e-12);
        CHECK(d.density(0.3) == doctest::Approx(1 / (2 * pi)));
        CHECK(d.sample_chi(0.5) == doctest::Approx(0.0).scale(1));
        CHECK(d.sample_chi(0.75) == doctest::Approx(pi / 2));
        CHECK_THROWS_AS(OrientationDistribution::tabulated({1.0, 2.0}, 2), std::invalid_argument);
    }
}

TEST_CASE("elastic tensor from expectations")
{
    const MaterialParams unit_alpha{2.5, 1.0};
    for (double gamma : {0.4, 1.2, 2.6}) {
        const Tensor4 d = elastic_tensor_meso(unit_alpha, closed_expectations(gamma, 2));
        CHECK(max_abs_diff(d, identity_sym(2) * (2.5 * gamma / std::sin(gamma))) < 1e-12);
    }
    const Tensor4 d0 = elastic_tensor_meso({1.0, 0.0}, closed_expectations(0.0, 2));
    CHECK(max_abs_diff(d0, (identity_sym(2) * 0.25 + identity_vol(2) * 0.375) * 2.0) < 1e-15);
    CHECK(d0 == symmetrize_minor(d0));
    CHECK_THROWS_AS(elastic_tensor_meso({1.0, 0.5}, closed_expectations(pi, 3)), std::domain_error);
    CHECK_THROWS_AS(elastic_tensor_meso({-1.0, 0.5}, closed_expectations(1.0, 3)), std::invalid_argument);
    CHECK_THROWS_AS(elastic_tensor_meso({1.0, -0.5}, closed_expectations(1.0, 3)), std::invalid_argument);
}

TEST_CASE("macroscopic tensor")
{
    for (auto mode : all_modes)
        CHECK(max_abs_diff(macro_tensor({1.0, 0.0, mode}), identity_sym(dimension_of(mode))) < 1e-15);
    const Tensor4 ps = macro_tensor({1.0, 1.0 / 3.0, AnalysisMode::PlaneStress});
    CHECK(max_abs_diff(ps, identity_sym(2) * 0.75 + identity_vol(2) * (9.0 / 8.0)) < 1e-15);
    for (auto mode : all_modes)
        for (double nu : {-0.9, -0.3, 0.0, 0.2, 0.45}) {
            const auto back = constants_from_tensor(macro_tensor({3.7, nu, mode}), mode);
            CHECK(back.e == doctest::Approx(3.7).epsilon(1e-12));
            CHECK(back.nu == doctest::Approx(nu).epsilon(1e-12).scale(1));
        }
    CHECK_THROWS_AS(macro_tensor({1.0, 1.0, AnalysisMode::PlaneStress}), std::domain_error);
    CHECK_THROWS_AS(macro_tensor({1.0, 0.5, AnalysisMode::PlaneStrain}), std::domain_error);
    CHECK_THROWS_AS(macro_tensor({1.0, -1.0, AnalysisMode::ThreeD}), std::domain_error);
}

TEST_CASE("limit predictions")
{
    auto check = [](AnalysisMode m, double alpha, double nu, double e) {
        const auto ec = predict_limit(alpha, m, 1.0);
        CHECK(std::fabs(ec.nu - nu) <= 1e-14);
        CHECK(std::fabs(ec.e - e) <= 1e-14);
    };
    check(AnalysisMode::PlaneStress, 0.0, 1.0 / 3.0, 2.0 / 3.0);
    check(AnalysisMode::PlaneStrain, 0.0, 0.25, 5.0 / 8.0);
    check(AnalysisMode::ThreeD, 0.0, 0.25, 0.5);
    for (auto m : all_modes)
        check(m, 1.0, 0.0, 1.0);
    for (auto m : all_modes)
        for (double alpha : {0.0, 0.3, 1.0, 2.0, 7.5}) {
            const auto lim = predict_limit(alpha, m);
            const auto near = predict_cone(alpha, 1e-8, m);
            CHECK(near.nu == doctest::Approx(lim.nu).epsilon(1e-6).scale(1));
            CHECK(near.e == doctest::Approx(lim.e).epsilon(1e-6).scale(1));
        }
    CHECK(predict_limit(inf, AnalysisMode::PlaneStress).nu == -1.0);
    CHECK(predict_limit(inf, AnalysisMode::ThreeD).e == 3.0);
    CHECK_THROWS_AS(predict_limit(-0.1, AnalysisMode::ThreeD), std::invalid_argument);
}

TEST_CASE("cone predictions")
{
    for (auto m : all_modes)
        for (double gamma : {0.3, 1.4, 2.9})
            CHECK(std::fabs(predict_cone(1.0, gamma, m).nu) < 1e-15);

    const double g = 2.24670;
    CHECK(predict_cone(0.0, g, AnalysisMode::PlaneStress).nu == doctest::Approx(-0.122).epsilon(0.0005 / 0.122));
    CHECK(predict_cone(1e6, g, AnalysisMode::PlaneStress).nu == doctest::Approx(0.098).epsilon(0.0005 / 0.098));

    SUBCASE("tensor coefficients match the mesoscale tensor")
    {
        for (auto m : all_modes) {
            const int dim = dimension_of(m);
            for (double alpha : {0.0, 0.2, 0.9, 1.7, 4.0})
                for (double gamma : {0.05, 0.5, 1.3, 2.2, 2.8}) {
                    const auto ec = predict_cone(alpha, gamma, m, 1.6);
                    if (m != AnalysisMode::PlaneStress && std::fabs(ec.nu + 1.0) < 1e-6)
                        continue;
                    const auto macro = isotropic_coefficients(macro_tensor(ec));
                    const auto meso =
                        isotropic_coefficients(elastic_tensor_meso({1.6, alpha}, closed_expectations(gamma, dim)));
                    CHECK(macro.sym == doctest::Approx(meso.sym).epsilon(1e-10));
                    CHECK(macro.vol == doctest::Approx(meso.vol).epsilon(1e-10).scale(1));
                }
        }
    }
    CHECK_THROWS_AS(predict_cone(1.0, pi, AnalysisMode::ThreeD), std::domain_error);
    CHECK_THROWS_AS(predict_cone(1.0, 3.5, AnalysisMode::PlaneStress), std::invalid_argument);
}

TEST_CASE("general predictions")
{
    for (auto m : all_modes)
        for (double alpha : {0.0, 0.5, 1.0, 3.0, inf}) {
            const auto g = predict_general(alpha, 1.0, 1.0, m);
            const auto l = predict_limit(alpha, m);
            if (std::isinf(l.nu)) {
                CHECK(g.nu == l.nu);
                continue;
            }
            CHECK(g.nu == doctest::Approx(l.nu).epsilon(1e-14).scale(1));
            CHECK(g.e == doctest::Approx(l.e).epsilon(1e-14));
        }
    for (double i1 : {0.3, 0.8, 1.0}) {
        const auto g = predict_general(1.0, i1, 0.4, AnalysisMode::PlaneStress, 2.0);
        CHECK(g.nu == 0.0);
        CHECK(g.e == doctest::Approx(2.0 / i1).epsilon(1e-15));
    }
    CHECK(predict_general(0.0, 0.97, 0.91372, AnalysisMode::PlaneStress).nu
          == doctest::Approx(0.91372 / 2.91372).epsilon(1e-15));
    CHECK_THROWS_AS(predict_general(0.5, 1.0, 1.2, AnalysisMode::ThreeD), std::invalid_argument);
    CHECK_THROWS_AS(predict_general(0.5, 0.0, 0.5, AnalysisMode::ThreeD), std::invalid_argument);
}

TEST_CASE("stationary cone angles")
{
    const auto g2 = stationary_gammas(2);
    REQUIRE(g2.size() == 2);
    CHECK(g2[0] == 0.0);
    CHECK(g2[1] == doctest::Approx(2.24670).epsilon(1e-4 / 2.2467));
    CHECK(std::fabs(2 * g2[1] - std::tan(2 * g2[1])) < 1e-9);
    const auto g3 = stationary_gammas(3);
    REQUIRE(g3.size() == 3);
    CHECK(g3[1] == doctest::Approx(2 * pi / 3).epsilon(1e-15));
    CHECK(g3[1] == doctest::Approx(2.09440).epsilon(1e-4 / 2.0944));
    // nu(gamma) is stationary there for every alpha
    for (double alpha : {0.0, 0.5, 3.0}) {
        const double h = 1e-5;
        const double d2 = predict_cone(alpha, g2[1] + h, AnalysisMode::PlaneStress).nu
                          - predict_cone(alpha, g2[1] - h, AnalysisMode::PlaneStress).nu;
        const double d3 = predict_cone(alpha, g3[1] + h, AnalysisMode::ThreeD).nu
                          - predict_cone(alpha, g3[1] - h, AnalysisMode::ThreeD).nu;
        CHECK(std::fabs(d2) < 1e-9);
        CHECK(std::fabs(d3) < 1e-9);
    }
}

TEST_CASE("Poisson's ratio intervals")
{
    auto near = [](NuInterval iv, double lo, double hi) {
        CHECK(std::fabs(iv.lo - lo) <= 0.001);
        CHECK(std::fabs(iv.hi - hi) <= 0.001);
    };
    near(nu_interval_cone(AnalysisMode::PlaneStress, stationary_gammas(2)[1]), -0.122, 0.098);
    near(nu_interval_cone(AnalysisMode::PlaneStrain, stationary_gammas(2)[1]), -0.139, 0.089);
    near(nu_interval_cone(AnalysisMode::ThreeD, stationary_gammas(3)[1]), -0.091, 0.034);

    const auto full = nu_interval(AnalysisMode::PlaneStress, 1.0);
    CHECK(full.lo == -1.0);
    CHECK(full.hi == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(nu_interval(AnalysisMode::PlaneStrain, 1.0).lo == -inf);

    SUBCASE("width shrinks as I2 moves away from one")
    {
        for (auto m : all_modes) {
            const double top = nu_interval(m, 1.0).width();
            double prev = top;
            for (int k = 1; k <= 100; ++k) {
                const double i2 = 1.0 - k / 100.0;
                const double w = nu_interval(m, i2).width();
                CHECK(w <= prev + 1e-15);
                prev = w;
            }
            for (int k = 0; k <= 200; ++k)
                CHECK(nu_interval(m, -1.0 + k / 100.0).width() <= top);
        }
    }
}
