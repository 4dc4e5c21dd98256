#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rbsn/tensor.hpp"

namespace rbsn {

enum class AnalysisMode { PlaneStress, PlaneStrain, ThreeD };

int dimension_of(AnalysisMode mode);
std::string to_string(AnalysisMode mode);
AnalysisMode analysis_mode_from_string(const std::string& s);

/// Contact constitutive parameters: normal stiffness E0 and the
/// tangential/normal stiffness ratio alpha.
struct MaterialParams
{
    double e0 = 1.0;
    double alpha = 0.0;

    void validate() const;
};

/// Macroscopic isotropic constants. E may be +inf for alpha -> inf.
struct ElasticConstants
{
    double e = 0.0;
    double nu = 0.0;
    AnalysisMode mode = AnalysisMode::PlaneStress;
};

// ---------------------------------------------------------------------------
// Orientation distributions of the angle between contact normal and contact
// vector.

struct ConeDistribution
{
    double gamma = 0.0;
};

/// Density samples on a uniform grid over [-pi, pi] (2D) or [0, pi] (3D).
/// The table is normalized on construction.
struct TabulatedDistribution
{
    std::vector<double> chi;
    std::vector<double> density;
};

struct DiracParallel
{};
struct DiracPerpendicular
{};

class OrientationDistribution
{
public:
    using Variant = std::variant<ConeDistribution, TabulatedDistribution, DiracParallel, DiracPerpendicular>;

    static OrientationDistribution cone(double gamma, int dim);
    static OrientationDistribution tabulated(std::vector<double> density, int dim);
    static OrientationDistribution parallel(int dim);
    static OrientationDistribution perpendicular(int dim);

    int dim() const { return dim_; }
    const Variant& variant() const { return variant_; }

    /// Inverse-CDF sample of the angle from u in [0, 1). For the 2D
    /// perpendicular case the sign is taken from the high half of u.
    double sample_chi(double u) const;

    /// Density value at chi (zero outside the support).
    double density(double chi) const;
    std::pair<double, double> support() const;

private:
    OrientationDistribution(Variant v, int dim);

    Variant variant_;
    int dim_;
    std::vector<double> cdf_;  // tabulated only
};

/// E[cos chi], E[cos 2 chi]
struct ChiMoments
{
    double i1 = 1.0;
    double i2 = 1.0;
};

/// Exact moments where a closed form exists (cone, Dirac), composite
/// Simpson on the table grid otherwise.
ChiMoments chi_moments(const OrientationDistribution& dist);

/// Composite Simpson over the support with `intervals` panels (made even).
ChiMoments chi_moments_quadrature(const OrientationDistribution& dist, int intervals = 20000);

// ---------------------------------------------------------------------------
// Kinematic tensors.

Tensor2 rotation_2d(double chi);
/// rho_z(xi) rho_y(zeta) rho_z(theta) rho_y(chi) rho_y(zeta)^T rho_z(xi)^T
Tensor2 rotation_3d(double xi, double zeta, double theta, double chi);

/// Normal direction from the angles xi (and zeta in 3D).
Vector normal_from_angles(int dim, double xi, double zeta = 0.0);

/// Third-order tensor 3 n . (Ivol)^T13 - n x n x n mapping strain to the
/// tangential strain of a facet.
Tensor3 tangential_projector(const Vector& n);

struct ScriptTensors
{
    Tensor4 normal;
    Tensor4 tangential;
};

/// Per-contact tensors N = (rho . nu x nu . rho^T)^T12 and
/// T = rho . T^T13 . T . rho^T with nu = n x n.
ScriptTensors script_tensors(const Vector& n, const Tensor2& rho);

/// Symmetrized orientation expectations entering the mesoscale tensor.
struct Expectations
{
    double volume = 1.0;  // E[rho : nu]
    Tensor4 normal_sym;
    Tensor4 tangential_sym;

    explicit Expectations(int dim = 2) : normal_sym(dim), tangential_sym(dim) {}
};

struct OracleEstimate
{
    Expectations mean;
    double volume_se = 0.0;
    Tensor4 normal_se;
    Tensor4 tangential_se;
    std::int64_t samples = 0;

    explicit OracleEstimate(int dim = 2) : mean(dim), normal_se(dim), tangential_se(dim) {}
};

/// Monte-Carlo estimate of the expectations. Samples are split into a fixed
/// number of seed-derived chunks so results do not depend on `threads`.
OracleEstimate expectation_oracle(const OrientationDistribution& dist, std::int64_t samples, std::uint64_t seed,
                                  int threads = 1);

/// Agreement of the closed forms with the oracle for one cone angle.
struct ExpectationCheck
{
    double gamma = 0.0;
    double max_z = 0.0;     // largest |oracle - closed| / standard error over tensor entries
    double volume_diff = 0.0;
    bool pass = false;
};

/// Entries with zero standard error must agree to 1e-12.
ExpectationCheck check_expectations(double gamma, int dim, std::int64_t samples, std::uint64_t seed,
                                    double max_sigma = 3.0, double volume_tol = 5e-3, int threads = 1);

/// Closed-form expectations for the uniform cone distribution.
Expectations closed_expectations(double gamma, int dim);

/// Closed-form expectations for an arbitrary distribution given its moments.
Expectations general_expectations(const ChiMoments& moments, int dim);

/// D = (N_dim E0 / E[rho:nu]) (<E[N]>sym + alpha <E[T]>sym)
Tensor4 elastic_tensor_meso(const MaterialParams& params, const Expectations& ex);

/// Isotropic tensor from (E, nu) for the given analysis mode.
Tensor4 macro_tensor(const ElasticConstants& ec);

/// Inverse of macro_tensor via the I / Ivol coefficients of D.
ElasticConstants constants_from_tensor(const Tensor4& d, AnalysisMode mode);

ElasticConstants predict_cone(double alpha, double gamma, AnalysisMode mode, double e0 = 1.0);
ElasticConstants predict_limit(double alpha, AnalysisMode mode, double e0 = 1.0);
ElasticConstants predict_general(double alpha, double i1, double i2, AnalysisMode mode, double e0 = 1.0);

/// I1 and I2 of the uniform cone distribution (closed form).
ChiMoments cone_moments(double gamma, int dim);

/// Stationary points of nu with respect to the cone angle.
std::vector<double> stationary_gammas(int dim);

struct NuInterval
{
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

/// Range of nu over alpha in [0, inf) for a given I2 (alpha -> inf taken as
/// the limit of the rational expression).
NuInterval nu_interval(AnalysisMode mode, double i2);
NuInterval nu_interval_cone(AnalysisMode mode, double gamma);

}  // namespace rbsn
