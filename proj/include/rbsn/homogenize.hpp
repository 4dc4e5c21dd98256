#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rbsn/geometry.hpp"
#include "rbsn/solver.hpp"
#include "rbsn/theory.hpp"

namespace rbsn {

struct MacroState
{
    Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d eps = Eigen::Matrix2d::Zero();
    double margin = 0.0;   // window inset from the domain boundary
    double v_inner = 0.0;  // window area
    std::size_t contacts = 0;
};

/// Volume-averaged stress sym(sum f (x) (x_b - x_a)) / V over contacts whose
/// centroid lies more than `margin` inside the domain; V is the area of the
/// inset window.
MacroState bagi_stress(const Tessellation& t, const std::vector<ContactState>& states, double margin);

/// Least-squares fit of u = eps x + u0 over the unflagged nodes; returns the
/// symmetric part of eps.
Eigen::Matrix2d strain_from_regression(const Tessellation& t, const DofVector& d, const std::vector<char>& excluded);

/// Plane stress / plane strain (E, nu) from a stress-strain pair with
/// eps12 = 0.
ElasticConstants extract_constants(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& eps, AnalysisMode mode);

struct SweepOptions
{
    double e0 = 1.0;
    AnalysisMode mode = AnalysisMode::PlaneStress;
    double p = 1e-3;
    double q = 0.0;
    double margin = 3.0;  // in units of l_min
    SolveOptions solver;
    int threads = 1;
};

struct SweepRow
{
    double alpha = 0.0;
    double nu_numeric = 0.0;
    double e_numeric = 0.0;
    double nu_predicted = 0.0;
    double e_predicted = 0.0;
    TessellationKind kind = TessellationKind::Voronoi;
    std::uint64_t seed = 0;
    double i1 = 0.0;
    double i2 = 0.0;
    std::string error;  // empty on success
};

/// One row per alpha, in input order. Failing rows carry the error message.
std::vector<SweepRow> alpha_sweep(const Tessellation& t, const std::vector<double>& alphas, const SweepOptions& options);

struct StructureTensors
{
    Tensor4 structure;  // <(1/V) sum A l E0 (N + alpha T)>sym
    Tensor4 analytic;   // from I1, I2 of the same contacts
    double i1 = 0.0;    // weighted by A l, as in the sum
    double i2 = 0.0;

    StructureTensors() : structure(2), analytic(2) {}
};

StructureTensors structure_tensor_check(const std::vector<ContactElement>& elements, const MaterialParams& params,
                                        double volume);

}  // namespace rbsn
