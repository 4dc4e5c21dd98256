#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rbsn/predicates.hpp"

namespace rbsn {

struct DomainBox
{
    Vec2 min{0.0, 0.0};
    Vec2 max{1.0, 1.0};

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    double area() const { return width() * height(); }
    /// Distance from p to the nearest box edge (negative outside).
    double distance_to_boundary(Vec2 p) const;
    bool contains(Vec2 p) const;
    void validate() const;
};

enum class TessellationKind { Voronoi, RandomizedVoronoi, Random, CenteredRandom };

std::string to_string(TessellationKind kind);
TessellationKind tessellation_kind_from_string(const std::string& s);

/// Rigid body of one governing node: counter-clockwise vertex-id loops whose
/// union is the body (a single polygon for Voronoi kinds, triangles for
/// random kinds).
struct Body
{
    std::vector<std::vector<int>> loops;
};

struct ContactElement
{
    int a = 0;
    int b = 0;
    std::array<int, 2> face{};  // end vertices, counter-clockwise around a
    double area = 0.0;          // face length times unit thickness
    double length = 0.0;
    Vec2 normal;   // outward from a
    Vec2 contact;  // (x_b - x_a) / l
    Vec2 centroid;
    double chi = 0.0;  // in (-pi, pi]

    double volume() const { return std::cos(chi) * area * length / 2.0; }
};

struct Tessellation
{
    int dim = 2;
    DomainBox domain;
    std::uint64_t seed = 0;
    TessellationKind kind = TessellationKind::Voronoi;
    double l_min = 1.0;
    std::vector<Vec2> nodes;
    std::vector<Vec2> vertices;
    std::vector<Body> bodies;  // bodies[i] belongs to nodes[i]
    std::vector<ContactElement> contacts;

    double body_area(std::size_t i) const;
    Vec2 body_centroid(std::size_t i) const;
    /// Nodes whose body has a vertex within tol * l_min of the domain boundary.
    std::vector<char> boundary_nodes(double tol = 1e-9) const;
};

/// Signed area of a vertex loop (positive when counter-clockwise).
double loop_area(const std::vector<Vec2>& vertices, const std::vector<int>& loop);

/// Random sequential adsorption: uniform candidates accepted when at least
/// l_min away from every accepted point, stopping after max_trials
/// consecutive rejections.
std::vector<Vec2> place_points(const DomainBox& domain, double l_min, std::uint64_t seed, int max_trials = 10000);

/// Clipped Voronoi tessellation of the points, with contacts extracted.
Tessellation voronoi_tessellate(const std::vector<Vec2>& points, const DomainBox& domain, double l_min);

/// Moves every vertex once in a random direction by a random distance up to
/// `scale` times half the distance to its nearest vertex. Boundary vertices
/// slide along their edge; corners stay fixed.
Tessellation randomize_vertices(const Tessellation& t, std::uint64_t seed, double scale = 1.0);

/// Bodies grown from a Delaunay triangulation of auxiliary vertices around
/// randomly placed governing nodes.
Tessellation random_tessellate(const DomainBox& domain, double l_min, std::uint64_t seed, int max_trials = 10000);

/// Moves every governing node to its body's area centroid.
Tessellation center_nodes(const Tessellation& t);

/// One element per maximal straight run of faces shared by two bodies.
std::vector<ContactElement> extract_contacts(const Tessellation& t);

/// Convenience wrapper dispatching on kind; box is [0, w] x [0, h] in units
/// of l_min.
Tessellation generate(TessellationKind kind, double width, double height, double l_min, std::uint64_t seed,
                      int max_trials = 10000);

struct ChiStatistics
{
    std::vector<double> bin_edges;  // bins + 1 values over [-pi, pi]
    std::vector<double> density;    // per bin, integrates to one
    double i1 = 0.0;
    double i2 = 0.0;
    std::size_t sample_count = 0;
};

ChiStatistics chi_statistics(const std::vector<ContactElement>& elements, int bins = 80);

/// Sum of element volumes cos(chi) A l / 2.
double element_volume_sum(const std::vector<ContactElement>& elements);

/// Sum over boundary faces of (A / 2) n . (c - x_node); closes the element
/// volume sum to the domain area.
double boundary_volume_sum(const Tessellation& t);

/// Sum of all body areas.
double total_body_area(const Tessellation& t);

/// Checks body areas, orientation and pairwise overlap. Returns an empty
/// string when valid, otherwise a diagnostic.
std::string validate_partition(const Tessellation& t, double rel_tol = 1e-9);

}  // namespace rbsn
