#pragma once

#include <array>
#include <vector>

#include "rbsn/predicates.hpp"

namespace rbsn {

/// 2D Delaunay triangulation built incrementally (Bowyer-Watson) with exact
/// predicates. Duplicate input points are skipped.
class Delaunay
{
public:
    static constexpr int infinite = -1;

    struct Triangle
    {
        std::array<int, 3> v;   // counter-clockwise; one entry may be `infinite`
        std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]
    };

    /// Throws GenerationError if fewer than three non-collinear points exist.
    explicit Delaunay(std::vector<Vec2> points);

    const std::vector<Vec2>& points() const { return points_; }

    /// Finite triangles in a deterministic order, vertices counter-clockwise.
    std::vector<std::array<int, 3>> triangles() const;

    /// Sorted, unique Delaunay neighbours of every input point.
    std::vector<std::vector<int>> neighbours() const;

    /// Input indices dropped because they duplicated an earlier point.
    const std::vector<int>& duplicates() const { return duplicates_; }

private:
    bool is_ghost(int t) const;
    bool in_conflict(int t, Vec2 p) const;
    int locate(Vec2 p, int start) const;
    void insert(int pi);

    std::vector<Vec2> points_;
    std::vector<Triangle> tris_;
    std::vector<char> alive_;
    std::vector<int> free_;
    std::vector<int> duplicates_;
    std::vector<unsigned> stamp_;
    unsigned epoch_ = 0;
    int last_ = 0;
};

}  // namespace rbsn
