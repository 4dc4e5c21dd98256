#include "rbsn/delaunay.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "rbsn/errors.hpp"

namespace rbsn {

namespace {

std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int bits)
{
    std::uint64_t d = 0;
    for (std::uint32_t s = 1u << (bits - 1); s > 0; s >>= 1) {
        const std::uint32_t rx = (x & s) ? 1 : 0;
        const std::uint32_t ry = (y & s) ? 1 : 0;
        d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
        if (ry == 0) {
            if (rx == 1) {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::swap(x, y);
        }
    }
    return d;
}

std::vector<int> hilbert_order(const std::vector<Vec2>& pts)
{
    constexpr int bits = 16;
    double xmin = std::numeric_limits<double>::max(), ymin = xmin;
    double xmax = std::numeric_limits<double>::lowest(), ymax = xmax;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-300});
    const double cells = static_cast<double>((1u << bits) - 1);
    std::vector<std::pair<std::uint64_t, int>> keys(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto qx = static_cast<std::uint32_t>((pts[i].x - xmin) / span * cells);
        const auto qy = static_cast<std::uint32_t>((pts[i].y - ymin) / span * cells);
        keys[i] = {hilbert_index(qx, qy, bits), static_cast<int>(i)};
    }
    std::sort(keys.begin(), keys.end());
    std::vector<int> order(pts.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
        order[i] = keys[i].second;
    return order;
}

}  // namespace

Delaunay::Delaunay(std::vector<Vec2> points) : points_(std::move(points))
{
    for (const auto& p : points_)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw GenerationError("triangulation input contains a non-finite point");

    const auto order = hilbert_order(points_);
    if (order.size() < 3)
        throw GenerationError("triangulation needs at least three points");

    const int i0 = order[0];
    int k1 = -1, k2 = -1;
    for (std::size_t k = 1; k < order.size() && k1 < 0; ++k)
        if (!(points_[order[k]] == points_[i0]))
            k1 = static_cast<int>(k);
    if (k1 >= 0)
        for (std::size_t k = k1 + 1; k < order.size() && k2 < 0; ++k)
            if (orient2d(points_[i0], points_[order[k1]], points_[order[k]]) != 0)
                k2 = static_cast<int>(k);
    if (k2 < 0)
        throw GenerationError("all triangulation points are collinear (" + std::to_string(points_.size())
                              + " points); no 2D tessellation exists");

    int a = i0, b = order[k1], c = order[k2];
    if (orient2d(points_[a], points_[b], points_[c]) < 0)
        std::swap(b, c);

    tris_.push_back({{a, b, c}, {-1, -1, -1}});
    tris_.push_back({{b, a, infinite}, {-1, -1, -1}});
    tris_.push_back({{c, b, infinite}, {-1, -1, -1}});
    tris_.push_back({{a, c, infinite}, {-1, -1, -1}});
    std::map<std::pair<int, int>, std::pair<int, int>> edges;
    for (int t = 0; t < 4; ++t)
        for (int i = 0; i < 3; ++i)
            edges[{tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3]}] = {t, i};
    for (int t = 0; t < 4; ++t)
        for (int i = 0; i < 3; ++i)
            tris_[t].nb[i] = edges.at({tris_[t].v[(i + 2) % 3], tris_[t].v[(i + 1) % 3]}).first;
    alive_.assign(4, 1);
    stamp_.assign(4, 0);

    for (std::size_t k = 0; k < order.size(); ++k) {
        if (static_cast<int>(k) == 0 || static_cast<int>(k) == k1 || static_cast<int>(k) == k2)
            continue;
        insert(order[k]);
    }
    std::sort(duplicates_.begin(), duplicates_.end());
}

bool Delaunay::is_ghost(int t) const
{
    const auto& v = tris_[t].v;
    return v[0] == infinite || v[1] == infinite || v[2] == infinite;
}

bool Delaunay::in_conflict(int t, Vec2 p) const
{
    const auto& v = tris_[t].v;
    if (is_ghost(t)) {
        const int k = v[0] == infinite ? 0 : (v[1] == infinite ? 1 : 2);
        const Vec2 u = points_[v[(k + 1) % 3]], w = points_[v[(k + 2) % 3]];
        const int o = orient2d(u, w, p);
        if (o != 0)
            return o > 0;
        return dot(p - u, w - u) > 0 && dot(p - w, u - w) > 0;
    }
    return incircle(points_[v[0]], points_[v[1]], points_[v[2]], p) > 0;
}

int Delaunay::locate(Vec2 p, int t) const
{
    if (is_ghost(t)) {
        const auto& v = tris_[t].v;
        t = tris_[t].nb[v[0] == infinite ? 0 : (v[1] == infinite ? 1 : 2)];
    }
    const std::size_t limit = 4 * tris_.size() + 16;
    for (std::size_t step = 0; step < limit; ++step) {
        if (is_ghost(t))
            return t;
        const auto& tri = tris_[t];
        bool moved = false;
        for (int k = 0; k < 3; ++k) {
            const int i = static_cast<int>((k + step) % 3);
            if (orient2d(points_[tri.v[(i + 1) % 3]], points_[tri.v[(i + 2) % 3]], p) < 0) {
                t = tri.nb[i];
                moved = true;
                break;
            }
        }
        if (!moved)
            return t;
    }
    throw GenerationError("point location did not terminate");
}

void Delaunay::insert(int pi)
{
    const Vec2 p = points_[pi];
    const int start = locate(p, last_);
    if (!is_ghost(start))
        for (int v : tris_[start].v)
            if (points_[v] == p) {
                duplicates_.push_back(pi);
                return;
            }

    ++epoch_;
    std::vector<int> cavity{start};
    stamp_[start] = epoch_;
    struct Rim
    {
        int a, b, outside;
    };
    std::vector<Rim> rim;
    for (std::size_t q = 0; q < cavity.size(); ++q) {
        const int t = cavity[q];
        for (int i = 0; i < 3; ++i) {
            const int n = tris_[t].nb[i];
            if (stamp_[n] == epoch_)
                continue;
            if (in_conflict(n, p)) {
                stamp_[n] = epoch_;
                cavity.push_back(n);
            } else {
                rim.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], n});
            }
        }
    }

    for (int t : cavity) {
        alive_[t] = 0;
        free_.push_back(t);
    }

    std::unordered_map<int, int> by_a, by_b;
    std::vector<int> created;
    created.reserve(rim.size());
    for (const auto& r : rim) {
        int id;
        if (!free_.empty()) {
            id = free_.back();
            free_.pop_back();
        } else {
            id = static_cast<int>(tris_.size());
            tris_.push_back({});
            alive_.push_back(0);
            stamp_.push_back(0);
        }
        tris_[id] = {{r.a, r.b, pi}, {-1, -1, r.outside}};
        alive_[id] = 1;
        stamp_[id] = 0;
        auto& out = tris_[r.outside];
        for (int j = 0; j < 3; ++j) {
            const int x = out.v[(j + 1) % 3], y = out.v[(j + 2) % 3];
            if (x == r.b && y == r.a) {
                out.nb[j] = id;
                break;
            }
        }
        by_a[r.a] = id;
        by_b[r.b] = id;
        created.push_back(id);
    }
    for (int id : created) {
        auto& t = tris_[id];
        t.nb[0] = by_a.at(t.v[1]);
        t.nb[1] = by_b.at(t.v[0]);
        if (!is_ghost(id))
            last_ = id;
    }
}

std::vector<std::array<int, 3>> Delaunay::triangles() const
{
    std::vector<std::array<int, 3>> out;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        if (!alive_[t] || is_ghost(static_cast<int>(t)))
            continue;
        auto v = tris_[t].v;
        std::rotate(v.begin(), std::min_element(v.begin(), v.end()), v.end());
        out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<int>> Delaunay::neighbours() const
{
    std::vector<std::vector<int>> nb(points_.size());
    for (std::size_t t = 0; t < tris_.size(); ++t) {
        if (!alive_[t])
            continue;
        const auto& v = tris_[t].v;
        for (int i = 0; i < 3; ++i) {
            const int a = v[i], b = v[(i + 1) % 3];
            if (a != infinite && b != infinite) {
                nb[a].push_back(b);
                nb[b].push_back(a);
            }
        }
    }
    for (auto& list : nb) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return nb;
}

}  // namespace rbsn
