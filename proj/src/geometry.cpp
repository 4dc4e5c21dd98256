#include "rbsn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "rbsn/delaunay.hpp"
#include "rbsn/errors.hpp"
#include "rbsn/log.hpp"

namespace rbsn {

namespace {

constexpr double pi = std::numbers::pi;

enum Stream : std::uint32_t { points_stream = 0, basic_stream = 1, vertex_stream = 2, randomize_stream = 3 };

std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    return std::mt19937_64(seq);
}

/// Uniform grid over a box for fixed-radius neighbour queries.
class PointGrid
{
public:
    PointGrid(const DomainBox& box, double cell) : box_(box), cell_(cell)
    {
        nx_ = std::max(1, static_cast<int>(std::ceil(box.width() / cell)));
        ny_ = std::max(1, static_cast<int>(std::ceil(box.height() / cell)));
        cells_.resize(static_cast<std::size_t>(nx_) * ny_);
    }

    void add(Vec2 p, int id) { cells_[index(p)].push_back({p, id}); }

    /// True if any stored point lies closer than r to p.
    bool any_within(Vec2 p, double r) const
    {
        bool found = false;
        visit(p, r, [&](Vec2 q, int) {
            const double dx = q.x - p.x, dy = q.y - p.y;
            if (dx * dx + dy * dy < r * r)
                found = true;
        });
        return found;
    }

    template <typename F>
    void visit(Vec2 p, double r, F&& f) const
    {
        const int span = static_cast<int>(std::ceil(r / cell_));
        const auto [cx, cy] = coords(p);
        for (int j = std::max(0, cy - span); j <= std::min(ny_ - 1, cy + span); ++j)
            for (int i = std::max(0, cx - span); i <= std::min(nx_ - 1, cx + span); ++i)
                for (const auto& e : cells_[static_cast<std::size_t>(j) * nx_ + i])
                    f(e.first, e.second);
    }

private:
    std::pair<int, int> coords(Vec2 p) const
    {
        const int i = std::clamp(static_cast<int>((p.x - box_.min.x) / cell_), 0, nx_ - 1);
        const int j = std::clamp(static_cast<int>((p.y - box_.min.y) / cell_), 0, ny_ - 1);
        return {i, j};
    }
    std::size_t index(Vec2 p) const
    {
        const auto [i, j] = coords(p);
        return static_cast<std::size_t>(j) * nx_ + i;
    }

    DomainBox box_;
    double cell_;
    int nx_, ny_;
    std::vector<std::vector<std::pair<Vec2, int>>> cells_;
};

/// Sequential adsorption into `pts`, respecting points already present.
void adsorb(const DomainBox& box, double r, int max_trials, std::mt19937_64& rng, std::vector<Vec2>& pts)
{
    PointGrid grid(box, r);
    for (std::size_t i = 0; i < pts.size(); ++i)
        grid.add(pts[i], static_cast<int>(i));
    std::uniform_real_distribution<double> ux(box.min.x, box.max.x), uy(box.min.y, box.max.y);
    int rejected = 0;
    while (rejected < max_trials) {
        const Vec2 c{ux(rng), uy(rng)};
        if (grid.any_within(c, r)) {
            ++rejected;
            continue;
        }
        rejected = 0;
        grid.add(c, static_cast<int>(pts.size()));
        pts.push_back(c);
    }
}

/// Same process restricted to the segment [a, b], both ends pre-placed.
std::vector<Vec2> adsorb_segment(Vec2 a, Vec2 b, double r, int max_trials, std::mt19937_64& rng)
{
    const double len = norm(b - a);
    std::vector<double> s{0.0, len};
    std::uniform_real_distribution<double> us(0.0, len);
    int rejected = 0;
    while (rejected < max_trials) {
        const double c = us(rng);
        auto it = std::lower_bound(s.begin(), s.end(), c);
        const bool close = (it != s.end() && *it - c < r) || (it != s.begin() && c - *(it - 1) < r);
        if (close) {
            ++rejected;
            continue;
        }
        rejected = 0;
        s.insert(it, c);
    }
    std::vector<Vec2> out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i)
        out.push_back(a + (b - a) * (s[i] / len));
    return out;
}

std::vector<Vec2> clip(const std::vector<Vec2>& poly, Vec2 m, Vec2 d)
{
    std::vector<Vec2> out;
    out.reserve(poly.size() + 1);
    const double off = dot(m, d);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
        const double fp = dot(p, d) - off, fq = dot(q, d) - off;
        if (fp <= 0)
            out.push_back(p);
        if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0))
            out.push_back(p + (q - p) * (fp / (fp - fq)));
    }
    return out;
}

struct UnionFind
{
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x)
    {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }
};

bool on_segment(Vec2 a, Vec2 b, Vec2 p)
{
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y
           && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    const int o1 = orient2d(a, b, c), o2 = orient2d(a, b, d), o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
    if (o1 * o2 < 0 && o3 * o4 < 0)
        return true;
    return (o1 == 0 && on_segment(a, b, c)) || (o2 == 0 && on_segment(a, b, d)) || (o3 == 0 && on_segment(c, d, a))
           || (o4 == 0 && on_segment(c, d, b));
}

bool properly_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
{
    return orient2d(a, b, c) * orient2d(a, b, d) < 0 && orient2d(c, d, a) * orient2d(c, d, b) < 0;
}

bool simple_ccw(const std::vector<Vec2>& p)
{
    const std::size_t n = p.size();
    double area = 0;
    for (std::size_t i = 0; i < n; ++i)
        area += cross(p[i], p[(i + 1) % n]);
    if (!(area > 0))
        return false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1))
                continue;
            if (segments_intersect(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]))
                return false;
        }
    return true;
}

/// Strict point-in-polygon by winding number; boundary points count as outside.
bool strictly_inside(const std::vector<Vec2>& poly, Vec2 q)
{
    int winding = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
        const int o = orient2d(a, b, q);
        if (o == 0 && on_segment(a, b, q))
            return false;
        if (a.y <= q.y) {
            if (b.y > q.y && o > 0)
                ++winding;
        } else if (b.y <= q.y && o < 0) {
            --winding;
        }
    }
    return winding != 0;
}

std::vector<Vec2> loop_points(const std::vector<Vec2>& vertices, const std::vector<int>& loop)
{
    std::vector<Vec2> p;
    p.reserve(loop.size());
    for (int v : loop)
        p.push_back(vertices[v]);
    return p;
}

double nearest_distance(const PointGrid& grid, Vec2 p, int self, double start)
{
    for (double r = start;; r *= 2) {
        double best = std::numeric_limits<double>::infinity();
        grid.visit(p, r, [&](Vec2 q, int id) {
            if (id != self)
                best = std::min(best, norm(q - p));
        });
        if (best <= r)
            return best;
        if (r > 1e12)
            return best;
    }
}

void require_lmin(double l_min)
{
    if (!(l_min > 0.0) || !std::isfinite(l_min))
        throw std::invalid_argument("l_min must be positive");
}

}  // namespace

// ---------------------------------------------------------------------------

double DomainBox::distance_to_boundary(Vec2 p) const
{
    return std::min({p.x - min.x, max.x - p.x, p.y - min.y, max.y - p.y});
}

bool DomainBox::contains(Vec2 p) const
{
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
}

void DomainBox::validate() const
{
    if (!(max.x > min.x) || !(max.y > min.y) || !std::isfinite(area()))
        throw std::invalid_argument("domain box must have positive finite extent");
}

std::string to_string(TessellationKind kind)
{
    switch (kind) {
    case TessellationKind::Voronoi: return "voronoi";
    case TessellationKind::RandomizedVoronoi: return "rand-voronoi";
    case TessellationKind::Random: return "random";
    case TessellationKind::CenteredRandom: return "centered";
    }
    return "?";
}

TessellationKind tessellation_kind_from_string(const std::string& s)
{
    if (s == "voronoi")
        return TessellationKind::Voronoi;
    if (s == "rand-voronoi")
        return TessellationKind::RandomizedVoronoi;
    if (s == "random")
        return TessellationKind::Random;
    if (s == "centered")
        return TessellationKind::CenteredRandom;
    throw std::invalid_argument("unknown tessellation kind '" + s + "' (expected voronoi, rand-voronoi, random or centered)");
}

double loop_area(const std::vector<Vec2>& vertices, const std::vector<int>& loop)
{
    double a = 0;
    for (std::size_t i = 0; i < loop.size(); ++i)
        a += cross(vertices[loop[i]], vertices[loop[(i + 1) % loop.size()]]);
    return 0.5 * a;
}

double Tessellation::body_area(std::size_t i) const
{
    double a = 0;
    for (const auto& loop : bodies.at(i).loops)
        a += loop_area(vertices, loop);
    return a;
}

Vec2 Tessellation::body_centroid(std::size_t i) const
{
    // Centroids taken relative to the first vertex to limit cancellation.
    const Vec2 o = vertices[bodies.at(i).loops.front().front()];
    double a = 0;
    Vec2 m;
    for (const auto& loop : bodies[i].loops)
        for (std::size_t k = 0; k < loop.size(); ++k) {
            const Vec2 p = vertices[loop[k]] - o, q = vertices[loop[(k + 1) % loop.size()]] - o;
            const double c = cross(p, q);
            a += c;
            m += (p + q) * c;
        }
    return o + m / (3.0 * a);
}

std::vector<char> Tessellation::boundary_nodes(double tol) const
{
    std::vector<char> flag(bodies.size(), 0);
    const double eps = tol * l_min;
    for (std::size_t i = 0; i < bodies.size(); ++i)
        for (const auto& loop : bodies[i].loops)
            for (int v : loop)
                if (domain.distance_to_boundary(vertices[v]) <= eps)
                    flag[i] = 1;
    return flag;
}

std::vector<Vec2> place_points(const DomainBox& domain, double l_min, std::uint64_t seed, int max_trials)
{
    domain.validate();
    require_lmin(l_min);
    if (max_trials < 1)
        throw std::invalid_argument("max_trials must be at least 1");
    auto rng = make_rng(seed, points_stream);
    std::vector<Vec2> pts;
    adsorb(domain, l_min, max_trials, rng, pts);
    return pts;
}

// ---------------------------------------------------------------------------

Tessellation voronoi_tessellate(const std::vector<Vec2>& points, const DomainBox& domain, double l_min)
{
    domain.validate();
    require_lmin(l_min);
    if (points.size() < 3)
        throw GenerationError("Voronoi tessellation needs at least 3 points, got " + std::to_string(points.size()));
    for (const auto& p : points)
        if (!domain.contains(p))
            throw std::invalid_argument("Voronoi nucleus outside the domain box");
    bool collinear = true;
    for (std::size_t i = 2; i < points.size() && collinear; ++i)
        collinear = orient2d(points[0], points[1], points[i]) == 0;
    if (collinear)
        throw GenerationError("Voronoi nuclei are all collinear; cells would be unbounded strips");

    const std::size_t n = points.size();
    std::vector<Vec2> ext(points);
    ext.reserve(5 * n);
    for (const auto& p : points) {
        ext.push_back({2 * domain.min.x - p.x, p.y});
        ext.push_back({2 * domain.max.x - p.x, p.y});
        ext.push_back({p.x, 2 * domain.min.y - p.y});
        ext.push_back({p.x, 2 * domain.max.y - p.y});
    }
    const Delaunay dt(ext);
    for (int d : dt.duplicates())
        if (d < static_cast<int>(n))
            throw GenerationError("duplicate Voronoi nucleus at index " + std::to_string(d));
    const auto nb = dt.neighbours();

    const std::vector<Vec2> box{domain.min, {domain.max.x, domain.min.y}, domain.max, {domain.min.x, domain.max.y}};
    std::vector<std::vector<Vec2>> cells(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto poly = box;
        for (int j : nb[i]) {
            const Vec2 d = ext[j] - points[i];
            poly = clip(poly, (ext[j] + points[i]) * 0.5, d);
            if (poly.empty())
                break;
        }
        if (poly.size() < 3)
            throw GenerationError("Voronoi cell " + std::to_string(i) + " collapsed during clipping");
        cells[i] = std::move(poly);
    }

    // Weld vertices computed independently by neighbouring cells.
    const double tol = 1e-9 * l_min;
    std::vector<Vec2> raw;
    for (const auto& c : cells)
        raw.insert(raw.end(), c.begin(), c.end());
    DomainBox grown{domain.min - Vec2{tol, tol}, domain.max + Vec2{tol, tol}};
    PointGrid grid(grown, 0.5 * l_min);
    UnionFind uf(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
        grid.visit(raw[k], tol, [&](Vec2 q, int id) {
            if (norm(q - raw[k]) <= tol)
                uf.unite(static_cast<int>(k), id);
        });
        grid.add(raw[k], static_cast<int>(k));
    }

    Tessellation t;
    t.domain = domain;
    t.kind = TessellationKind::Voronoi;
    t.l_min = l_min;
    t.nodes = points;
    t.bodies.resize(n);
    std::vector<int> remap(raw.size(), -1);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> loop;
        for (std::size_t j = 0; j < cells[i].size(); ++j, ++k) {
            const int root = uf.find(static_cast<int>(k));
            if (remap[root] < 0) {
                Vec2 p = raw[root];
                if (std::fabs(p.x - domain.min.x) <= tol) p.x = domain.min.x;
                if (std::fabs(p.x - domain.max.x) <= tol) p.x = domain.max.x;
                if (std::fabs(p.y - domain.min.y) <= tol) p.y = domain.min.y;
                if (std::fabs(p.y - domain.max.y) <= tol) p.y = domain.max.y;
                remap[root] = static_cast<int>(t.vertices.size());
                t.vertices.push_back(p);
            }
            const int v = remap[root];
            if (loop.empty() || loop.back() != v)
                loop.push_back(v);
        }
        while (loop.size() > 1 && loop.front() == loop.back())
            loop.pop_back();
        if (loop.size() < 3)
            throw GenerationError("Voronoi cell " + std::to_string(i) + " degenerated after vertex welding");
        t.bodies[i].loops.push_back(std::move(loop));
    }
    t.contacts = extract_contacts(t);
    return t;
}

Tessellation randomize_vertices(const Tessellation& in, std::uint64_t seed, double scale)
{
    if (in.kind != TessellationKind::Voronoi)
        throw std::invalid_argument("vertex randomization requires a Voronoi tessellation");
    if (!(scale >= 0.0))
        throw std::invalid_argument("randomization scale must be non-negative");

    Tessellation t = in;
    t.kind = TessellationKind::RandomizedVoronoi;
    t.seed = seed;
    const auto& orig = in.vertices;
    const std::size_t m = orig.size();

    PointGrid grid(in.domain, in.l_min);
    for (std::size_t v = 0; v < m; ++v)
        grid.add(orig[v], static_cast<int>(v));
    std::vector<double> reach(m);
    for (std::size_t v = 0; v < m; ++v)
        reach[v] = 0.5 * nearest_distance(grid, orig[v], static_cast<int>(v), in.l_min);

    std::vector<std::vector<std::pair<int, int>>> incident(m);
    for (std::size_t b = 0; b < t.bodies.size(); ++b)
        for (std::size_t l = 0; l < t.bodies[b].loops.size(); ++l)
            for (int v : t.bodies[b].loops[l])
                incident[v].push_back({static_cast<int>(b), static_cast<int>(l)});

    constexpr int max_redraws = 100;
    auto rng = make_rng(seed, randomize_stream);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto& box = in.domain;
    std::size_t kept = 0;
    for (std::size_t v = 0; v < m; ++v) {
        const Vec2 p = orig[v];
        const bool on_x = p.x == box.min.x || p.x == box.max.x;
        const bool on_y = p.y == box.min.y || p.y == box.max.y;
        if (on_x && on_y)
            continue;
        bool accepted = false;
        for (int attempt = 0; attempt < max_redraws && !accepted; ++attempt) {
            const double r = reach[v] * scale * unit(rng);
            const double theta = 2 * pi * unit(rng);
            Vec2 q = p;
            if (on_x)
                q.y += r * std::sin(theta);
            else if (on_y)
                q.x += r * std::cos(theta);
            else
                q += Vec2{r * std::cos(theta), r * std::sin(theta)};
            t.vertices[v] = q;
            accepted = std::all_of(incident[v].begin(), incident[v].end(), [&](const std::pair<int, int>& bl) {
                return simple_ccw(loop_points(t.vertices, t.bodies[bl.first].loops[bl.second]));
            });
        }
        if (!accepted) {
            t.vertices[v] = p;
            ++kept;
        }
    }
    if (kept > 0)
        warn(std::to_string(kept) + " vertices kept in place after " + std::to_string(max_redraws)
             + " invalid randomization draws");
    t.contacts = extract_contacts(t);
    return t;
}

Tessellation random_tessellate(const DomainBox& domain, double l_min, std::uint64_t seed, int max_trials)
{
    domain.validate();
    require_lmin(l_min);
    if (max_trials < 1)
        throw std::invalid_argument("max_trials must be at least 1");

    auto node_rng = make_rng(seed, basic_stream);
    std::vector<Vec2> basic;
    adsorb(domain, l_min, max_trials, node_rng, basic);

    const double h = 0.5 * l_min;
    auto vrng = make_rng(seed, vertex_stream);
    const Vec2 c0 = domain.min, c1{domain.max.x, domain.min.y}, c2 = domain.max, c3{domain.min.x, domain.max.y};
    std::vector<Vec2> verts{c0, c1, c2, c3};
    for (const auto& [a, b] : {std::pair{c0, c1}, std::pair{c1, c2}, std::pair{c2, c3}, std::pair{c3, c0}}) {
        auto side = adsorb_segment(a, b, h, max_trials, vrng);
        verts.insert(verts.end(), side.begin(), side.end());
    }
    adsorb(domain, h, max_trials, vrng, verts);

    const Delaunay dt(verts);
    const auto tris = dt.triangles();
    const std::size_t nt = tris.size();

    std::vector<std::array<int, 3>> adj(nt, {-1, -1, -1});
    {
        std::unordered_map<std::uint64_t, int> edge;
        edge.reserve(3 * nt);
        auto key = [](int a, int b) { return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b); };
        for (std::size_t t = 0; t < nt; ++t)
            for (int i = 0; i < 3; ++i)
                edge[key(tris[t][i], tris[t][(i + 1) % 3])] = static_cast<int>(t);
        for (std::size_t t = 0; t < nt; ++t)
            for (int i = 0; i < 3; ++i) {
                auto it = edge.find(key(tris[t][(i + 1) % 3], tris[t][i]));
                if (it != edge.end())
                    adj[t][i] = it->second;
            }
    }

    std::vector<int> owner(nt, -1);
    {
        PointGrid tgrid(domain, l_min);
        std::vector<double> radius(nt);
        for (std::size_t t = 0; t < nt; ++t) {
            const Vec2 c = (verts[tris[t][0]] + verts[tris[t][1]] + verts[tris[t][2]]) / 3.0;
            double r = 0;
            for (int v : tris[t])
                r = std::max(r, norm(verts[v] - c));
            radius[t] = r;
            tgrid.add(c, static_cast<int>(t));
        }
        const double rmax = *std::max_element(radius.begin(), radius.end());
        for (std::size_t nidx = 0; nidx < basic.size(); ++nidx) {
            const Vec2 p = basic[nidx];
            int best = -1;
            tgrid.visit(p, rmax, [&](Vec2, int t) {
                if (best >= 0 && t > best)
                    return;
                const auto& tr = tris[t];
                if (orient2d(verts[tr[0]], verts[tr[1]], p) >= 0 && orient2d(verts[tr[1]], verts[tr[2]], p) >= 0
                    && orient2d(verts[tr[2]], verts[tr[0]], p) >= 0)
                    best = t;
            });
            if (best < 0)
                throw GenerationError("governing node " + std::to_string(nidx) + " not covered by the triangulation");
            if (owner[best] < 0)
                owner[best] = static_cast<int>(nidx);
        }
    }

    // Jacobi sweeps: a triangle joins the lowest-id neighbour that was
    // already assigned before the sweep started.
    for (bool changed = true; changed;) {
        changed = false;
        const auto before = owner;
        for (std::size_t t = 0; t < nt; ++t) {
            if (before[t] >= 0)
                continue;
            int pick = -1;
            for (int n : adj[t])
                if (n >= 0 && before[n] >= 0 && (pick < 0 || n < pick))
                    pick = n;
            if (pick >= 0) {
                owner[t] = before[pick];
                changed = true;
            }
        }
    }
    std::size_t islands = 0;
    for (std::size_t t = 0; t < nt; ++t) {
        if (owner[t] >= 0)
            continue;
        const Vec2 c = (verts[tris[t][0]] + verts[tris[t][1]] + verts[tris[t][2]]) / 3.0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t nidx = 0; nidx < basic.size(); ++nidx)
            if (const double d = norm(basic[nidx] - c); d < best) {
                best = d;
                owner[t] = static_cast<int>(nidx);
            }
        ++islands;
    }
    if (islands > 0)
        warn(std::to_string(islands) + " isolated triangles assigned to the nearest governing node");

    std::vector<std::vector<int>> owned(basic.size());
    for (std::size_t t = 0; t < nt; ++t)
        owned[owner[t]].push_back(static_cast<int>(t));

    Tessellation out;
    out.domain = domain;
    out.seed = seed;
    out.kind = TessellationKind::Random;
    out.l_min = l_min;
    out.vertices = verts;
    std::size_t dropped = 0;
    for (std::size_t nidx = 0; nidx < basic.size(); ++nidx) {
        if (owned[nidx].empty()) {
            ++dropped;
            continue;
        }
        out.nodes.push_back(basic[nidx]);
        Body b;
        for (int t : owned[nidx])
            b.loops.push_back({tris[t][0], tris[t][1], tris[t][2]});
        out.bodies.push_back(std::move(b));
    }
    if (dropped > 0)
        warn(std::to_string(dropped) + " governing nodes received no triangle and were dropped");
    out.contacts = extract_contacts(out);
    return out;
}

Tessellation center_nodes(const Tessellation& in)
{
    if (in.kind != TessellationKind::Random)
        throw std::invalid_argument("node centering requires a Random tessellation");
    Tessellation t = in;
    t.kind = TessellationKind::CenteredRandom;
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        t.nodes[i] = t.body_centroid(i);
    t.contacts = extract_contacts(t);
    return t;
}

Tessellation generate(TessellationKind kind, double width, double height, double l_min, std::uint64_t seed,
                      int max_trials)
{
    const DomainBox box{{0.0, 0.0}, {width * l_min, height * l_min}};
    Tessellation t;
    switch (kind) {
    case TessellationKind::Voronoi:
    case TessellationKind::RandomizedVoronoi:
        t = voronoi_tessellate(place_points(box, l_min, seed, max_trials), box, l_min);
        t.seed = seed;
        if (kind == TessellationKind::RandomizedVoronoi)
            t = randomize_vertices(t, seed);
        break;
    case TessellationKind::Random:
    case TessellationKind::CenteredRandom:
        t = random_tessellate(box, l_min, seed, max_trials);
        if (kind == TessellationKind::CenteredRandom)
            t = center_nodes(t);
        break;
    }
    return t;
}

// ---------------------------------------------------------------------------

namespace {

struct HalfEdge
{
    int body;
    int from;
    int to;
};

/// Undirected edge -> half-edges of all loops using it.
std::map<std::pair<int, int>, std::vector<HalfEdge>> half_edges(const Tessellation& t)
{
    std::map<std::pair<int, int>, std::vector<HalfEdge>> edges;
    for (std::size_t b = 0; b < t.bodies.size(); ++b)
        for (const auto& loop : t.bodies[b].loops)
            for (std::size_t k = 0; k < loop.size(); ++k) {
                const int u = loop[k], w = loop[(k + 1) % loop.size()];
                edges[{std::min(u, w), std::max(u, w)}].push_back({static_cast<int>(b), u, w});
            }
    return edges;
}

}  // namespace

std::vector<ContactElement> extract_contacts(const Tessellation& t)
{
    const double tiny = 1e-12 * t.l_min;
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> shared;
    std::size_t dropped = 0;
    for (const auto& [key, list] : half_edges(t)) {
        int a = -1, b = -1;
        for (const auto& h : list) {
            if (a < 0 || h.body == a)
                a = h.body;
            else if (b < 0 || h.body == b)
                b = h.body;
            else
                throw GenerationError("edge shared by more than two bodies");
        }
        if (b < 0)
            continue;
        if (norm(t.vertices[key.second] - t.vertices[key.first]) < tiny) {
            ++dropped;
            continue;
        }
        const int lo = std::min(a, b), hi = std::max(a, b);
        for (const auto& h : list)
            if (h.body == lo) {
                shared[{lo, hi}].push_back({h.from, h.to});
                break;
            }
    }
    if (dropped > 0)
        warn(std::to_string(dropped) + " zero-length shared edges dropped");

    std::vector<ContactElement> out;
    for (auto& [pair, edges] : shared) {
        std::sort(edges.begin(), edges.end());
        std::multimap<int, std::size_t> from;
        for (std::size_t e = 0; e < edges.size(); ++e)
            from.insert({edges[e].first, e});
        std::map<int, int> incoming;
        for (const auto& e : edges)
            ++incoming[e.second];
        std::vector<char> used(edges.size(), 0);

        auto next_of = [&](int v) -> std::ptrdiff_t {
            auto [lo, hi] = from.equal_range(v);
            for (auto it = lo; it != hi; ++it)
                if (!used[it->second])
                    return static_cast<std::ptrdiff_t>(it->second);
            return -1;
        };
        auto emit = [&](int first, int last) {
            const Vec2 p0 = t.vertices[first], p1 = t.vertices[last];
            const Vec2 xa = t.nodes[pair.first], xb = t.nodes[pair.second];
            ContactElement c;
            c.a = pair.first;
            c.b = pair.second;
            c.face = {first, last};
            c.area = norm(p1 - p0);
            const Vec2 d = (p1 - p0) / c.area;
            c.normal = {d.y, -d.x};
            c.centroid = (p0 + p1) * 0.5;
            c.length = norm(xb - xa);
            if (!(c.length > 1e-9 * t.l_min))
                throw GenerationError("contact between nodes " + std::to_string(c.a) + " and " + std::to_string(c.b)
                                      + " has vanishing length");
            c.contact = (xb - xa) / c.length;
            c.chi = std::atan2(cross(c.normal, c.contact), dot(c.normal, c.contact));
            if (c.chi <= -pi)
                c.chi = pi;
            out.push_back(c);
        };
        auto walk = [&](std::size_t e0) {
            used[e0] = 1;
            int first = edges[e0].first, last = edges[e0].second;
            for (std::ptrdiff_t e = next_of(last); e >= 0; e = next_of(last)) {
                const auto [u, w] = edges[e];
                used[e] = 1;
                if (orient2d(t.vertices[first], t.vertices[last], t.vertices[w]) == 0
                    && dot(t.vertices[last] - t.vertices[first], t.vertices[w] - t.vertices[u]) > 0) {
                    last = w;
                } else {
                    emit(first, last);
                    first = u;
                    last = w;
                }
            }
            emit(first, last);
        };
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (!used[e] && incoming.find(edges[e].first) == incoming.end())
                walk(e);
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (!used[e])
                walk(e);
    }
    return out;
}

ChiStatistics chi_statistics(const std::vector<ContactElement>& elements, int bins)
{
    if (elements.empty())
        throw std::invalid_argument("chi statistics need at least one contact element");
    if (bins < 1)
        throw std::invalid_argument("bin count must be positive");
    ChiStatistics s;
    s.sample_count = elements.size();
    const double w = 2 * pi / bins;
    s.bin_edges.resize(bins + 1);
    for (int i = 0; i <= bins; ++i)
        s.bin_edges[i] = -pi + w * i;
    s.density.assign(bins, 0.0);
    double c1 = 0, c2 = 0;
    for (const auto& e : elements) {
        c1 += std::cos(e.chi);
        c2 += std::cos(2 * e.chi);
        const int k = std::clamp(static_cast<int>(std::floor((e.chi + pi) / w)), 0, bins - 1);
        s.density[k] += 1.0;
    }
    const double n = static_cast<double>(elements.size());
    for (auto& d : s.density)
        d /= n * w;
    s.i1 = c1 / n;
    s.i2 = c2 / n;
    return s;
}

double element_volume_sum(const std::vector<ContactElement>& elements)
{
    double v = 0;
    for (const auto& e : elements)
        v += e.volume();
    return v;
}

double boundary_volume_sum(const Tessellation& t)
{
    double v = 0;
    for (const auto& [key, list] : half_edges(t)) {
        if (list.size() != 1)
            continue;
        const auto& h = list.front();
        const Vec2 p = t.vertices[h.from], q = t.vertices[h.to];
        const Vec2 outward{q.y - p.y, p.x - q.x};  // length-scaled normal
        v += 0.5 * dot(outward, (p + q) * 0.5 - t.nodes[h.body]);
    }
    return v;
}

double total_body_area(const Tessellation& t)
{
    double a = 0;
    for (std::size_t i = 0; i < t.bodies.size(); ++i)
        a += t.body_area(i);
    return a;
}

std::string validate_partition(const Tessellation& t, double rel_tol)
{
    std::ostringstream msg;
    if (t.bodies.size() != t.nodes.size())
        return "body count differs from node count";
    struct LoopRef
    {
        int body;
        std::vector<Vec2> pts;
        Vec2 lo, hi;
    };
    std::vector<LoopRef> loops;
    for (std::size_t b = 0; b < t.bodies.size(); ++b)
        for (const auto& loop : t.bodies[b].loops) {
            if (loop.size() < 3)
                return "body " + std::to_string(b) + " has a loop with fewer than 3 vertices";
            LoopRef r{static_cast<int>(b), loop_points(t.vertices, loop), {}, {}};
            if (!simple_ccw(r.pts))
                return "body " + std::to_string(b) + " has a non-simple or clockwise loop";
            r.lo = r.hi = r.pts.front();
            for (const auto& p : r.pts) {
                r.lo = {std::min(r.lo.x, p.x), std::min(r.lo.y, p.y)};
                r.hi = {std::max(r.hi.x, p.x), std::max(r.hi.y, p.y)};
            }
            loops.push_back(std::move(r));
        }
    const double total = total_body_area(t);
    if (std::fabs(total - t.domain.area()) > rel_tol * t.domain.area()) {
        msg.precision(17);
        msg << "body areas sum to " << total << " but the domain area is " << t.domain.area();
        return msg.str();
    }

    PointGrid grid(t.domain, 2 * t.l_min);
    for (std::size_t i = 0; i < loops.size(); ++i)
        grid.add((loops[i].lo + loops[i].hi) * 0.5, static_cast<int>(i));
    double reach = 0;
    for (const auto& l : loops)
        reach = std::max(reach, norm(l.hi - l.lo));
    for (std::size_t i = 0; i < loops.size(); ++i) {
        const auto& A = loops[i];
        std::string failure;
        grid.visit((A.lo + A.hi) * 0.5, reach, [&](Vec2, int j) {
            const auto& B = loops[j];
            if (!failure.empty() || static_cast<std::size_t>(j) <= i || A.body == B.body)
                return;
            if (A.hi.x < B.lo.x || B.hi.x < A.lo.x || A.hi.y < B.lo.y || B.hi.y < A.lo.y)
                return;
            for (std::size_t p = 0; p < A.pts.size(); ++p)
                for (std::size_t q = 0; q < B.pts.size(); ++q)
                    if (properly_cross(A.pts[p], A.pts[(p + 1) % A.pts.size()], B.pts[q],
                                       B.pts[(q + 1) % B.pts.size()])) {
                        failure = "bodies " + std::to_string(A.body) + " and " + std::to_string(B.body) + " overlap";
                        return;
                    }
            if (strictly_inside(B.pts, A.pts.front()) || strictly_inside(A.pts, B.pts.front()))
                failure = "bodies " + std::to_string(A.body) + " and " + std::to_string(B.body) + " overlap";
        });
        if (!failure.empty())
            return failure;
    }
    return {};
}

}  // namespace rbsn
