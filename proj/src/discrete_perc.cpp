#include <cmath>
#include <unordered_set>

#include "slelab/discrete.hpp"

namespace slelab {

double fk_kappa(double q) {
    if (!(q > 0.0 && q < 4.0)) throw DomainError("fk_kappa: q must lie in (0,4)");
    return 4.0 * kPi / std::acos(-0.5 * std::sqrt(q));
}

int TriangularLatticeDomain::site_index(int i, int j) const {
    // row j starts after rows 0..j-1 of lengths n+1, n, ...
    return j * (n + 1) - j * (j - 1) / 2 + i;
}

std::vector<std::pair<int, int>> free_sites(const TriangularLatticeDomain& dom) {
    std::vector<std::pair<int, int>> out;
    for (int j = 0; j <= dom.n; ++j)
        for (int i = 0; i + j <= dom.n; ++i)
            if (dom.forced_color(i, j) == 0) out.emplace_back(i, j);
    return out;
}

namespace {

struct Site {
    int i, j;
    bool operator==(const Site& o) const { return i == o.i && j == o.j; }
};

// Triangles of the lattice: up U(i,j) = {(i,j),(i+1,j),(i,j+1)},
// down D(i,j) = {(i+1,j),(i,j+1),(i+1,j+1)}.
struct Tri {
    int i, j;
    bool up;
    bool operator==(const Tri& o) const { return i == o.i && j == o.j && up == o.up; }
};

Site third_vertex(const Tri& t, Site u, Site v) {
    Site verts[3];
    if (t.up) {
        verts[0] = {t.i, t.j};
        verts[1] = {t.i + 1, t.j};
        verts[2] = {t.i, t.j + 1};
    } else {
        verts[0] = {t.i + 1, t.j};
        verts[1] = {t.i, t.j + 1};
        verts[2] = {t.i + 1, t.j + 1};
    }
    for (const Site& s : verts)
        if (!(s == u) && !(s == v)) return s;
    throw InvariantError("exploration: degenerate triangle");
}

// The other triangle sharing the edge (p,q); valid = false when the edge lies
// on the domain boundary.
bool other_triangle(const TriangularLatticeDomain& dom, Site p, Site q,
                    const Tri& cur, Tri& out) {
    const int di = q.i - p.i, dj = q.j - p.j;
    Tri cand[2];
    if (dj == 0) {  // horizontal edge (i,j)-(i+1,j)
        const int i = std::min(p.i, q.i), j = p.j;
        cand[0] = {i, j, true};        // U(i,j)
        cand[1] = {i, j - 1, false};   // D(i,j-1)
    } else if (di == 0) {  // vertical-ish edge (i,j)-(i,j+1)
        const int i = p.i, j = std::min(p.j, q.j);
        cand[0] = {i, j, true};        // U(i,j)
        cand[1] = {i - 1, j, false};   // D(i-1,j)
    } else {  // diagonal edge (i+1,j)-(i,j+1)
        const int i = std::min(p.i, q.i), j = std::min(p.j, q.j);
        cand[0] = {i, j, true};        // U(i,j)
        cand[1] = {i, j, false};       // D(i,j)
    }
    for (const Tri& t : cand) {
        if (t == cur) continue;
        const bool ok = t.up ? (t.i >= 0 && t.j >= 0 && t.i + t.j <= dom.n - 1)
                             : (t.i >= 0 && t.j >= 0 && t.i + t.j <= dom.n - 2);
        if (!ok) return false;
        out = t;
        return true;
    }
    return false;
}

ExplorationResult explore(const TriangularLatticeDomain& dom,
                          const std::vector<std::int8_t>& open,
                          const ExplorationOptions& opt) {
    Site u{0, 1};  // open side of the starting edge
    Site v{1, 0};  // closed side
    Tri tri{0, 0, true};
    std::unordered_set<std::uint64_t> seen;
    ExplorationResult res;
    const std::int64_t cap = 20LL * dom.n * dom.n + 64;
    for (std::int64_t step = 0; step < cap; ++step) {
        if (opt.check_no_cross) {
            const std::uint64_t key =
                ((static_cast<std::uint64_t>(dom.site_index(u.i, u.j)) << 32) |
                 static_cast<std::uint64_t>(dom.site_index(v.i, v.j))) ^
                (tri.up ? 0x8000000000000000ULL : 0ULL) ^
                (static_cast<std::uint64_t>(tri.i * 4096 + tri.j) << 40);
            if (!seen.insert(key).second)
                throw InvariantError("exploration: interface reused an edge");
        }
        const Site w = third_vertex(tri, u, v);
        if (w.i + w.j == dom.n && w.j >= 1) {
            res.hit_row = w.j;
            res.hit_fraction = static_cast<double>(dom.n - w.j) / dom.n;
            res.walk_steps = step;
            return res;
        }
        const bool w_open = open[static_cast<std::size_t>(dom.site_index(w.i, w.j))] > 0;
        if (w_open)
            u = w;
        else
            v = w;
        Tri next{};
        if (!other_triangle(dom, u, v, tri, next))
            throw InvariantError("exploration: walked off the domain boundary");
        tri = next;
    }
    throw InvariantError("exploration: step cap exceeded");
}

}  // namespace

ExplorationResult percolation_exploration_colored(
    const TriangularLatticeDomain& dom, const std::vector<std::int8_t>& open,
    const ExplorationOptions& opt) {
    return explore(dom, open, opt);
}

ExplorationResult percolation_exploration(const TriangularLatticeDomain& dom,
                                          std::uint64_t seed,
                                          const ExplorationOptions& opt) {
    if (dom.n < 4) throw DomainError("percolation: mesh too small");
    Rng rng(seed);
    std::vector<std::int8_t> open(static_cast<std::size_t>(dom.site_count()));
    for (int j = 0; j <= dom.n; ++j) {
        for (int i = 0; i + j <= dom.n; ++i) {
            const int f = dom.forced_color(i, j);
            const std::size_t idx = static_cast<std::size_t>(dom.site_index(i, j));
            open[idx] = f != 0 ? static_cast<std::int8_t>(f > 0 ? 1 : 0)
                               : static_cast<std::int8_t>(rng.coin() ? 1 : 0);
        }
    }
    return explore(dom, open, opt);
}

}  // namespace slelab
