#pragma once

#include <cstdint>
#include <vector>

#include "slelab/core.hpp"
#include "slelab/rng.hpp"
#include "slelab/stats.hpp"

namespace slelab {

/// FK parameter map kappa = 4 pi / acos(-sqrt(q)/2), q in (0,4).
double fk_kappa(double q);

// --- Critical site percolation on the triangular lattice -----------------------

/// Equilateral triangle of mesh n in axial coordinates: rows j = 0..n, row j
/// holding sites i = 0..n-j.  Corners a = (0,0), b = (0,n) apex, c = (n,0).
/// Boundary arcs: (a,b] (left, forced open), [b,c) (right, forced open),
/// (a,c) (bottom, forced closed); the corners a and c stay free.
struct TriangularLatticeDomain {
    int n = 0;

    explicit TriangularLatticeDomain(int mesh) : n(mesh) {}

    bool in_domain(int i, int j) const {
        return j >= 0 && j <= n && i >= 0 && i + j <= n;
    }
    int site_index(int i, int j) const;
    int site_count() const { return (n + 1) * (n + 2) / 2; }

    // +1 open, -1 closed, 0 free.
    int forced_color(int i, int j) const {
        if (i == 0 && j >= 1) return +1;             // (a,b]
        if (i + j == n && j >= 1) return +1;         // [b,c)
        if (j == 0 && i >= 1 && i <= n - 1) return -1;  // (a,c)
        return 0;
    }
};

struct ExplorationResult {
    double hit_fraction = 0.0;  // arclength fraction from b along (b,c)
    int hit_row = 0;            // row j of the first right-arc site queried
    std::int64_t walk_steps = 0;
};

struct ExplorationOptions {
    bool check_no_cross = false;  // assert the interface never reuses an edge
};

/// Exploration interface between the open component of (a,b] u [b,c) and the
/// closed component of (a,c); returns its first hit of the side (b,c).
ExplorationResult percolation_exploration(const TriangularLatticeDomain& dom,
                                          std::uint64_t seed,
                                          const ExplorationOptions& opt = {});

/// Same walk on a caller-supplied coloring (used by the enumeration oracle);
/// open[site_index] over free sites only, forced arcs follow the domain.
ExplorationResult percolation_exploration_colored(
    const TriangularLatticeDomain& dom, const std::vector<std::int8_t>& open,
    const ExplorationOptions& opt = {});

/// The free (i,j) sites in enumeration order.
std::vector<std::pair<int, int>> free_sites(const TriangularLatticeDomain& dom);

// --- Grid graphs, Wilson, and the UST lemma ------------------------------------

/// [0,n] x [0,m] grid with the left wall, right wall and top row contracted
/// into a single wired vertex; the bottom row (corners included) stays free.
struct HalfStripGraph {
    int n = 0, m = 0;
    int wired_id = 0;
    std::vector<std::int32_t> ids;       // (n+1)*(m+1) -> vertex id
    std::vector<std::int32_t> nbr;       // flattened adjacency
    std::vector<std::int32_t> nbr_off;   // offsets per vertex

    HalfStripGraph(int n_, int m_);

    int vcount() const { return static_cast<int>(nbr_off.size()) - 1; }
    int id_at(int x, int y) const { return ids[static_cast<std::size_t>(y) * (n + 1) + x]; }
    int degree(int v) const { return nbr_off[v + 1] - nbr_off[v]; }
    int neighbor(int v, int k) const { return nbr[nbr_off[v] + k]; }
};

struct SpanningTree {
    std::vector<std::int32_t> parent;  // toward the root; -1 at the root
    std::vector<std::int32_t> depth;
    int root = 0;
};

/// Wilson's algorithm: loop-erased random walks from each unvisited vertex to
/// the growing tree.  Exact uniform spanning tree of any connected graph
/// exposing vcount/degree/neighbor.
template <typename Graph>
SpanningTree wilson_ust(const Graph& g, int root, Rng& rng) {
    const int n = g.vcount();
    SpanningTree t;
    t.root = root;
    t.parent.assign(static_cast<std::size_t>(n), -2);  // -2: not in tree yet
    t.parent[static_cast<std::size_t>(root)] = -1;
    std::vector<std::int32_t> nxt(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < n; ++v) {
        if (t.parent[static_cast<std::size_t>(v)] != -2) continue;
        int u = v;
        while (t.parent[static_cast<std::size_t>(u)] == -2) {
            const int k = static_cast<int>(rng.below(
                static_cast<std::uint64_t>(g.degree(u))));
            nxt[static_cast<std::size_t>(u)] = g.neighbor(u, k);
            u = nxt[static_cast<std::size_t>(u)];
        }
        u = v;
        while (t.parent[static_cast<std::size_t>(u)] == -2) {
            t.parent[static_cast<std::size_t>(u)] = nxt[static_cast<std::size_t>(u)];
            u = nxt[static_cast<std::size_t>(u)];
        }
    }
    t.depth.assign(static_cast<std::size_t>(n), -1);
    t.depth[static_cast<std::size_t>(root)] = 0;
    for (int v = 0; v < n; ++v) {
        // resolve depth by walking to the first known ancestor
        int u = v;
        std::int32_t hops = 0;
        while (t.depth[static_cast<std::size_t>(u)] < 0) {
            u = t.parent[static_cast<std::size_t>(u)];
            ++hops;
        }
        const std::int32_t base = t.depth[static_cast<std::size_t>(u)];
        u = v;
        std::int32_t d = base + hops;
        while (t.depth[static_cast<std::size_t>(u)] < 0) {
            t.depth[static_cast<std::size_t>(u)] = d--;
            u = t.parent[static_cast<std::size_t>(u)];
        }
    }
    return t;
}

int tree_lca(const SpanningTree& t, int a, int b);

struct UstLemmaResult {
    EstimateWithCI primal;   // P(b on the oriented arc [0,a] u [a,w_n])
    EstimateWithCI dual;     // P(dual point connects to the right boundary)
    double target = 0.0;     // Re w
    std::int64_t ties = 0;   // degenerate triple points, counted as arc hits
};

/// Samples USTs of the half-strip graph (n, m = n*L), locates the two triple
/// points of the minimal subtrees spanned by (0,0), (n,0), w_n and the wired
/// boundary, and tests the arc-membership event against the dual-tree
/// connectivity estimate.  w_n = floor(n Re w, n Im w).
UstLemmaResult ust_lemma_experiment(int n, int L, Complex w, std::uint64_t seed,
                                    std::int64_t n_samples, int shards = 1);

// --- LERW exit side vs harmonic measure -----------------------------------------

/// Dual-lattice walk kernel: faces (i+1/2, j+1/2), i in [0,n-1], j in
/// [0,nL-1]; absorbed beyond the left/right/top faces, reflected at the
/// bottom.  The dual point of w is the face w_n + (1/2,1/2), w_n = floor(n w).
EstimateWithCI lerw_right_prob(int n, int L, Complex w, std::uint64_t seed,
                               std::int64_t n_samples);

/// Exact harmonic measure of the right boundary for the same kernel, by a
/// sparse direct solve.
double harmonic_oracle(int n, int L, Complex w);

// --- Temperleyan dominoes ---------------------------------------------------------

enum class CornerSide { Left, Right };

/// Perfect matching of the (2nL+1) x (2n+1) board minus one bottom corner
/// cell.  partner[cell] is the matched cell index, -2 for the removed cell.
struct DominoTiling {
    int width = 0, height = 0;
    int removed_cell = -1;
    std::vector<std::int32_t> partner;

    int cell(int cx, int cy) const { return cy * width + cx; }
};

DominoTiling temperley_domino_sample(int n, int L, CornerSide corner, Rng& rng);

/// Thurston height function on the (width+1) x (height+1) vertices, anchored
/// to 0 at vertex (0,0).
std::vector<std::int32_t> height_function(const DominoTiling& t);

struct DominoSample {
    int h_diff = 0;    // h1 - h2 at the requested vertex
    bool above = true; // vertex above the corner-to-corner path
};

/// One replica: sample both corner-removed tilings, superpose, extract the
/// corner-to-corner path and evaluate the height difference at vertex
/// (vx, vy) (array coordinates, 0 <= vx <= width, 0 <= vy <= height).
DominoSample domino_height_sample(int n, int L, int vx, int vy, Rng& rng);

/// Extract the corner-to-corner path of the superposition as cell indices.
std::vector<std::int32_t> superposition_path(const DominoTiling& left_removed,
                                             const DominoTiling& right_removed);

struct DominoHeightResult {
    EstimateWithCI mean_h;
    EstimateWithCI p_above;
    EstimateWithCI identity_gap;  // mean of (h - 4*above); 0 in law
};

DominoHeightResult domino_height_experiment(int n, int L, int vx, int vy,
                                            std::uint64_t seed,
                                            std::int64_t n_samples,
                                            int shards = 1);

}  // namespace slelab
