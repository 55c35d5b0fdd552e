#include <Eigen/Sparse>
#include <cmath>
#include <thread>

#include "slelab/discrete.hpp"

namespace slelab {

HalfStripGraph::HalfStripGraph(int n_, int m_) : n(n_), m(m_) {
    if (n < 2 || m < 2) throw DomainError("HalfStripGraph: grid too small");
    ids.assign(static_cast<std::size_t>(n + 1) * (m + 1), -1);
    auto wired = [&](int x, int y) {
        if (y == m) return true;                  // top row
        return (x == 0 || x == n) && y >= 1;      // side walls above the corners
    };
    int next = 0;
    for (int y = 0; y <= m; ++y)
        for (int x = 0; x <= n; ++x)
            if (!wired(x, y))
                ids[static_cast<std::size_t>(y) * (n + 1) + x] = next++;
    wired_id = next++;
    for (int y = 0; y <= m; ++y)
        for (int x = 0; x <= n; ++x)
            if (wired(x, y)) ids[static_cast<std::size_t>(y) * (n + 1) + x] = wired_id;

    // Adjacency for the free vertices; the wired vertex needs none (it is the
    // Wilson root).
    nbr_off.assign(static_cast<std::size_t>(next) + 1, 0);
    std::vector<std::vector<std::int32_t>> adj(static_cast<std::size_t>(next));
    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    for (int y = 0; y <= m; ++y) {
        for (int x = 0; x <= n; ++x) {
            const int v = id_at(x, y);
            if (v == wired_id) continue;
            for (int k = 0; k < 4; ++k) {
                const int xx = x + dx[k], yy = y + dy[k];
                if (xx < 0 || xx > n || yy < 0 || yy > m) continue;
                adj[static_cast<std::size_t>(v)].push_back(
                    static_cast<std::int32_t>(id_at(xx, yy)));
            }
        }
    }
    for (int v = 0; v < next; ++v)
        nbr_off[static_cast<std::size_t>(v) + 1] =
            nbr_off[static_cast<std::size_t>(v)] +
            static_cast<std::int32_t>(adj[static_cast<std::size_t>(v)].size());
    nbr.resize(static_cast<std::size_t>(nbr_off.back()));
    for (int v = 0; v < next; ++v) {
        std::int32_t off = nbr_off[static_cast<std::size_t>(v)];
        for (std::int32_t t : adj[static_cast<std::size_t>(v)]) nbr[static_cast<std::size_t>(off++)] = t;
    }
}

int tree_lca(const SpanningTree& t, int a, int b) {
    while (a != b) {
        if (t.depth[static_cast<std::size_t>(a)] >= t.depth[static_cast<std::size_t>(b)])
            a = t.parent[static_cast<std::size_t>(a)];
        else
            b = t.parent[static_cast<std::size_t>(b)];
    }
    return a;
}

namespace {

void run_sharded(std::int64_t n_samples, int shards,
                 const std::function<void(std::int64_t)>& body) {
    if (shards <= 1) {
        for (std::int64_t r = 0; r < n_samples; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    for (int s = 0; s < shards; ++s) {
        const std::int64_t lo = n_samples * s / shards;
        const std::int64_t hi = n_samples * (s + 1) / shards;
        pool.emplace_back([lo, hi, &body] {
            for (std::int64_t r = lo; r < hi; ++r) body(r);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

UstLemmaResult ust_lemma_experiment(int n, int L, Complex w, std::uint64_t seed,
                                    std::int64_t n_samples, int shards) {
    const int m = n * L;
    const HalfStripGraph g(n, m);
    const int wx = static_cast<int>(std::floor(n * w.real()));
    const int wy = static_cast<int>(std::floor(n * w.imag()));
    if (wx < 1 || wx > n - 1 || wy < 1 || wy > m - 1)
        throw DomainError("ust_lemma_experiment: w_n not interior");
    const int v0 = g.id_at(0, 0);
    const int v1 = g.id_at(n, 0);
    const int vw = g.id_at(wx, wy);

    std::vector<std::int8_t> hit(static_cast<std::size_t>(n_samples));
    std::vector<std::int8_t> tie(static_cast<std::size_t>(n_samples));
    run_sharded(n_samples, shards, [&](std::int64_t r) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
        const SpanningTree t = wilson_ust(g, g.wired_id, rng);
        const int l1 = tree_lca(t, v0, v1);
        const int l2 = tree_lca(t, v0, vw);
        const int l3 = tree_lca(t, v1, vw);
        // Among the three pairwise meets, two coincide at the shallow branch
        // point b; the deepest is the triple point a.  The arc event "b lies
        // on the tree path from (0,0) to w_n" happens exactly when b is the
        // meet of (0,0) and w_n.
        const auto d = [&](int v) { return t.depth[static_cast<std::size_t>(v)]; };
        if (l1 == l2 && l2 == l3) {
            tie[static_cast<std::size_t>(r)] = 1;
            hit[static_cast<std::size_t>(r)] = 1;  // tie rule: count as an arc hit
            return;
        }
        const bool in_arc = d(l2) <= d(l1) && d(l2) <= d(l3);
        hit[static_cast<std::size_t>(r)] = in_arc ? 1 : 0;
    });

    UstLemmaResult out;
    std::int64_t hits = 0, ties = 0;
    for (std::int64_t r = 0; r < n_samples; ++r) {
        hits += hit[static_cast<std::size_t>(r)];
        ties += tie[static_cast<std::size_t>(r)];
    }
    out.primal = proportion_ci(hits, n_samples);
    out.ties = ties;
    out.target = w.real();
    out.dual = lerw_right_prob(n, L, w, derive_seed(seed, 0x9e), n_samples);
    return out;
}

EstimateWithCI lerw_right_prob(int n, int L, Complex w, std::uint64_t seed,
                               std::int64_t n_samples) {
    const int m = n * L;
    const int fx0 = static_cast<int>(std::floor(n * w.real()));
    const int fy0 = static_cast<int>(std::floor(n * w.imag()));
    if (fx0 < 0 || fx0 > n - 1 || fy0 < 0 || fy0 > m - 1)
        throw DomainError("lerw_right_prob: dual point outside the strip");
    std::int64_t right = 0;
    Rng rng(seed);
    for (std::int64_t r = 0; r < n_samples; ++r) {
        int x = fx0, y = fy0;
        // The loop-erased branch ends where the generating walk first exits,
        // so the exit side of the plain walk is the statistic.
        for (;;) {
            const int dir = static_cast<int>(rng.below(4));
            if (dir == 0) {
                if (x + 1 > n - 1) { ++right; break; }
                ++x;
            } else if (dir == 1) {
                if (x - 1 < 0) break;  // left
                --x;
            } else if (dir == 2) {
                if (y + 1 > m - 1) break;  // top, counts against "right"
                ++y;
            } else {
                if (y - 1 >= 0) --y;  // bottom reflects (stay otherwise)
            }
        }
    }
    return proportion_ci(right, n_samples);
}

double harmonic_oracle(int n, int L, Complex w) {
    const int m = n * L;
    const int fx0 = static_cast<int>(std::floor(n * w.real()));
    const int fy0 = static_cast<int>(std::floor(n * w.imag()));
    if (fx0 < 0 || fx0 > n - 1 || fy0 < 0 || fy0 > m - 1)
        throw DomainError("harmonic_oracle: dual point outside the strip");
    const int cells = n * m;
    auto at = [&](int x, int y) { return y * n + x; };
    Eigen::SparseMatrix<double> A(cells, cells);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(cells);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(cells) * 5);
    for (int y = 0; y < m; ++y) {
        for (int x = 0; x < n; ++x) {
            const int v = at(x, y);
            trip.emplace_back(v, v, 1.0);
            // h(v) = (1/4) sum of neighbour values; absorbing sides carry the
            // boundary data, the bottom move returns to v itself.
            if (x + 1 <= n - 1) trip.emplace_back(v, at(x + 1, y), -0.25);
            else b(v) += 0.25;  // right boundary value 1
            if (x - 1 >= 0) trip.emplace_back(v, at(x - 1, y), -0.25);
            if (y + 1 <= m - 1) trip.emplace_back(v, at(x, y + 1), -0.25);
            if (y - 1 >= 0) trip.emplace_back(v, at(x, y - 1), -0.25);
            else trip.emplace_back(v, v, -0.25);  // reflecting bottom
        }
    }
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw InvariantError("harmonic_oracle: singular linear system");
    const Eigen::VectorXd h = solver.solve(b);
    if (solver.info() != Eigen::Success)
        throw InvariantError("harmonic_oracle: solve failed");
    return h(at(fx0, fy0));
}

}  // namespace slelab
