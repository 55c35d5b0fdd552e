#include <cmath>
#include <deque>
#include <functional>
#include <thread>

#include "slelab/discrete.hpp"

namespace slelab {

namespace {

// Tree grid of the Temperley correspondence: the even-even cells.
struct TGrid {
    int nx, ny;  // vertices 0..nx-1 x 0..ny-1
    int vcount() const { return nx * ny; }
    int at(int i, int j) const { return j * nx + i; }
    int degree(int v) const {
        const int i = v % nx, j = v / nx;
        return (i > 0) + (i < nx - 1) + (j > 0) + (j < ny - 1);
    }
    int neighbor(int v, int k) const {
        const int i = v % nx, j = v / nx;
        if (i > 0 && k-- == 0) return at(i - 1, j);
        if (i < nx - 1 && k-- == 0) return at(i + 1, j);
        if (j > 0 && k-- == 0) return at(i, j - 1);
        return at(i, j + 1);
    }
};

}  // namespace

DominoTiling temperley_domino_sample(int n, int L, CornerSide corner, Rng& rng) {
    if (n < 1 || L < 1) throw DomainError("temperley_domino_sample: bad size");
    const int W = 2 * n * L + 1;
    const int H = 2 * n + 1;
    DominoTiling t;
    t.width = W;
    t.height = H;
    t.partner.assign(static_cast<std::size_t>(W) * H, -1);

    const TGrid tg{n * L + 1, n + 1};
    const int root_i = corner == CornerSide::Left ? 0 : n * L;
    const int root = tg.at(root_i, 0);
    const SpanningTree tree = wilson_ust(tg, root, rng);
    t.removed_cell = t.cell(2 * root_i, 0);
    t.partner[static_cast<std::size_t>(t.removed_cell)] = -2;

    // Each non-root tree vertex pairs with the edge cell toward its parent.
    std::vector<std::int8_t> edge_used(static_cast<std::size_t>(W) * H, 0);
    for (int v = 0; v < tg.vcount(); ++v) {
        const int p = tree.parent[static_cast<std::size_t>(v)];
        if (p < 0) continue;
        const int vi = v % tg.nx, vj = v / tg.nx;
        const int pi = p % tg.nx, pj = p / tg.nx;
        const int vc = t.cell(2 * vi, 2 * vj);
        const int ec = t.cell(vi + pi, vj + pj);  // midpoint cell
        t.partner[static_cast<std::size_t>(vc)] = ec;
        t.partner[static_cast<std::size_t>(ec)] = vc;
        edge_used[static_cast<std::size_t>(ec)] = 1;
    }

    // Complementary dual tree on the odd-odd cells, rooted at the outer face:
    // its edges are exactly the unused edge cells.
    const int dn = n * L, dm = n;  // dual grid dn x dm
    const int OUTER = dn * dm;
    auto dat = [&](int i, int j) { return j * dn + i; };
    std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> dadj(
        static_cast<std::size_t>(OUTER) + 1);  // (neighbor, edge cell)
    auto add_dual = [&](int a, int b, int ec) {
        dadj[static_cast<std::size_t>(a)].emplace_back(b, ec);
        dadj[static_cast<std::size_t>(b)].emplace_back(a, ec);
    };
    for (int cy = 0; cy < H; ++cy) {
        for (int cx = 0; cx < W; ++cx) {
            const bool ex = cx % 2 == 0, ey = cy % 2 == 0;
            if (ex == ey) continue;  // not an edge cell
            const int ec = t.cell(cx, cy);
            if (edge_used[static_cast<std::size_t>(ec)]) continue;
            if (ex) {
                // vertical T pair, horizontal D pair
                const int left = cx >= 2 ? dat((cx - 2) / 2, (cy - 1) / 2) : OUTER;
                const int right = cx <= W - 3 ? dat(cx / 2, (cy - 1) / 2) : OUTER;
                add_dual(left, right, ec);
            } else {
                const int below = cy >= 2 ? dat((cx - 1) / 2, (cy - 2) / 2) : OUTER;
                const int above = cy <= H - 3 ? dat((cx - 1) / 2, cy / 2) : OUTER;
                add_dual(below, above, ec);
            }
        }
    }
    // BFS orientation toward the outer root; each dual vertex pairs with the
    // edge cell toward its parent.
    std::vector<std::int8_t> seen(static_cast<std::size_t>(OUTER) + 1, 0);
    std::deque<int> queue;
    seen[static_cast<std::size_t>(OUTER)] = 1;
    queue.push_back(OUTER);
    int dual_visited = 0;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (const auto& [v, ec] : dadj[static_cast<std::size_t>(u)]) {
            if (seen[static_cast<std::size_t>(v)]) continue;
            seen[static_cast<std::size_t>(v)] = 1;
            ++dual_visited;
            const int vi = v % dn, vj = v / dn;
            const int vc = t.cell(2 * vi + 1, 2 * vj + 1);
            t.partner[static_cast<std::size_t>(vc)] = ec;
            t.partner[static_cast<std::size_t>(ec)] = vc;
            queue.push_back(v);
        }
    }
    if (dual_visited != dn * dm)
        throw InvariantError("temperley_domino_sample: dual complement is not a tree");
    for (std::size_t c = 0; c < t.partner.size(); ++c)
        if (t.partner[c] == -1)
            throw InvariantError("temperley_domino_sample: uncovered cell");
    return t;
}

std::vector<std::int32_t> height_function(const DominoTiling& t) {
    const int W = t.width, H = t.height;
    const int VW = W + 1, VH = H + 1;
    auto vid = [&](int x, int y) { return y * VW + x; };
    auto black = [&](int cx, int cy) { return ((cx + cy) & 1) == 0; };
    auto crossed = [&](int ca, int cb) {
        if (ca < 0 || cb < 0) return false;
        const int cax = ca % W, cay = ca / W;
        const int cbx = cb % W, cby = cb / W;
        if (cax < 0 || cax >= W || cay < 0 || cay >= H) return false;
        if (cbx < 0 || cbx >= W || cby < 0 || cby >= H) return false;
        return t.partner[static_cast<std::size_t>(ca)] == cb;
    };
    auto cell_or_neg = [&](int cx, int cy) {
        if (cx < 0 || cx >= W || cy < 0 || cy >= H) return -1;
        return t.cell(cx, cy);
    };
    // Height increments along lattice edges; left cell rule.
    auto delta = [&](int x, int y, int dir) {  // dir 0:E 1:N 2:W 3:S
        int lcx, lcy, rcx, rcy;
        switch (dir) {
            case 0: lcx = x; lcy = y; rcx = x; rcy = y - 1; break;
            case 1: lcx = x - 1; lcy = y; rcx = x; rcy = y; break;
            case 2: lcx = x - 1; lcy = y - 1; rcx = x - 1; rcy = y; break;
            default: lcx = x; lcy = y - 1; rcx = x - 1; rcy = y - 1; break;
        }
        const bool lb = black(lcx, lcy);
        const bool x_ed = crossed(cell_or_neg(lcx, lcy), cell_or_neg(rcx, rcy));
        if (!x_ed) return lb ? 1 : -1;
        return lb ? -3 : 3;
    };
    std::vector<std::int32_t> h(static_cast<std::size_t>(VW) * VH,
                                std::numeric_limits<std::int32_t>::min());
    std::deque<std::pair<int, int>> queue;
    h[static_cast<std::size_t>(vid(0, 0))] = 0;
    queue.emplace_back(0, 0);
    const int dx[4] = {1, 0, -1, 0};
    const int dy[4] = {0, 1, 0, -1};
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        const std::int32_t base = h[static_cast<std::size_t>(vid(x, y))];
        for (int dir = 0; dir < 4; ++dir) {
            const int nx = x + dx[dir], ny = y + dy[dir];
            if (nx < 0 || nx > W || ny < 0 || ny > H) continue;
            auto& slot = h[static_cast<std::size_t>(vid(nx, ny))];
            if (slot != std::numeric_limits<std::int32_t>::min()) continue;
            slot = base + delta(x, y, dir);
            queue.emplace_back(nx, ny);
        }
    }
    return h;
}

std::vector<std::int32_t> superposition_path(const DominoTiling& left_removed,
                                             const DominoTiling& right_removed) {
    const DominoTiling& t1 = left_removed;
    const DominoTiling& t2 = right_removed;
    const int start = t1.removed_cell;
    const int goal = t2.removed_cell;
    std::vector<std::int32_t> path{static_cast<std::int32_t>(start)};
    int cur = start;
    bool use_t2 = true;  // the left corner is covered only by the right-removed tiling
    const std::size_t cap = t1.partner.size() + 2;
    while (cur != goal) {
        const int nxt = (use_t2 ? t2 : t1).partner[static_cast<std::size_t>(cur)];
        if (nxt < 0)
            throw InvariantError("superposition_path: path ran into a removed cell");
        path.push_back(nxt);
        cur = nxt;
        use_t2 = !use_t2;
        if (path.size() > cap)
            throw InvariantError("superposition_path: path failed to close");
    }
    return path;
}

DominoSample domino_height_sample(int n, int L, int vx, int vy, Rng& rng) {
    const DominoTiling t1 = temperley_domino_sample(n, L, CornerSide::Left, rng);
    const DominoTiling t2 = temperley_domino_sample(n, L, CornerSide::Right, rng);
    const int W = t1.width;
    if (vx < 1 || vx > W - 1 || vy < 1 || vy > t1.height - 1)
        throw DomainError("domino_height_sample: vertex must be interior");
    const auto h1 = height_function(t1);
    const auto h2 = height_function(t2);
    const int VW = W + 1;
    DominoSample s;
    s.h_diff = h1[static_cast<std::size_t>(vy) * VW + vx] -
               h2[static_cast<std::size_t>(vy) * VW + vx];
    const auto path = superposition_path(t1, t2);
    int crossings = 0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        const int ax = path[k] % W, ay = path[k] / W;
        const int bx = path[k + 1] % W, by = path[k + 1] / W;
        if (ay != by) continue;              // vertical move
        if (ay >= vy) continue;              // not below the vertex
        if (std::min(ax, bx) == vx - 1) ++crossings;
    }
    s.above = (crossings & 1) != 0;
    return s;
}

DominoHeightResult domino_height_experiment(int n, int L, int vx, int vy,
                                            std::uint64_t seed,
                                            std::int64_t n_samples, int shards) {
    std::vector<double> hs(static_cast<std::size_t>(n_samples));
    std::vector<double> gap(static_cast<std::size_t>(n_samples));
    std::vector<std::int8_t> above(static_cast<std::size_t>(n_samples));
    auto body = [&](std::int64_t r) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
        const DominoSample s = domino_height_sample(n, L, vx, vy, rng);
        hs[static_cast<std::size_t>(r)] = s.h_diff;
        above[static_cast<std::size_t>(r)] = s.above ? 1 : 0;
        gap[static_cast<std::size_t>(r)] = s.h_diff - 4.0 * (s.above ? 1.0 : 0.0);
    };
    if (shards <= 1) {
        for (std::int64_t r = 0; r < n_samples; ++r) body(r);
    } else {
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
    DominoHeightResult out;
    out.mean_h = mean_ci(hs);
    std::int64_t na = 0;
    for (auto a : above) na += a;
    out.p_above = proportion_ci(na, n_samples);
    out.identity_gap = mean_ci(gap);
    return out;
}

}  // namespace slelab
