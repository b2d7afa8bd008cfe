#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <vector>

#include "s3forge/errors.hpp"
#include "s3forge/occupancy.hpp"

namespace s3forge {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct QueueEntry {
    double f;
    std::size_t cell;
    // lower cell index expands first on equal f
    bool operator>(const QueueEntry& o) const {
        if (f != o.f) return f > o.f;
        return cell > o.cell;
    }
};

double octile(int ax, int ay, int bx, int by) {
    const double dx = std::abs(ax - bx);
    const double dy = std::abs(ay - by);
    return std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy);
}

}  // namespace

GridPath astar(const OccupancyGrid& grid, std::size_t start, std::size_t goal) {
    if (start >= grid.cell_count() || goal >= grid.cell_count())
        throw RangeError("astar start/goal out of grid");
    if (!grid.is_free(start) || !grid.is_free(goal))
        throw GeometryError("astar start/goal not FREE");

    if (start == goal) return GridPath{{start}, 0.0};

    const std::size_t n = grid.cell_count();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> g(n, inf);
    std::vector<std::size_t> parent(n, static_cast<std::size_t>(-1));
    std::vector<std::uint8_t> closed(n, 0);

    const int gx = grid.ix_of(goal), gy = grid.iy_of(goal);
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
    g[start] = 0.0;
    open.push({octile(grid.ix_of(start), grid.iy_of(start), gx, gy), start});

    // dx, dy, step length in cells
    static constexpr int kMoves[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                         {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};

    while (!open.empty()) {
        const auto [f, cur] = open.top();
        open.pop();
        if (closed[cur]) continue;
        closed[cur] = 1;
        if (cur == goal) break;

        const int cx = grid.ix_of(cur), cy = grid.iy_of(cur);
        for (int m = 0; m < 8; ++m) {
            const int nx = cx + kMoves[m][0];
            const int ny = cy + kMoves[m][1];
            if (!grid.is_free(nx, ny)) continue;
            const bool diagonal = m >= 4;
            // no corner cutting
            if (diagonal && (!grid.is_free(cx + kMoves[m][0], cy) ||
                             !grid.is_free(cx, cy + kMoves[m][1])))
                continue;
            const std::size_t nb = grid.index(nx, ny);
            if (closed[nb]) continue;
            const double ng = g[cur] + (diagonal ? kSqrt2 : 1.0);
            if (ng < g[nb]) {
                g[nb] = ng;
                parent[nb] = cur;
                open.push({ng + octile(nx, ny, gx, gy), nb});
            }
        }
    }

    if (g[goal] == inf) throw NoPathError("goal unreachable from start");

    GridPath path;
    for (std::size_t c = goal; c != static_cast<std::size_t>(-1); c = parent[c])
        path.cells.push_back(c);
    std::reverse(path.cells.begin(), path.cells.end());

    // recompute the cost from integer step counts so equal-cost paths
    // produce the identical double
    std::size_t cardinals = 0, diagonals = 0;
    for (std::size_t i = 1; i < path.cells.size(); ++i) {
        const int dx = std::abs(grid.ix_of(path.cells[i]) - grid.ix_of(path.cells[i - 1]));
        const int dy = std::abs(grid.iy_of(path.cells[i]) - grid.iy_of(path.cells[i - 1]));
        if (dx + dy == 2) ++diagonals;
        else ++cardinals;
    }
    path.cost = (static_cast<double>(cardinals) + kSqrt2 * static_cast<double>(diagonals)) *
                grid.cell_size();
    return path;
}

}  // namespace s3forge
