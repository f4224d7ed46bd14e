#include "luxplace/grid_map.hpp"

#include <queue>

namespace luxplace {

bool free_cells_connected(const GridMap& grid) {
    const auto& free = grid.free_cells();
    if (free.empty()) return false;
    std::vector<bool> seen(static_cast<std::size_t>(grid.cell_count()), false);
    std::queue<Cell> frontier;
    frontier.push(free.front());
    seen[grid.index(free.front())] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const Cell c = frontier.front();
        frontier.pop();
        for (const Cell& n : grid.neighbors(c)) {
            if (!seen[grid.index(n)]) {
                seen[grid.index(n)] = true;
                ++reached;
                frontier.push(n);
            }
        }
    }
    return reached == free.size();
}

}  // namespace luxplace
