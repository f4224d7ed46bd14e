#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "luxplace/geometry.hpp"

namespace luxplace {

struct Cell {
    int row = 0;
    int col = 0;
    bool operator==(const Cell& o) const { return row == o.row && col == o.col; }
    bool operator!=(const Cell& o) const { return !(*this == o); }
};

// Movement actions in the fixed tie-break order used by the planner.
enum class Action : int { Up = 0, Down = 1, Left = 2, Right = 3 };
constexpr std::array<Action, 4> kAllActions = {Action::Up, Action::Down, Action::Left,
                                               Action::Right};

inline Cell apply_action(const Cell& c, Action a) {
    switch (a) {
        case Action::Up: return {c.row + 1, c.col};
        case Action::Down: return {c.row - 1, c.col};
        case Action::Left: return {c.row, c.col - 1};
        case Action::Right: return {c.row, c.col + 1};
    }
    return c;
}

inline const char* action_name(Action a) {
    switch (a) {
        case Action::Up: return "up";
        case Action::Down: return "down";
        case Action::Left: return "left";
        case Action::Right: return "right";
    }
    return "?";
}

// Regular grid of candidate measurement positions inside a rectangular
// workspace. A cell is free when its center lies strictly outside every
// obstacle. Immutable after construction; safe to share across threads.
class GridMap {
  public:
    GridMap() = default;
    GridMap(int width_cells, int height_cells, double spacing, Vec2 origin,
            const ObstacleSet& obstacles)
        : width_(width_cells), height_(height_cells), spacing_(spacing), origin_(origin) {
        if (width_cells <= 0 || height_cells <= 0 || spacing <= 0.0)
            throw std::invalid_argument("GridMap: dimensions and spacing must be positive");
        free_.assign(static_cast<std::size_t>(width_) * height_, false);
        for (int r = 0; r < height_; ++r) {
            for (int c = 0; c < width_; ++c) {
                const Vec2 p = cell_center({r, c});
                if (obstacles.signed_distance(p) > 0.0) {
                    free_[index({r, c})] = true;
                    free_cells_.push_back({r, c});
                }
            }
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    double spacing() const { return spacing_; }
    Vec2 origin() const { return origin_; }
    int cell_count() const { return width_ * height_; }

    Aabb workspace() const {
        return {origin_, {origin_.x + width_ * spacing_, origin_.y + height_ * spacing_}};
    }

    std::size_t index(const Cell& c) const {
        return static_cast<std::size_t>(c.row) * width_ + c.col;
    }
    Cell cell_at(std::size_t index) const {
        return {static_cast<int>(index) / width_, static_cast<int>(index) % width_};
    }

    bool in_bounds(const Cell& c) const {
        return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
    }
    bool is_free(const Cell& c) const { return in_bounds(c) && free_[index(c)]; }

    Vec2 cell_center(const Cell& c) const {
        return {origin_.x + (c.col + 0.5) * spacing_, origin_.y + (c.row + 0.5) * spacing_};
    }

    // Cell whose area contains p; clamped to the boundary cells.
    Cell cell_containing(const Vec2& p) const {
        int col = static_cast<int>(std::floor((p.x - origin_.x) / spacing_));
        int row = static_cast<int>(std::floor((p.y - origin_.y) / spacing_));
        col = std::clamp(col, 0, width_ - 1);
        row = std::clamp(row, 0, height_ - 1);
        return {row, col};
    }

    const std::vector<Cell>& free_cells() const { return free_cells_; }

    // Free subset of the 4-neighborhood, in fixed action order.
    std::vector<Cell> neighbors(const Cell& c) const {
        std::vector<Cell> out;
        out.reserve(4);
        for (Action a : kAllActions) {
            const Cell n = apply_action(c, a);
            if (is_free(n)) out.push_back(n);
        }
        return out;
    }

    std::vector<Action> legal_actions(const Cell& c) const {
        std::vector<Action> out;
        out.reserve(4);
        for (Action a : kAllActions)
            if (is_free(apply_action(c, a))) out.push_back(a);
        return out;
    }

  private:
    int width_ = 0;
    int height_ = 0;
    double spacing_ = 1.0;
    Vec2 origin_{0.0, 0.0};
    std::vector<bool> free_;
    std::vector<Cell> free_cells_;
};

// Breadth-first reachability over free cells; used by scenario generation
// to guarantee the planner can reach the whole free set.
bool free_cells_connected(const GridMap& grid);

}  // namespace luxplace
