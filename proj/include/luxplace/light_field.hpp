#pragma once

#include <stdexcept>
#include <vector>

#include "luxplace/grid_map.hpp"

namespace luxplace {

// Scalar intensity per grid cell. Cells inside obstacles hold 0.
struct LightField {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    LightField() = default;
    LightField(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}
    explicit LightField(const GridMap& grid, double fill = 0.0)
        : LightField(grid.width(), grid.height(), fill) {}

    std::size_t index(const Cell& c) const {
        return static_cast<std::size_t>(c.row) * width + c.col;
    }
    double at(const Cell& c) const { return values[index(c)]; }
    double& at(const Cell& c) { return values[index(c)]; }

    bool same_shape(const LightField& o) const {
        return width == o.width && height == o.height;
    }
};

inline void require_same_shape(const LightField& a, const LightField& b, const char* what) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

struct Emitter {
    Vec2 position;
    double brightness = 1.0;  // in [0,1]
};

// Configuration of N omni-directional emitters (positions + brightnesses).
using EmitterConfig = std::vector<Emitter>;

}  // namespace luxplace
