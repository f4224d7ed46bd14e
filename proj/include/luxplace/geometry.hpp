#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace luxplace {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double squared_norm() const { return x * x + y * y; }
    Vec2 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
    }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct Aabb {
    Vec2 min;
    Vec2 max;

    bool contains(const Vec2& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    Vec2 extent() const { return max - min; }
    double diagonal() const { return extent().norm(); }
    // distance from p to the box, 0 inside
    double exterior_distance(const Vec2& p) const {
        const double dx = std::max({min.x - p.x, 0.0, p.x - max.x});
        const double dy = std::max({min.y - p.y, 0.0, p.y - max.y});
        return std::hypot(dx, dy);
    }
};

// Signed distance to an axis-aligned rectangle: negative inside, exact outside.
inline double rect_sdf(const Aabb& r, const Vec2& p) {
    const Vec2 c{0.5 * (r.min.x + r.max.x), 0.5 * (r.min.y + r.max.y)};
    const Vec2 h{0.5 * (r.max.x - r.min.x), 0.5 * (r.max.y - r.min.y)};
    const double qx = std::abs(p.x - c.x) - h.x;
    const double qy = std::abs(p.y - c.y) - h.y;
    const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
    const double inside = std::min(std::max(qx, qy), 0.0);
    return outside + inside;
}

inline bool rects_overlap(const Aabb& a, const Aabb& b) {
    return a.min.x < b.max.x && b.min.x < a.max.x && a.min.y < b.max.y && b.min.y < a.max.y;
}

// Segment/rectangle overlap via the slab method.
inline bool segment_intersects_rect(const Vec2& a, const Vec2& b, const Aabb& r) {
    const Vec2 d = b - a;
    double t0 = 0.0, t1 = 1.0;
    const double lo[2] = {r.min.x, r.min.y};
    const double hi[2] = {r.max.x, r.max.y};
    const double orig[2] = {a.x, a.y};
    const double dir[2] = {d.x, d.y};
    for (int ax = 0; ax < 2; ++ax) {
        if (std::abs(dir[ax]) < 1e-15) {
            if (orig[ax] < lo[ax] || orig[ax] > hi[ax]) return false;
        } else {
            double ta = (lo[ax] - orig[ax]) / dir[ax];
            double tb = (hi[ax] - orig[ax]) / dir[ax];
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 > t1) return false;
        }
    }
    return true;
}

struct Obstacle {
    Aabb rect;
    double reflectivity = 0.5;  // in [0,1]
};

class ObstacleSet {
  public:
    ObstacleSet() = default;
    explicit ObstacleSet(std::vector<Obstacle> obstacles) : obstacles_(std::move(obstacles)) {}

    const std::vector<Obstacle>& obstacles() const { return obstacles_; }
    std::size_t size() const { return obstacles_.size(); }
    bool empty() const { return obstacles_.empty(); }
    void add(const Obstacle& o) { obstacles_.push_back(o); }

    // Set SDF is the minimum over members; +inf for an empty set.
    double signed_distance(const Vec2& p) const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& o : obstacles_) best = std::min(best, rect_sdf(o.rect, p));
        return best;
    }

    int nearest_obstacle(const Vec2& p) const {
        int idx = -1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < obstacles_.size(); ++i) {
            const double d = rect_sdf(obstacles_[i].rect, p);
            if (d < best) {
                best = d;
                idx = static_cast<int>(i);
            }
        }
        return idx;
    }

    // Surface normal from SDF central differences; exact on rectangle faces.
    Vec2 normal(const Vec2& p, double step) const {
        const double dx =
            signed_distance({p.x + step, p.y}) - signed_distance({p.x - step, p.y});
        const double dy =
            signed_distance({p.x, p.y + step}) - signed_distance({p.x, p.y - step});
        const Vec2 g{dx, dy};
        const double n = g.norm();
        return n > 0.0 ? Vec2{g.x / n, g.y / n} : Vec2{1.0, 0.0};
    }

    bool segment_blocked(const Vec2& a, const Vec2& b) const {
        for (const auto& o : obstacles_)
            if (segment_intersects_rect(a, b, o.rect)) return true;
        return false;
    }

  private:
    std::vector<Obstacle> obstacles_;
};

}  // namespace luxplace
