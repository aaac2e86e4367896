#pragma once

#include <cmath>

namespace vog {

struct Point2d {
    double x = 0.0;
    double y = 0.0;

    friend Point2d operator+(Point2d a, Point2d b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2d operator-(Point2d a, Point2d b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2d operator*(double s, Point2d p) { return {s * p.x, s * p.y}; }
    friend bool operator==(const Point2d&, const Point2d&) = default;
};

inline double norm(Point2d p) { return std::hypot(p.x, p.y); }
inline double distance(Point2d a, Point2d b) { return norm(a - b); }

// Inclusive pixel rectangle.
struct PixelRect {
    int x0 = 0;
    int y0 = 0;
    int x1 = -1;
    int y1 = -1;

    bool empty() const { return x1 < x0 || y1 < y0; }
    int width() const { return empty() ? 0 : x1 - x0 + 1; }
    int height() const { return empty() ? 0 : y1 - y0 + 1; }
    bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
    PixelRect expanded(int by) const { return {x0 - by, y0 - by, x1 + by, y1 + by}; }
    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

} // namespace vog
