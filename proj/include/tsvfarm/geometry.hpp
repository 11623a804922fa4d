#pragma once

namespace tsvfarm {

/// Tolerance (m) below which rectangle intersections are treated as touching.
inline constexpr double kGeomEps = 1e-12;

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

/// Axis-aligned rectangle anchored at its lower-left corner. SI units.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double x1() const { return x + w; }
  double y1() const { return y + h; }
  double area() const { return w * h; }
  Point center() const { return {x + 0.5 * w, y + 0.5 * h}; }

  bool operator==(const Rect&) const = default;
};

/// Length of the intersection of [a0,a1] and [b0,b1]; 0 when disjoint.
double interval_overlap(double a0, double a1, double b0, double b1);

double overlap_area(const Rect& a, const Rect& b);

/// True when the interiors intersect. Shared edges are not an overlap.
bool overlaps(const Rect& a, const Rect& b, double eps = kGeomEps);

bool contains(const Rect& outer, const Rect& inner, double eps = kGeomEps);

/// Bounding box of two rectangles.
Rect merge(const Rect& a, const Rect& b);

}  // namespace tsvfarm
