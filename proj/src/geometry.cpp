#include "tsvfarm/geometry.hpp"

#include <algorithm>

namespace tsvfarm {

double interval_overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

double overlap_area(const Rect& a, const Rect& b) {
  return interval_overlap(a.x, a.x1(), b.x, b.x1()) * interval_overlap(a.y, a.y1(), b.y, b.y1());
}

bool overlaps(const Rect& a, const Rect& b, double eps) {
  return interval_overlap(a.x, a.x1(), b.x, b.x1()) > eps &&
         interval_overlap(a.y, a.y1(), b.y, b.y1()) > eps;
}

bool contains(const Rect& outer, const Rect& inner, double eps) {
  return inner.x >= outer.x - eps && inner.y >= outer.y - eps && inner.x1() <= outer.x1() + eps &&
         inner.y1() <= outer.y1() + eps;
}

Rect merge(const Rect& a, const Rect& b) {
  const double x0 = std::min(a.x, b.x);
  const double y0 = std::min(a.y, b.y);
  const double x1 = std::max(a.x1(), b.x1());
  const double y1 = std::max(a.y1(), b.y1());
  return {x0, y0, x1 - x0, y1 - y0};
}

}  // namespace tsvfarm
