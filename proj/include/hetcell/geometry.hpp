#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "hetcell/error.hpp"

namespace hetcell {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Square window [0, side)^2 with periodic (toroidal) boundary, rasterized
// into resolution x resolution pixels whose centers sit at
// ((i + 0.5) / resolution) * side.
class Window {
 public:
  Window(double side_length, std::size_t resolution) : side_(side_length), resolution_(resolution) {
    if (!(side_length > 0.0) || !std::isfinite(side_length)) {
      throw InvalidArgument("window side length must be positive and finite, got " +
                            std::to_string(side_length));
    }
    if (resolution < 2) {
      throw InvalidArgument("window resolution must be at least 2, got " + std::to_string(resolution));
    }
  }

  double side_length() const noexcept { return side_; }
  std::size_t resolution() const noexcept { return resolution_; }
  std::size_t pixel_count() const noexcept { return resolution_ * resolution_; }
  double area() const noexcept { return side_ * side_; }
  double pixel_size() const noexcept { return side_ / static_cast<double>(resolution_); }
  double pixel_area() const noexcept { return pixel_size() * pixel_size(); }

  bool contains(Point p) const noexcept {
    return p.x >= 0.0 && p.x < side_ && p.y >= 0.0 && p.y < side_;
  }

  // Coordinate reduced modulo the side length into [0, side).
  double wrap(double v) const noexcept {
    double w = std::fmod(v, side_);
    if (w < 0.0) w += side_;
    if (w >= side_) w = 0.0;
    return w;
  }
  Point wrap(Point p) const noexcept { return {wrap(p.x), wrap(p.y)}; }

  // Shortest displacement along one axis on the circle of circumference side.
  double axis_gap(double a, double b) const noexcept {
    const double d = std::fabs(a - b);
    return d <= 0.5 * side_ ? d : side_ - d;
  }

  double torus_distance(Point a, Point b) const noexcept {
    const double dx = axis_gap(a.x, b.x);
    const double dy = axis_gap(a.y, b.y);
    return std::sqrt(dx * dx + dy * dy);
  }

  // Pixel (col, row) center; row index runs along y.
  Point pixel_center(std::size_t col, std::size_t row) const noexcept {
    const double h = pixel_size();
    return {(static_cast<double>(col) + 0.5) * h, (static_cast<double>(row) + 0.5) * h};
  }

  std::size_t pixel_index(std::size_t col, std::size_t row) const noexcept { return row * resolution_ + col; }

  // Row-major index of the pixel containing p (p is wrapped first).
  std::size_t pixel_containing(Point p) const noexcept {
    const Point q = wrap(p);
    const double h = pixel_size();
    auto clamp = [this](double v) {
      const auto i = static_cast<std::size_t>(v);
      return i >= resolution_ ? resolution_ - 1 : i;
    };
    return pixel_index(clamp(q.x / h), clamp(q.y / h));
  }

  // Pixel center closest to the geometric center of the window. Used as the
  // "origin" of each replication; on the torus every location is equivalent.
  Point reference_point() const noexcept { return pixel_center(resolution_ / 2, resolution_ / 2); }

 private:
  double side_;
  std::size_t resolution_;
};

}  // namespace hetcell
