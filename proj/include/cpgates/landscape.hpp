#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cpgates/su2.hpp"

namespace cpg {

/// Infidelity sampled on a tensor grid; row = eps index, column = delta index.
struct LandscapeGrid {
  std::vector<double> eps_axis;
  std::vector<double> delta_axis;
  Eigen::MatrixXd values;
};

/// 1 - F at every node of an endpoint-inclusive grid over `box`.
LandscapeGrid eval_grid(const CompositeSequence& seq, GateKind target, const ErrorBox& box,
                        const GridSize& resolution, int threads = 0);

/// Fraction of grid nodes with infidelity strictly below `level`.
double robust_fraction(const LandscapeGrid& grid, double level);

/// Infidelity at (eps, delta) by bilinear interpolation of the grid.
double interpolate(const LandscapeGrid& grid, double eps, double delta);

struct Polyline {
  std::vector<Eigen::Vector2d> vertices;  // (eps, delta)
  bool closed = false;
};

struct ContourSet {
  std::vector<double> levels;
  std::vector<std::vector<Polyline>> lines;  // one list per level
};

/// Marching squares with linear edge interpolation. Saddle cells are resolved
/// by the average of the four corners; segments are chained into polylines,
/// closed where they form loops.
ContourSet contours(const LandscapeGrid& grid, std::span<const double> levels);

/// Even-odd point-in-polygon test against a closed polyline.
bool polygon_contains(const Polyline& loop, const Eigen::Vector2d& point);

}  // namespace cpg
