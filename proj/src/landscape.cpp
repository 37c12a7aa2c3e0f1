#include "cpgates/landscape.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "cpgates/parallel.hpp"

namespace cpg {

LandscapeGrid eval_grid(const CompositeSequence& seq, GateKind target, const ErrorBox& box,
                        const GridSize& resolution, int threads) {
  LandscapeGrid g;
  g.eps_axis = axis_samples(box.eps_lo, box.eps_hi, resolution.n_eps);
  g.delta_axis = axis_samples(box.delta_lo, box.delta_hi, resolution.n_delta);
  g.values.resize(resolution.n_eps, resolution.n_delta);
  parallel_for(g.eps_axis.size(), threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < g.delta_axis.size(); ++j) {
      g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sequence_infidelity(seq, target, {g.eps_axis[i], g.delta_axis[j]});
    }
  });
  return g;
}

double robust_fraction(const LandscapeGrid& grid, double level) {
  if (grid.values.size() == 0) return 0.0;
  return static_cast<double>((grid.values.array() < level).count()) / static_cast<double>(grid.values.size());
}

namespace {

// Index of the last axis node not greater than v, clamped to a valid cell.
std::size_t cell_index(const std::vector<double>& axis, double v) {
  auto it = std::upper_bound(axis.begin(), axis.end(), v);
  std::size_t i = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
  return std::min(i, axis.size() - 2);
}

}  // namespace

double interpolate(const LandscapeGrid& grid, double eps, double delta) {
  if (grid.eps_axis.size() < 2 || grid.delta_axis.size() < 2) {
    throw std::invalid_argument("interpolation needs at least two samples per axis");
  }
  const std::size_t i = cell_index(grid.eps_axis, eps);
  const std::size_t j = cell_index(grid.delta_axis, delta);
  const double tx = (eps - grid.eps_axis[i]) / (grid.eps_axis[i + 1] - grid.eps_axis[i]);
  const double ty = (delta - grid.delta_axis[j]) / (grid.delta_axis[j + 1] - grid.delta_axis[j]);
  const auto& v = grid.values;
  const auto I = static_cast<Eigen::Index>(i);
  const auto J = static_cast<Eigen::Index>(j);
  return (1 - tx) * (1 - ty) * v(I, J) + tx * (1 - ty) * v(I + 1, J) + tx * ty * v(I + 1, J + 1) +
         (1 - tx) * ty * v(I, J + 1);
}

namespace {

// Edges are keyed by their lower-left node and direction: 0 along eps, 1 along delta.
struct EdgeKey {
  std::size_t i, j;
  int dir;
};

class ContourTracer {
 public:
  ContourTracer(const LandscapeGrid& g, double level) : g_(g), level_(level) {}

  std::vector<Polyline> trace() {
    collect_segments();
    return chain();
  }

 private:
  std::size_t edge_id(const EdgeKey& e) const { return 2 * (e.i * g_.delta_axis.size() + e.j) + e.dir; }

  double value(std::size_t i, std::size_t j) const {
    return g_.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  Eigen::Vector2d crossing(const EdgeKey& e) const {
    const std::size_t i2 = e.i + (e.dir == 0 ? 1 : 0);
    const std::size_t j2 = e.j + (e.dir == 1 ? 1 : 0);
    const double v0 = value(e.i, e.j);
    const double v1 = value(i2, j2);
    const double t = (level_ - v0) / (v1 - v0);
    return {g_.eps_axis[e.i] + t * (g_.eps_axis[i2] - g_.eps_axis[e.i]),
            g_.delta_axis[e.j] + t * (g_.delta_axis[j2] - g_.delta_axis[e.j])};
  }

  void add_segment(const EdgeKey& a, const EdgeKey& b) {
    const std::size_t ia = edge_id(a);
    const std::size_t ib = edge_id(b);
    if (!points_.count(ia)) points_[ia] = crossing(a);
    if (!points_.count(ib)) points_[ib] = crossing(b);
    const std::size_t s = segments_.size();
    segments_.push_back({ia, ib});
    adjacency_[ia].push_back(s);
    adjacency_[ib].push_back(s);
  }

  void collect_segments() {
    const std::size_t ni = g_.eps_axis.size();
    const std::size_t nj = g_.delta_axis.size();
    for (std::size_t i = 0; i + 1 < ni; ++i) {
      for (std::size_t j = 0; j + 1 < nj; ++j) {
        // corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1)
        const std::array<double, 4> v{value(i, j), value(i + 1, j), value(i + 1, j + 1), value(i, j + 1)};
        std::array<bool, 4> below{};
        for (int k = 0; k < 4; ++k) below[k] = v[k] < level_;
        // edge k joins corner k and corner k+1
        const std::array<EdgeKey, 4> edges{EdgeKey{i, j, 0}, EdgeKey{i + 1, j, 1}, EdgeKey{i, j + 1, 0},
                                           EdgeKey{i, j, 1}};
        std::array<int, 4> cut{};
        int n = 0;
        for (int k = 0; k < 4; ++k) {
          if (below[k] != below[(k + 1) % 4]) cut[n++] = k;
        }
        if (n == 2) {
          add_segment(edges[cut[0]], edges[cut[1]]);
        } else if (n == 4) {
          const bool center_below = 0.25 * (v[0] + v[1] + v[2] + v[3]) < level_;
          if (center_below == below[0]) {
            // corners 0 and 2 connect through the center; isolate 1 and 3
            add_segment(edges[0], edges[1]);
            add_segment(edges[2], edges[3]);
          } else {
            add_segment(edges[3], edges[0]);
            add_segment(edges[1], edges[2]);
          }
        }
      }
    }
  }

  std::vector<Polyline> chain() {
    std::vector<Polyline> out;
    std::vector<bool> used(segments_.size(), false);
    auto walk = [&](std::size_t start_point, std::size_t first_segment) {
      Polyline line;
      line.vertices.push_back(points_.at(start_point));
      std::size_t point = start_point;
      std::size_t seg = first_segment;
      while (!used[seg]) {
        used[seg] = true;
        const auto& s = segments_[seg];
        point = s[0] == point ? s[1] : s[0];
        if (point == start_point) {
          line.closed = true;
          break;
        }
        line.vertices.push_back(points_.at(point));
        const auto& adj = adjacency_.at(point);
        const auto next = std::find_if(adj.begin(), adj.end(), [&](std::size_t k) { return !used[k]; });
        if (next == adj.end()) break;
        seg = *next;
      }
      return line;
    };
    // Open chains start at a crossing with a single segment (box boundary).
    std::vector<std::size_t> ends;
    for (const auto& [pt, adj] : adjacency_) {
      if (adj.size() == 1) ends.push_back(pt);
    }
    std::sort(ends.begin(), ends.end());
    for (std::size_t pt : ends) {
      const std::size_t seg = adjacency_.at(pt).front();
      if (!used[seg]) out.push_back(walk(pt, seg));
    }
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      if (!used[s]) out.push_back(walk(segments_[s][0], s));
    }
    return out;
  }

  const LandscapeGrid& g_;
  double level_;
  std::vector<std::array<std::size_t, 2>> segments_;
  std::unordered_map<std::size_t, Eigen::Vector2d> points_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> adjacency_;
};

}  // namespace

ContourSet contours(const LandscapeGrid& grid, std::span<const double> levels) {
  ContourSet set;
  for (double level : levels) {
    if (!(level > 0.0)) throw std::invalid_argument("contour levels must be positive");
    set.levels.push_back(level);
    set.lines.push_back(ContourTracer(grid, level).trace());
  }
  return set;
}

bool polygon_contains(const Polyline& loop, const Eigen::Vector2d& p) {
  bool inside = false;
  const auto& v = loop.vertices;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
      const double x = v[j].x() + (p.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace cpg
