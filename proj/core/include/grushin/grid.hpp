#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "grushin/geometry.hpp"

namespace grushin {

/// Uniform rectangular lattice [lo1, hi1] x [lo2, hi2] with n1 x n2 nodes.
/// Node k = j * n1 + i sits at (lo1 + i h1, lo2 + j h2).
class Grid {
 public:
  Grid(double lo1, double hi1, double lo2, double hi2, std::size_t n1, std::size_t n2);

  /// Grid centered at c with the given half-widths.
  static Grid centered(Point c, double half1, double half2, std::size_t n1, std::size_t n2);

  double lo1() const { return lo1_; }
  double hi1() const { return hi1_; }
  double lo2() const { return lo2_; }
  double hi2() const { return hi2_; }
  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  std::size_t size() const { return n1_ * n2_; }
  double h1() const { return (hi1_ - lo1_) / static_cast<double>(n1_ - 1); }
  double h2() const { return (hi2_ - lo2_) / static_cast<double>(n2_ - 1); }
  double cell_area() const { return h1() * h2(); }

  std::size_t index(std::size_t i, std::size_t j) const { return j * n1_ + i; }
  std::size_t column(std::size_t k) const { return k % n1_; }
  std::size_t row(std::size_t k) const { return k / n1_; }
  Point node(std::size_t i, std::size_t j) const;
  Point node(std::size_t k) const { return node(column(k), row(k)); }
  bool on_edge(std::size_t i, std::size_t j) const {
    return i == 0 || j == 0 || i + 1 == n1_ || j + 1 == n2_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double lo1_, hi1_, lo2_, hi2_;
  std::size_t n1_, n2_;
};

/// Interior nodes carry unknowns; boundary nodes carry Dirichlet data and
/// touch the interior; exterior nodes are ignored by the solver.
enum class NodeTag : std::uint8_t { Interior, Boundary, Exterior };

/// Edge nodes are boundary, all others interior.
std::vector<NodeTag> rectangle_tags(const Grid& grid);

/// Interior: inside the predicate and off the grid edge. Boundary: any other
/// node among the 8 neighbours of an interior node.
std::vector<NodeTag> region_tags(const Grid& grid, const std::function<bool(Point)>& inside);

/// Node values with a tag per node.
struct GridFunction {
  Grid grid;
  std::vector<double> values;
  std::vector<NodeTag> tags;

  explicit GridFunction(const Grid& g, double fill = 0.0);
  GridFunction(const Grid& g, std::vector<double> v, std::vector<NodeTag> t);

  /// Samples f at every node; tags default to `rectangle_tags`.
  static GridFunction sample(const Grid& g, const std::function<double(Point)>& f);
  static GridFunction sample(const Grid& g, const std::function<double(Point)>& f,
                             std::vector<NodeTag> tags);

  double& operator()(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
  std::size_t size() const { return values.size(); }
};

/// Header `x1,x2,value`; rows with x2 in the outer loop and x1 inner.
void write_csv(std::ostream& out, const GridFunction& u);
void write_csv(const std::string& path, const GridFunction& u);
GridFunction read_csv(std::istream& in);
GridFunction read_csv(const std::string& path);

}  // namespace grushin
