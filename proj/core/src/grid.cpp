#include "grushin/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace grushin {

Grid::Grid(double lo1, double hi1, double lo2, double hi2, std::size_t n1, std::size_t n2)
    : lo1_(lo1), hi1_(hi1), lo2_(lo2), hi2_(hi2), n1_(n1), n2_(n2) {
  if (n1 < 3 || n2 < 3) throw DomainError("grid needs at least 3 nodes per axis");
  if (!(hi1 > lo1) || !(hi2 > lo2) || !std::isfinite(hi1 - lo1) || !std::isfinite(hi2 - lo2)) {
    throw DomainError("grid bounds must be finite with positive extent");
  }
}

Grid Grid::centered(Point c, double half1, double half2, std::size_t n1, std::size_t n2) {
  return Grid(c.x1 - half1, c.x1 + half1, c.x2 - half2, c.x2 + half2, n1, n2);
}

Point Grid::node(std::size_t i, std::size_t j) const {
  // fraction first, so symmetric grids put their middle node exactly at the center
  const double t1 = static_cast<double>(i) / static_cast<double>(n1_ - 1);
  const double t2 = static_cast<double>(j) / static_cast<double>(n2_ - 1);
  const double x1 = i + 1 == n1_ ? hi1_ : lo1_ + t1 * (hi1_ - lo1_);
  const double x2 = j + 1 == n2_ ? hi2_ : lo2_ + t2 * (hi2_ - lo2_);
  return {x1, x2};
}

std::vector<NodeTag> rectangle_tags(const Grid& grid) {
  std::vector<NodeTag> tags(grid.size(), NodeTag::Interior);
  for (std::size_t j = 0; j < grid.n2(); ++j) {
    for (std::size_t i = 0; i < grid.n1(); ++i) {
      if (grid.on_edge(i, j)) tags[grid.index(i, j)] = NodeTag::Boundary;
    }
  }
  return tags;
}

std::vector<NodeTag> region_tags(const Grid& grid, const std::function<bool(Point)>& inside) {
  std::vector<NodeTag> tags(grid.size(), NodeTag::Exterior);
  for (std::size_t j = 1; j + 1 < grid.n2(); ++j) {
    for (std::size_t i = 1; i + 1 < grid.n1(); ++i) {
      if (inside(grid.node(i, j))) tags[grid.index(i, j)] = NodeTag::Interior;
    }
  }
  for (std::size_t j = 0; j < grid.n2(); ++j) {
    for (std::size_t i = 0; i < grid.n1(); ++i) {
      if (tags[grid.index(i, j)] != NodeTag::Interior) continue;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const std::size_t k = grid.index(i + di, j + dj);
          if (tags[k] == NodeTag::Exterior) tags[k] = NodeTag::Boundary;
        }
      }
    }
  }
  return tags;
}

GridFunction::GridFunction(const Grid& g, double fill)
    : grid(g), values(g.size(), fill), tags(rectangle_tags(g)) {}

GridFunction::GridFunction(const Grid& g, std::vector<double> v, std::vector<NodeTag> t)
    : grid(g), values(std::move(v)), tags(std::move(t)) {
  if (values.size() != grid.size() || tags.size() != grid.size()) {
    throw DomainError("grid function size does not match its grid");
  }
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(Point)>& f) {
  return sample(g, f, rectangle_tags(g));
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(Point)>& f,
                                  std::vector<NodeTag> tags) {
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) v[k] = f(g.node(k));
  return GridFunction(g, std::move(v), std::move(tags));
}

void write_csv(std::ostream& out, const GridFunction& u) {
  out << "x1,x2,value\n" << std::setprecision(17);
  for (std::size_t j = 0; j < u.grid.n2(); ++j) {
    for (std::size_t i = 0; i < u.grid.n1(); ++i) {
      const Point x = u.grid.node(i, j);
      out << x.x1 << ',' << x.x2 << ',' << u(i, j) << '\n';
    }
  }
}

void write_csv(const std::string& path, const GridFunction& u) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_csv(out, u);
}

GridFunction read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("empty grid csv");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "x1,x2,value") throw DomainError("grid csv header must be x1,x2,value");
  std::vector<std::array<double, 3>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    std::array<double, 3> r{};
    char c1 = 0, c2 = 0;
    if (!(fields >> r[0] >> c1 >> r[1] >> c2 >> r[2]) || c1 != ',' || c2 != ',') {
      throw DomainError("malformed grid csv row: " + line);
    }
    rows.push_back(r);
  }
  // rows are ordered x2-major, so the first row change in x2 gives n1
  std::size_t n1 = 0;
  while (n1 < rows.size() && rows[n1][1] == rows[0][1]) ++n1;
  if (n1 == 0 || rows.size() % n1 != 0) throw DomainError("grid csv is not a full lattice");
  const std::size_t n2 = rows.size() / n1;
  Grid grid(rows.front()[0], rows[n1 - 1][0], rows.front()[1], rows.back()[1], n1, n2);
  std::vector<double> v(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) v[k] = rows[k][2];
  return GridFunction(grid, std::move(v), rectangle_tags(grid));
}

GridFunction read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_csv(in);
}

}  // namespace grushin
