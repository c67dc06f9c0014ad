// Lower convex hull of a height field by incremental 3-d quickhull.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "grushin/abp.hpp"

namespace grushin {

namespace {

struct Vec3 {
  double x, y, z;
};

Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

struct Face {
  std::array<int, 3> v{};
  std::array<int, 3> nb{-1, -1, -1};  // across edge (v[e], v[e+1])
  Vec3 n{};
  double d = 0.0;
  std::vector<int> outside;
  bool alive = true;
  int mark = 0;
};

class QuickHull {
 public:
  QuickHull(std::vector<Vec3> pts, double eps) : p_(std::move(pts)), eps_(eps) {}

  void build(std::array<int, 4> seed) {
    Vec3 c{0, 0, 0};
    for (int s : seed) c = {c.x + p_[s].x / 4, c.y + p_[s].y / 4, c.z + p_[s].z / 4};
    interior_ = c;
    const std::array<std::array<int, 3>, 4> tris{{{seed[0], seed[1], seed[2]},
                                                  {seed[0], seed[1], seed[3]},
                                                  {seed[0], seed[2], seed[3]},
                                                  {seed[1], seed[2], seed[3]}}};
    for (auto t : tris) {
      Face f;
      f.v = t;
      plane(f);
      if (dot(f.n, interior_) - f.d > 0.0) {
        std::swap(f.v[1], f.v[2]);
        plane(f);
      }
      faces_.push_back(f);
    }
    link_all();
    std::vector<int> rest;
    for (int k = 0; k < static_cast<int>(p_.size()); ++k) {
      if (std::find(seed.begin(), seed.end(), k) == seed.end()) rest.push_back(k);
    }
    assign(rest, {0, 1, 2, 3});

    for (std::size_t f = 0; f < faces_.size(); ++f) {
      while (faces_[f].alive && !faces_[f].outside.empty()) expand(static_cast<int>(f));
    }
  }

  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Vec3>& points() const { return p_; }

 private:
  void plane(Face& f) {
    const Vec3 a = p_[f.v[0]], b = p_[f.v[1]], c = p_[f.v[2]];
    Vec3 n = cross(b - a, c - a);
    const double len = std::sqrt(dot(n, n));
    if (len > 0.0) n = {n.x / len, n.y / len, n.z / len};
    f.n = n;
    f.d = dot(n, a);
  }

  double dist(const Face& f, int k) const { return dot(f.n, p_[k]) - f.d; }

  void link_all() {
    for (std::size_t a = 0; a < faces_.size(); ++a) {
      for (int e = 0; e < 3; ++e) {
        const int u = faces_[a].v[e], w = faces_[a].v[(e + 1) % 3];
        for (std::size_t b = 0; b < faces_.size(); ++b) {
          if (a == b) continue;
          for (int g = 0; g < 3; ++g) {
            if (faces_[b].v[g] == w && faces_[b].v[(g + 1) % 3] == u) {
              faces_[a].nb[e] = static_cast<int>(b);
            }
          }
        }
      }
    }
  }

  void assign(const std::vector<int>& pts, const std::vector<int>& targets) {
    for (int k : pts) {
      int best = -1;
      double far = eps_;
      for (int f : targets) {
        const double dd = dist(faces_[f], k);
        if (dd > far) {
          far = dd;
          best = f;
        }
      }
      if (best >= 0) faces_[best].outside.push_back(k);
    }
  }

  void expand(int start) {
    Face& s = faces_[start];
    int apex = s.outside.front();
    double far = dist(s, apex);
    for (int k : s.outside) {
      const double dd = dist(s, k);
      if (dd > far) {
        far = dd;
        apex = k;
      }
    }

    // visible region and its horizon, by depth-first search from `start`
    ++stamp_;
    std::vector<int> visible;
    std::vector<std::pair<int, int>> horizon;  // (face, edge) on the visible side
    std::vector<std::pair<int, int>> stack{{start, 0}};
    faces_[start].mark = stamp_;
    visible.push_back(start);
    while (!stack.empty()) {
      auto& [f, e] = stack.back();
      if (e == 3) {
        stack.pop_back();
        continue;
      }
      const int edge = e++;
      const int g = faces_[f].nb[edge];
      if (faces_[g].mark == stamp_) continue;
      if (dist(faces_[g], apex) > eps_) {
        faces_[g].mark = stamp_;
        visible.push_back(g);
        stack.emplace_back(g, 0);
      } else {
        horizon.emplace_back(f, edge);
      }
    }

    std::vector<int> orphans;
    for (int f : visible) {
      faces_[f].alive = false;
      for (int k : faces_[f].outside) {
        if (k != apex) orphans.push_back(k);
      }
      faces_[f].outside.clear();
      faces_[f].outside.shrink_to_fit();
    }

    std::unordered_map<int, int> by_start;
    std::vector<int> created;
    for (auto [f, e] : horizon) {
      const int a = faces_[f].v[e], b = faces_[f].v[(e + 1) % 3];
      const int across = faces_[f].nb[e];
      Face nf;
      nf.v = {a, b, apex};
      plane(nf);
      nf.nb[0] = across;
      const int id = static_cast<int>(faces_.size());
      for (int g = 0; g < 3; ++g) {
        if (faces_[across].nb[g] == f) faces_[across].nb[g] = id;
      }
      if (!by_start.emplace(a, id).second) {
        throw std::runtime_error("lower hull: horizon is not a simple cycle");
      }
      faces_.push_back(nf);
      created.push_back(id);
    }
    for (int id : created) {
      Face& nf = faces_[id];
      const auto next = by_start.find(nf.v[1]);
      if (next == by_start.end()) throw std::runtime_error("lower hull: open horizon");
      nf.nb[1] = next->second;
      faces_[next->second].nb[2] = id;
    }
    assign(orphans, created);
  }

  std::vector<Vec3> p_;
  std::vector<Face> faces_;
  Vec3 interior_{};
  double eps_;
  int stamp_ = 0;
};

}  // namespace

std::vector<double> lower_convex_envelope(const Grid& grid, const std::vector<double>& f) {
  if (f.size() != grid.size()) throw DomainError("data size does not match grid");
  const std::size_t n1 = grid.n1(), n2 = grid.n2();
  double zmax = 0.0, zmin = 0.0, zs = 0.0;
  for (double v : f) {
    if (!std::isfinite(v)) throw DomainError("envelope data must be finite");
    zs = std::max(zs, std::abs(v));
  }
  if (zs == 0.0) return std::vector<double>(f.size(), 0.0);

  std::vector<Vec3> pts(grid.size() + 1);
  for (std::size_t j = 0; j < n2; ++j) {
    for (std::size_t i = 0; i < n1; ++i) {
      const std::size_t k = grid.index(i, j);
      const double z = f[k] / zs;
      pts[k] = {static_cast<double>(i) / static_cast<double>(n1 - 1),
                static_cast<double>(j) / static_cast<double>(n2 - 1), z};
      zmax = std::max(zmax, z);
      zmin = std::min(zmin, z);
    }
  }
  // an apex high above the middle closes the hull without touching its lower part
  const int apex = static_cast<int>(grid.size());
  pts[apex] = {0.5, 0.5, zmax + 10.0 * (1.0 + zmax - zmin)};
  const int c00 = static_cast<int>(grid.index(0, 0));
  const int c10 = static_cast<int>(grid.index(n1 - 1, 0));
  const int c01 = static_cast<int>(grid.index(0, n2 - 1));

  QuickHull hull(std::move(pts), 1e-12);
  hull.build({apex, c00, c10, c01});

  const auto& P = hull.points();
  std::vector<double> out(grid.size(), -std::numeric_limits<double>::infinity());
  std::vector<const Face*> lower;
  for (const Face& face : hull.faces()) {
    if (face.alive && face.n.z < -1e-12) lower.push_back(&face);
  }
  auto plane_value = [](const Face& face, double x, double y) {
    return (face.d - face.n.x * x - face.n.y * y) / face.n.z;
  };
  for (const Face* face : lower) {
    const Vec3 a = P[face->v[0]], b = P[face->v[1]], c = P[face->v[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if (std::abs(det) < 1e-300) continue;
    const auto lo_i = static_cast<std::size_t>(std::floor(std::min({a.x, b.x, c.x}) * (n1 - 1) + 1e-9));
    const auto hi_i = static_cast<std::size_t>(std::ceil(std::max({a.x, b.x, c.x}) * (n1 - 1) - 1e-9));
    const auto lo_j = static_cast<std::size_t>(std::floor(std::min({a.y, b.y, c.y}) * (n2 - 1) + 1e-9));
    const auto hi_j = static_cast<std::size_t>(std::ceil(std::max({a.y, b.y, c.y}) * (n2 - 1) - 1e-9));
    for (std::size_t j = lo_j; j <= std::min(hi_j, n2 - 1); ++j) {
      for (std::size_t i = lo_i; i <= std::min(hi_i, n1 - 1); ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n1 - 1);
        const double y = static_cast<double>(j) / static_cast<double>(n2 - 1);
        const double l1 = ((b.x - x) * (c.y - y) - (c.x - x) * (b.y - y)) / det;
        const double l2 = ((c.x - x) * (a.y - y) - (a.x - x) * (c.y - y)) / det;
        const double l3 = 1.0 - l1 - l2;
        if (l1 < -1e-9 || l2 < -1e-9 || l3 < -1e-9) continue;
        const std::size_t k = grid.index(i, j);
        out[k] = std::max(out[k], plane_value(*face, x, y));
      }
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!std::isfinite(out[k])) {
      // not covered by any projected face: fall back to the supremum of all supporting planes
      const double x = P[k].x, y = P[k].y;
      for (const Face* face : lower) out[k] = std::max(out[k], plane_value(*face, x, y));
    }
    out[k] = std::min(out[k] * zs, f[k]);
  }
  return out;
}

}  // namespace grushin
