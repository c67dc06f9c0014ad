#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

#include "grushin/geometry.hpp"

namespace grushin {

CCLattice::CCLattice(BoxSpec b, double spacing, double floor_value)
    : bounds(b), h(spacing), eps_cc(floor_value) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("lattice spacing must be positive");
  if (eps_cc < 0.0 || eps_cc > h) throw DomainError("lattice floor must lie in (0, h]");
}

CCDistanceField::CCDistanceField(const CCLattice& lattice, Point source) : lattice_(lattice) {
  const double h = lattice_.h;
  // nodes sit at center + k h; the closed box is covered
  k1_ = static_cast<std::ptrdiff_t>(std::floor(lattice_.bounds.halfwidth(1) / h + 1e-9));
  k2_ = static_cast<std::ptrdiff_t>(std::floor(lattice_.bounds.halfwidth(2) / h + 1e-9));
  n1_ = static_cast<std::size_t>(2 * k1_ + 1);
  n2_ = static_cast<std::size_t>(2 * k2_ + 1);
  dist_.assign(n1_ * n2_, std::numeric_limits<double>::infinity());

  const auto [si, sj] = snap(source);
  const double floor = lattice_.floor();
  std::vector<double> vertical_cost(n1_);
  for (std::size_t i = 0; i < n1_; ++i) {
    vertical_cost[i] = h / std::max(std::abs(node(i, 0).x1), floor);
  }

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  const std::size_t start = sj * n1_ + si;
  dist_[start] = 0.0;
  queue.emplace(0.0, start);
  while (!queue.empty()) {
    const auto [d, k] = queue.top();
    queue.pop();
    if (d > dist_[k]) continue;
    const std::size_t i = k % n1_, j = k / n1_;
    auto relax = [&](std::size_t t, double w) {
      if (d + w < dist_[t]) {
        dist_[t] = d + w;
        queue.emplace(dist_[t], t);
      }
    };
    if (i > 0) relax(k - 1, h);
    if (i + 1 < n1_) relax(k + 1, h);
    if (j > 0) relax(k - n1_, vertical_cost[i]);
    if (j + 1 < n2_) relax(k + n1_, vertical_cost[i]);
  }
}

Point CCDistanceField::node(std::size_t i, std::size_t j) const {
  const Point c = lattice_.bounds.center;
  return {c.x1 + (static_cast<std::ptrdiff_t>(i) - k1_) * lattice_.h,
          c.x2 + (static_cast<std::ptrdiff_t>(j) - k2_) * lattice_.h};
}

std::pair<std::size_t, std::size_t> CCDistanceField::snap(Point x) const {
  if (!x.finite()) throw DomainError("lattice query must be finite");
  const Point c = lattice_.bounds.center;
  const double tol = 1e-9 * lattice_.h;
  if (std::abs(x.x1 - c.x1) > lattice_.bounds.halfwidth(1) + tol ||
      std::abs(x.x2 - c.x2) > lattice_.bounds.halfwidth(2) + tol) {
    throw DomainError("point lies outside the lattice box");
  }
  auto index = [&](double offset, std::ptrdiff_t k) {
    const auto i = static_cast<std::ptrdiff_t>(std::llround(offset / lattice_.h));
    return static_cast<std::size_t>(std::clamp(i, -k, k) + k);
  };
  return {index(x.x1 - c.x1, k1_), index(x.x2 - c.x2, k2_)};
}

double CCDistanceField::at(Point x) const {
  const auto [i, j] = snap(x);
  return dist_[j * n1_ + i];
}

double cc_distance(Point x, Point y, const CCLattice& lattice) {
  return CCDistanceField(lattice, x).at(y);
}

}  // namespace grushin
