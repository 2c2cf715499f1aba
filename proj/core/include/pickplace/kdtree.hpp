#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pickplace/geom3.hpp"

namespace pickplace {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

// Balanced 3D index over a copy of the input points. Results are identical
// to an exhaustive scan, with ties broken by the lowest point index.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::span<const Vec3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

  /// Throws EmptyTree.
  Neighbor nearest(const Vec3& query) const;

  /// Up to k neighbors sorted by (distance, index).
  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const;

 private:
  struct Node {
    std::uint32_t begin = 0, end = 0;  // range in order_
    std::int32_t left = -1, right = -1;
    double split = 0.0;
    int axis = -1;  // -1 for leaves
  };

  static constexpr std::uint32_t kLeafSize = 8;

  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace pickplace
