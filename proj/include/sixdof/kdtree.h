// SPDX-License-Identifier: MIT

#ifndef SIXDOF_KDTREE_H_
#define SIXDOF_KDTREE_H_

#include <cstdint>
#include <limits>
#include <vector>

#include "sixdof/pose.h"

namespace sixdof {

// Static 3D k-d tree for nearest-neighbour queries. Immutable after
// construction and safe to query from several threads.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points);

  struct Hit {
    int index = -1;  // -1 when nothing lies within the search radius
    double distance_sq = std::numeric_limits<double>::infinity();
  };

  Hit nearest(const Vec3& query,
              double max_distance = std::numeric_limits<double>::infinity()) const;

  std::size_t size() const { return points_.size(); }
  const Vec3& point(int index) const { return points_[static_cast<std::size_t>(index)]; }

 private:
  struct Node {
    int begin = 0, end = 0;  // range into order_ for leaves
    int left = -1, right = -1;
    int axis = -1;           // -1 marks a leaf
    double split = 0.0;
  };

  int build(int begin, int end);
  void search(int node, const Vec3& q, Hit& best) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace sixdof

#endif  // SIXDOF_KDTREE_H_
