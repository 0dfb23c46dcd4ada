// SPDX-License-Identifier: MIT

#include "sixdof/kdtree.h"

#include <algorithm>
#include <numeric>

namespace sixdof {
namespace {
constexpr int kLeafSize = 8;
}  // namespace

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, static_cast<int>(points_.size()));
  }
}

int KdTree::build(int begin, int end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, -1, -1, 0.0});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = points_[order_[begin]], hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];
  const int left = build(begin, mid);
  const int right = build(mid, end);
  Node& n = nodes_[id];
  n.axis = axis;
  n.split = split;
  n.left = left;
  n.right = right;
  return id;
}

void KdTree::search(int node, const Vec3& q, Hit& best) const {
  const Node& n = nodes_[node];
  if (n.axis < 0) {
    for (int i = n.begin; i < n.end; ++i) {
      const double d = (points_[order_[i]] - q).squaredNorm();
      if (d < best.distance_sq || (d == best.distance_sq && order_[i] < best.index)) {
        best.distance_sq = d;
        best.index = order_[i];
      }
    }
    return;
  }
  const double diff = q[n.axis] - n.split;
  const int near = diff < 0.0 ? n.left : n.right;
  const int far = diff < 0.0 ? n.right : n.left;
  search(near, q, best);
  if (diff * diff <= best.distance_sq) search(far, q, best);
}

KdTree::Hit KdTree::nearest(const Vec3& query, double max_distance) const {
  Hit best;
  if (nodes_.empty()) return best;
  best.distance_sq = max_distance * max_distance;
  search(0, query, best);
  if (best.index < 0) best.distance_sq = std::numeric_limits<double>::infinity();
  return best;
}

}  // namespace sixdof
