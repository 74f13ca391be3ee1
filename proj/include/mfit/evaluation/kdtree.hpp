/*
 * mfit - Landmark-driven 3D Morphable Model fitting in modern C++.
 *
 * File: include/mfit/evaluation/kdtree.hpp
 *
 * Copyright 2026 The mfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef MFIT_EVALUATION_KDTREE_HPP
#define MFIT_EVALUATION_KDTREE_HPP

#include "mfit/core/types.hpp"

#include "Eigen/Core"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace mfit {
namespace evaluation {

/// Static 3D k-d tree for exact nearest-neighbour queries.
class KdTree
{
public:
    struct Neighbor
    {
        int index = -1;
        double squared_distance = std::numeric_limits<double>::infinity();
    };

    explicit KdTree(Eigen::Matrix3Xd points) : points_(std::move(points))
    {
        if (points_.cols() == 0)
            throw InvalidInput("cannot build a k-d tree over an empty point set");
        std::vector<int> order(static_cast<std::size_t>(points_.cols()));
        std::iota(order.begin(), order.end(), 0);
        nodes_.reserve(order.size());
        root_ = build(order, 0, static_cast<int>(order.size()), 0);
    }

    Neighbor nearest(const Eigen::Vector3d& query) const
    {
        Neighbor best;
        search(root_, query, best);
        return best;
    }

    const Eigen::Matrix3Xd& points() const { return points_; }

private:
    struct Node
    {
        int point;
        int axis;
        int left;
        int right;
    };

    int build(std::vector<int>& order, int begin, int end, int depth)
    {
        if (begin >= end)
            return -1;
        const int axis = depth % 3;
        const int mid = begin + (end - begin) / 2;
        std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end, [&](int a, int b) {
            return points_(axis, a) < points_(axis, b) || (points_(axis, a) == points_(axis, b) && a < b);
        });
        const int node = static_cast<int>(nodes_.size());
        nodes_.push_back({order[mid], axis, -1, -1});
        const int left = build(order, begin, mid, depth + 1);
        const int right = build(order, mid + 1, end, depth + 1);
        nodes_[node].left = left;
        nodes_[node].right = right;
        return node;
    }

    void search(int node, const Eigen::Vector3d& query, Neighbor& best) const
    {
        if (node < 0)
            return;
        const Node& n = nodes_[node];
        const double d2 = (points_.col(n.point) - query).squaredNorm();
        if (d2 < best.squared_distance || (d2 == best.squared_distance && n.point < best.index))
            best = {n.point, d2};
        const double diff = query(n.axis) - points_(n.axis, n.point);
        const int near = diff < 0.0 ? n.left : n.right;
        const int far = diff < 0.0 ? n.right : n.left;
        search(near, query, best);
        if (diff * diff <= best.squared_distance)
            search(far, query, best);
    }

    Eigen::Matrix3Xd points_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

} /* namespace evaluation */
} /* namespace mfit */

#endif /* MFIT_EVALUATION_KDTREE_HPP */
