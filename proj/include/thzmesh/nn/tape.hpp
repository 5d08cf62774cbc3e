// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "thzmesh/nn/tensor.hpp"

namespace thzmesh::nn {

using NodeId = int;

// Eager-forward, reverse-mode autodiff tape.
//
// Each operation computes its value immediately and records how to push
// gradients back to its inputs.  Nodes are stored in construction order,
// which is already a topological order, so the backward pass is a single
// reverse sweep.  Leaves created through param() accumulate their gradient
// into the bound Tensor's grad buffer.
class Tape {
 public:
  NodeId constant(const Tensor& value);
  NodeId param(Tensor& bound);  // copies the current value, routes grads back

  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);               // same shape
  NodeId add_rowvec(NodeId m, NodeId row);      // row is 1 x cols
  NodeId mul(NodeId a, NodeId b);               // elementwise, same shape
  NodeId scale_rows(NodeId m, NodeId col);      // col is rows x 1
  NodeId relu(NodeId a);
  NodeId tanh_(NodeId a);
  NodeId softmax_rows(NodeId a);
  NodeId concat_cols(NodeId a, NodeId b);
  NodeId slice_cols(NodeId a, int lo, int hi);  // [lo, hi)
  NodeId mean_rows(NodeId a);                   // 1 x cols
  NodeId sqdiff(NodeId a, double target);       // (a - target)^2 for 1 x 1

  const Tensor& value(NodeId id) const;

  // Seed d(root)/d(root) = 1 (root must be 1 x 1) and sweep the tape in
  // reverse, accumulating into every bound parameter's grad.
  void backward(NodeId root);

 private:
  enum class Op {
    constant,
    param,
    matmul,
    add,
    add_rowvec,
    mul,
    scale_rows,
    relu,
    tanh_act,
    softmax_rows,
    concat_cols,
    slice_cols,
    mean_rows,
    sqdiff,
  };

  struct Node {
    Op op;
    NodeId a = -1;
    NodeId b = -1;
    int lo = 0;          // slice bound / spare scalar slot
    int hi = 0;
    double scalar = 0.0; // sqdiff target
    Tensor value;
    std::vector<double> grad;
    Tensor* bound = nullptr;
  };

  NodeId push(Node&& n);
  Node& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }

  std::vector<Node> nodes_;
};

}  // namespace thzmesh::nn
