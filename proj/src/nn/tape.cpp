// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/nn/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace thzmesh::nn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

NodeId Tape::push(Node&& n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

const Tensor& Tape::value(NodeId id) const { return node(id).value; }

NodeId Tape::constant(const Tensor& value) {
  Node n;
  n.op = Op::constant;
  n.value = value;
  return push(std::move(n));
}

NodeId Tape::param(Tensor& bound) {
  Node n;
  n.op = Op::param;
  n.value = bound;
  n.bound = &bound;
  return push(std::move(n));
}

NodeId Tape::matmul(NodeId a, NodeId b) {
  const Tensor& A = node(a).value;
  const Tensor& B = node(b).value;
  require(A.cols == B.rows, "tape: matmul shape mismatch");
  Node n;
  n.op = Op::matmul;
  n.a = a;
  n.b = b;
  n.value = Tensor(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i) {
    for (int k = 0; k < A.cols; ++k) {
      const double av = A.at(i, k);
      if (av == 0.0) continue;
      for (int j = 0; j < B.cols; ++j) {
        n.value.at(i, j) += av * B.at(k, j);
      }
    }
  }
  return push(std::move(n));
}

NodeId Tape::add(NodeId a, NodeId b) {
  const Tensor& A = node(a).value;
  const Tensor& B = node(b).value;
  require(A.rows == B.rows && A.cols == B.cols, "tape: add shape mismatch");
  Node n;
  n.op = Op::add;
  n.a = a;
  n.b = b;
  n.value = A;
  for (int i = 0; i < A.numel(); ++i) n.value.data[static_cast<std::size_t>(i)] += B.data[static_cast<std::size_t>(i)];
  return push(std::move(n));
}

NodeId Tape::add_rowvec(NodeId m, NodeId row) {
  const Tensor& M = node(m).value;
  const Tensor& R = node(row).value;
  require(R.rows == 1 && R.cols == M.cols, "tape: row vector shape mismatch");
  Node n;
  n.op = Op::add_rowvec;
  n.a = m;
  n.b = row;
  n.value = M;
  for (int i = 0; i < M.rows; ++i)
    for (int j = 0; j < M.cols; ++j) n.value.at(i, j) += R.at(0, j);
  return push(std::move(n));
}

NodeId Tape::mul(NodeId a, NodeId b) {
  const Tensor& A = node(a).value;
  const Tensor& B = node(b).value;
  require(A.rows == B.rows && A.cols == B.cols, "tape: mul shape mismatch");
  Node n;
  n.op = Op::mul;
  n.a = a;
  n.b = b;
  n.value = A;
  for (int i = 0; i < A.numel(); ++i) n.value.data[static_cast<std::size_t>(i)] *= B.data[static_cast<std::size_t>(i)];
  return push(std::move(n));
}

NodeId Tape::scale_rows(NodeId m, NodeId col) {
  const Tensor& M = node(m).value;
  const Tensor& C = node(col).value;
  require(C.cols == 1 && C.rows == M.rows, "tape: column vector shape mismatch");
  Node n;
  n.op = Op::scale_rows;
  n.a = m;
  n.b = col;
  n.value = M;
  for (int i = 0; i < M.rows; ++i)
    for (int j = 0; j < M.cols; ++j) n.value.at(i, j) *= C.at(i, 0);
  return push(std::move(n));
}

NodeId Tape::relu(NodeId a) {
  Node n;
  n.op = Op::relu;
  n.a = a;
  n.value = node(a).value;
  for (double& v : n.value.data)
    if (v < 0.0) v = 0.0;
  return push(std::move(n));
}

NodeId Tape::tanh_(NodeId a) {
  Node n;
  n.op = Op::tanh_act;
  n.a = a;
  n.value = node(a).value;
  for (double& v : n.value.data) v = std::tanh(v);
  return push(std::move(n));
}

NodeId Tape::softmax_rows(NodeId a) {
  const Tensor& A = node(a).value;
  Node n;
  n.op = Op::softmax_rows;
  n.a = a;
  n.value = A;
  for (int i = 0; i < A.rows; ++i) {
    double mx = n.value.at(i, 0);
    for (int j = 1; j < A.cols; ++j) mx = std::max(mx, n.value.at(i, j));
    double sum = 0.0;
    for (int j = 0; j < A.cols; ++j) {
      const double e = std::exp(n.value.at(i, j) - mx);
      n.value.at(i, j) = e;
      sum += e;
    }
    for (int j = 0; j < A.cols; ++j) n.value.at(i, j) /= sum;
  }
  return push(std::move(n));
}

NodeId Tape::concat_cols(NodeId a, NodeId b) {
  const Tensor& A = node(a).value;
  const Tensor& B = node(b).value;
  require(A.rows == B.rows, "tape: concat row mismatch");
  Node n;
  n.op = Op::concat_cols;
  n.a = a;
  n.b = b;
  n.value = Tensor(A.rows, A.cols + B.cols);
  for (int i = 0; i < A.rows; ++i) {
    for (int j = 0; j < A.cols; ++j) n.value.at(i, j) = A.at(i, j);
    for (int j = 0; j < B.cols; ++j) n.value.at(i, A.cols + j) = B.at(i, j);
  }
  return push(std::move(n));
}

NodeId Tape::slice_cols(NodeId a, int lo, int hi) {
  const Tensor& A = node(a).value;
  require(0 <= lo && lo < hi && hi <= A.cols, "tape: slice out of range");
  Node n;
  n.op = Op::slice_cols;
  n.a = a;
  n.lo = lo;
  n.hi = hi;
  n.value = Tensor(A.rows, hi - lo);
  for (int i = 0; i < A.rows; ++i)
    for (int j = lo; j < hi; ++j) n.value.at(i, j - lo) = A.at(i, j);
  return push(std::move(n));
}

NodeId Tape::mean_rows(NodeId a) {
  const Tensor& A = node(a).value;
  Node n;
  n.op = Op::mean_rows;
  n.a = a;
  n.value = Tensor(1, A.cols);
  for (int j = 0; j < A.cols; ++j) {
    double sum = 0.0;
    for (int i = 0; i < A.rows; ++i) sum += A.at(i, j);
    n.value.at(0, j) = sum / static_cast<double>(A.rows);
  }
  return push(std::move(n));
}

NodeId Tape::sqdiff(NodeId a, double target) {
  const Tensor& A = node(a).value;
  require(A.numel() == 1, "tape: sqdiff needs a scalar node");
  Node n;
  n.op = Op::sqdiff;
  n.a = a;
  n.scalar = target;
  n.value = Tensor(1, 1);
  const double d = A.data[0] - target;
  n.value.data[0] = d * d;
  return push(std::move(n));
}

void Tape::backward(NodeId root) {
  require(root >= 0 && root < static_cast<NodeId>(nodes_.size()),
          "tape: bad root");
  require(node(root).value.numel() == 1, "tape: backward root must be scalar");

  for (auto& n : nodes_) n.grad.assign(n.value.data.size(), 0.0);
  node(root).grad[0] = 1.0;

  for (NodeId id = static_cast<NodeId>(nodes_.size()) - 1; id >= 0; --id) {
    Node& n = node(id);
    bool any = false;
    for (double g : n.grad) {
      if (g != 0.0) {
        any = true;
        break;
      }
    }
    if (!any) continue;

    switch (n.op) {
      case Op::constant:
        break;
      case Op::param:
        n.bound->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) n.bound->grad[i] += n.grad[i];
        break;
      case Op::matmul: {
        Node& A = node(n.a);
        Node& B = node(n.b);
        const int r = A.value.rows, inner = A.value.cols, c = B.value.cols;
        for (int i = 0; i < r; ++i) {
          for (int j = 0; j < c; ++j) {
            const double g = n.grad[static_cast<std::size_t>(i) * c + j];
            if (g == 0.0) continue;
            for (int k = 0; k < inner; ++k) {
              A.grad[static_cast<std::size_t>(i) * inner + k] += g * B.value.at(k, j);
              B.grad[static_cast<std::size_t>(k) * c + j] += g * A.value.at(i, k);
            }
          }
        }
        break;
      }
      case Op::add: {
        Node& A = node(n.a);
        Node& B = node(n.b);
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
          A.grad[i] += n.grad[i];
          B.grad[i] += n.grad[i];
        }
        break;
      }
      case Op::add_rowvec: {
        Node& A = node(n.a);
        Node& R = node(n.b);
        const int c = n.value.cols;
        for (int i = 0; i < n.value.rows; ++i) {
          for (int j = 0; j < c; ++j) {
            const double g = n.grad[static_cast<std::size_t>(i) * c + j];
            A.grad[static_cast<std::size_t>(i) * c + j] += g;
            R.grad[static_cast<std::size_t>(j)] += g;
          }
        }
        break;
      }
      case Op::mul: {
        Node& A = node(n.a);
        Node& B = node(n.b);
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
          A.grad[i] += n.grad[i] * B.value.data[i];
          B.grad[i] += n.grad[i] * A.value.data[i];
        }
        break;
      }
      case Op::scale_rows: {
        Node& A = node(n.a);
        Node& C = node(n.b);
        const int c = n.value.cols;
        for (int i = 0; i < n.value.rows; ++i) {
          const double cv = C.value.at(i, 0);
          double acc = 0.0;
          for (int j = 0; j < c; ++j) {
            const double g = n.grad[static_cast<std::size_t>(i) * c + j];
            A.grad[static_cast<std::size_t>(i) * c + j] += g * cv;
            acc += g * A.value.at(i, j);
          }
          C.grad[static_cast<std::size_t>(i)] += acc;
        }
        break;
      }
      case Op::relu: {
        Node& A = node(n.a);
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
          if (A.value.data[i] > 0.0) A.grad[i] += n.grad[i];
        }
        break;
      }
      case Op::tanh_act: {
        Node& A = node(n.a);
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
          const double y = n.value.data[i];
          A.grad[i] += n.grad[i] * (1.0 - y * y);
        }
        break;
      }
      case Op::softmax_rows: {
        Node& A = node(n.a);
        const int c = n.value.cols;
        for (int i = 0; i < n.value.rows; ++i) {
          double dot = 0.0;
          for (int j = 0; j < c; ++j) {
            dot += n.grad[static_cast<std::size_t>(i) * c + j] *
                   n.value.at(i, j);
          }
          for (int j = 0; j < c; ++j) {
            const double y = n.value.at(i, j);
            A.grad[static_cast<std::size_t>(i) * c + j] +=
                y * (n.grad[static_cast<std::size_t>(i) * c + j] - dot);
          }
        }
        break;
      }
      case Op::concat_cols: {
        Node& A = node(n.a);
        Node& B = node(n.b);
        const int ca = A.value.cols, cb = B.value.cols;
        for (int i = 0; i < n.value.rows; ++i) {
          for (int j = 0; j < ca; ++j)
            A.grad[static_cast<std::size_t>(i) * ca + j] +=
                n.grad[static_cast<std::size_t>(i) * (ca + cb) + j];
          for (int j = 0; j < cb; ++j)
            B.grad[static_cast<std::size_t>(i) * cb + j] +=
                n.grad[static_cast<std::size_t>(i) * (ca + cb) + ca + j];
        }
        break;
      }
      case Op::slice_cols: {
        Node& A = node(n.a);
        const int ca = A.value.cols, w = n.hi - n.lo;
        for (int i = 0; i < n.value.rows; ++i)
          for (int j = 0; j < w; ++j)
            A.grad[static_cast<std::size_t>(i) * ca + n.lo + j] +=
                n.grad[static_cast<std::size_t>(i) * w + j];
        break;
      }
      case Op::mean_rows: {
        Node& A = node(n.a);
        const int r = A.value.rows, c = A.value.cols;
        const double inv = 1.0 / static_cast<double>(r);
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < c; ++j)
            A.grad[static_cast<std::size_t>(i) * c + j] +=
                n.grad[static_cast<std::size_t>(j)] * inv;
        break;
      }
      case Op::sqdiff: {
        Node& A = node(n.a);
        A.grad[0] += n.grad[0] * 2.0 * (A.value.data[0] - n.scalar);
        break;
      }
    }
  }
}

}  // namespace thzmesh::nn
