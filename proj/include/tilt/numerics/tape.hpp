#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tilt/numerics/tensor.hpp"

namespace tilt {

// A named trainable tensor. Gradients accumulate across examples until the
// optimizer consumes them.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)) {}

  void ensure_grad() {
    if (!grad.defined() || !grad.same_shape(value)) grad = Tensor::zeros(value.shape());
  }
  void zero_grad() {
    if (grad.defined()) grad.fill(0);
  }
};

// Reverse-mode tape. Nodes are appended in execution order, which is a
// topological order by construction; backward() sweeps once from the loss
// node down to node 0, so each node is visited exactly once.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, int)>;

  int push(Tensor value, std::vector<int> parents, BackwardFn backward);
  int leaf(Tensor value);          // constant input, no gradient tracking
  int param(Parameter& p);         // gradient flushed into p.grad after backward

  const Tensor& val(int id) const { return nodes_[static_cast<size_t>(id)].value; }
  bool has_grad(int id) const { return nodes_[static_cast<size_t>(id)].grad.defined(); }
  // Gradient buffer, allocated zero on first touch.
  Tensor& grad(int id);

  // Seeds d(loss)/d(loss) = seed and propagates. loss must be a scalar.
  void backward(int loss_id, real seed = real(1));

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<int> parents;
    BackwardFn backward;
    Parameter* param = nullptr;
  };
  std::vector<Node> nodes_;
};

}  // namespace tilt
