#include "tilt/numerics/tape.hpp"

namespace tilt {

int Tape::push(Tensor value, std::vector<int> parents, BackwardFn backward) {
  TILT_CHECK(value.all_finite(), "non-finite value produced at tape node " << nodes_.size());
  Node n;
  n.value = std::move(value);
  n.parents = std::move(parents);
  n.backward = std::move(backward);
  for (int p : n.parents) {
    TILT_CHECK(p >= 0 && p < size(), "parent id " << p << " out of range");
  }
  nodes_.push_back(std::move(n));
  return size() - 1;
}

int Tape::leaf(Tensor value) { return push(std::move(value), {}, nullptr); }

int Tape::param(Parameter& p) {
  int id = push(p.value, {}, nullptr);
  nodes_.back().param = &p;
  return id;
}

Tensor& Tape::grad(int id) {
  Node& n = nodes_[static_cast<size_t>(id)];
  if (!n.grad.defined()) n.grad = Tensor::zeros(n.value.shape());
  return n.grad;
}

void Tape::backward(int loss_id, real seed) {
  TILT_CHECK(loss_id >= 0 && loss_id < size(), "loss id out of range");
  TILT_CHECK(nodes_[static_cast<size_t>(loss_id)].value.size() == 1,
             "backward requires a scalar loss, got size "
                 << nodes_[static_cast<size_t>(loss_id)].value.size());
  grad(loss_id)[0] += seed;
  for (int id = loss_id; id >= 0; --id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (!n.grad.defined()) continue;  // no path from the loss
    if (n.backward) n.backward(*this, id);
    if (n.param) {
      n.param->ensure_grad();
      real* pg = n.param->grad.data();
      const real* g = n.grad.data();
      for (int64_t i = 0; i < n.grad.size(); ++i) pg[i] += g[i];
    }
  }
}

}  // namespace tilt
