#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mtlkd/nk/tensor.hpp"

namespace mtlkd::nk {

struct Parameter {
  std::string name;
  Tensor value;
};

// Named, ordered collection of trainable tensors owned by a model.
class ParameterStore {
 public:
  int add(std::string name, Tensor init);
  int find(const std::string& name) const;  // -1 if absent

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }
  std::vector<Parameter>& all() { return params_; }
  const std::vector<Parameter>& all() const { return params_; }
  std::size_t scalar_count() const;

  // Same names and shapes, in the same order.
  bool same_layout(const ParameterStore& other) const;

 private:
  std::vector<Parameter> params_;
};

// One gradient tensor per parameter of a store, zero where unused.
using Gradients = std::vector<Tensor>;

Gradients zero_gradients(const ParameterStore& store);
void accumulate(Gradients& into, const Gradients& g, Real weight = Real(1));

class Tape;

// Handle to a value recorded on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

// Reverse-mode tape. Nodes are appended in evaluation order, which is a
// topological order, so backward() walks them once in reverse. A tape is
// single-threaded; independent tapes may run concurrently.
//
// With `record == false` values are computed but no backward closures are
// kept (inference mode).
class Tape {
 public:
  using Backward = std::function<void(Tape&, int self)>;

  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }

  Var constant(Tensor value);
  // Leaf bound to store[index]; repeated calls return the same node.
  Var param(const ParameterStore& store, int index);

  // Appends an op node. `inputs` decide whether the node needs a gradient;
  // the closure is dropped when none does or the tape does not record.
  Var push(Tensor value, std::initializer_list<Var> inputs, Backward backward);
  Var push(Tensor value, const std::vector<Var>& inputs, Backward backward);

  const Tensor& value(int id) const { return nodes_[id].value; }
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }
  // Gradient buffer of a node, allocated (zeroed) on first access.
  Tensor& grad(int id);
  const Tensor* grad_if_any(int id) const;

  // Runs backward from a scalar loss and returns gradients for `store`.
  // Throws std::invalid_argument for a non-scalar loss.
  Gradients backward(Var loss, const ParameterStore& store);

  std::size_t node_count() const { return nodes_.size(); }
  // Drops every node created after `count`. Only allowed when not recording;
  // vars referring to dropped nodes become invalid.
  void truncate(std::size_t count);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Backward backward;
    bool needs_grad = false;
  };

  void run_backward(Var loss);

  bool record_;
  std::vector<Node> nodes_;
  std::map<std::pair<const ParameterStore*, int>, int> param_nodes_;
};

}  // namespace mtlkd::nk
