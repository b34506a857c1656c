#include "mtlkd/nk/tape.hpp"

#include <stdexcept>

namespace mtlkd::nk {

int ParameterStore::add(std::string name, Tensor init) {
  if (find(name) >= 0) throw std::invalid_argument("duplicate parameter " + name);
  params_.push_back({std::move(name), std::move(init)});
  return static_cast<int>(params_.size()) - 1;
}

int ParameterStore::find(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

bool ParameterStore::same_layout(const ParameterStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name != other.params_[i].name ||
        !params_[i].value.same_shape(other.params_[i].value)) {
      return false;
    }
  }
  return true;
}

Gradients zero_gradients(const ParameterStore& store) {
  Gradients g;
  g.reserve(store.size());
  for (const auto& p : store.all()) g.emplace_back(p.value.rows(), p.value.cols());
  return g;
}

void accumulate(Gradients& into, const Gradients& g, Real weight) {
  if (into.size() != g.size()) throw std::invalid_argument("accumulate: gradient count mismatch");
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto dst = into[i].values();
    auto src = g[i].values();
    if (dst.size() != src.size()) throw std::invalid_argument("accumulate: shape mismatch");
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += weight * src[k];
  }
}

const Tensor& Var::value() const { return tape->value(id); }

Var Tape::constant(Tensor value) {
  nodes_.push_back({std::move(value), {}, {}, false});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(const ParameterStore& store, int index) {
  const auto key = std::make_pair(&store, index);
  if (auto it = param_nodes_.find(key); it != param_nodes_.end()) return {this, it->second};
  nodes_.push_back({store[index].value, {}, {}, record_});
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_.emplace(key, id);
  return {this, id};
}

Var Tape::push(Tensor value, std::initializer_list<Var> inputs, Backward backward) {
  bool needs = false;
  if (record_) {
    for (const auto& v : inputs) {
      if (v.tape != this) throw std::invalid_argument("op mixes vars from different tapes");
      needs = needs || nodes_[v.id].needs_grad;
    }
  }
  nodes_.push_back({std::move(value), {}, needs ? std::move(backward) : Backward{}, needs});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::push(Tensor value, const std::vector<Var>& inputs, Backward backward) {
  bool needs = false;
  if (record_) {
    for (const auto& v : inputs) {
      if (v.tape != this) throw std::invalid_argument("op mixes vars from different tapes");
      needs = needs || nodes_[v.id].needs_grad;
    }
  }
  nodes_.push_back({std::move(value), {}, needs ? std::move(backward) : Backward{}, needs});
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Tensor& Tape::grad(int id) {
  auto& n = nodes_[id];
  if (n.grad.empty() && !n.value.empty()) n.grad = Tensor(n.value.rows(), n.value.cols());
  return n.grad;
}

const Tensor* Tape::grad_if_any(int id) const {
  const auto& n = nodes_[id];
  return n.grad.empty() ? nullptr : &n.grad;
}

void Tape::truncate(std::size_t count) {
  if (record_) throw std::logic_error("truncate on a recording tape");
  if (count > nodes_.size()) return;
  nodes_.resize(count);
  for (auto it = param_nodes_.begin(); it != param_nodes_.end();) {
    if (static_cast<std::size_t>(it->second) >= count) {
      it = param_nodes_.erase(it);
    } else {
      ++it;
    }
  }
}

void Tape::run_backward(Var loss) {
  if (loss.tape != this) throw std::invalid_argument("backward: loss from another tape");
  if (nodes_[loss.id].value.size() != 1) {
    throw std::invalid_argument("backward: loss must be scalar, got " +
                                nodes_[loss.id].value.shape_str());
  }
  if (!record_) throw std::logic_error("backward on a non-recording tape");
  for (auto& n : nodes_) n.grad = Tensor();
  grad(loss.id)[0] = 1;
  for (int id = loss.id; id >= 0; --id) {
    auto& n = nodes_[id];
    if (n.backward && !n.grad.empty()) n.backward(*this, id);
  }
}

Gradients Tape::backward(Var loss, const ParameterStore& store) {
  run_backward(loss);
  Gradients g = zero_gradients(store);
  for (const auto& [key, id] : param_nodes_) {
    if (key.first != &store) continue;
    if (const Tensor* gr = grad_if_any(id)) g[key.second] = *gr;
  }
  return g;
}

}  // namespace mtlkd::nk
