#include "mtlkd/nk/serialize.hpp"

#include <string>

namespace mtlkd::nk {

void write_tensor(ByteWriter& w, const Tensor& t) {
  w.u32(static_cast<std::uint32_t>(t.rows()));
  w.u32(static_cast<std::uint32_t>(t.cols()));
  for (Real x : t.values()) w.f64(static_cast<double>(x));
}

Tensor read_tensor(ByteReader& r) {
  const auto rows = r.u32();
  const auto cols = r.u32();
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  if (n * 8 > r.remaining()) throw DataError("tensor payload truncated");
  std::vector<Real> data(n);
  for (auto& x : data) x = static_cast<Real>(r.f64());
  return Tensor(rows, cols, std::move(data));
}

void write_tensors(ByteWriter& w, const ParameterStore& store) {
  w.u32(static_cast<std::uint32_t>(store.size()));
  for (const auto& p : store.all()) {
    w.str(p.name);
    write_tensor(w, p.value);
  }
}

void read_tensors(ByteReader& r, ParameterStore& store) {
  const auto count = r.u32();
  if (count != store.size()) {
    throw DataError("parameter count mismatch: file has " + std::to_string(count) +
                    ", model has " + std::to_string(store.size()));
  }
  for (std::size_t i = 0; i < count; ++i) {
    const std::string name = r.str();
    Tensor t = read_tensor(r);
    if (name != store[i].name || !t.same_shape(store[i].value)) {
      throw DataError("parameter " + name + " does not match model layout (" +
                      store[i].name + ")");
    }
    store[i].value = std::move(t);
  }
}

void write_adam(ByteWriter& w, const AdamState& s) {
  w.u64(static_cast<std::uint64_t>(s.step));
  w.u32(static_cast<std::uint32_t>(s.m.size()));
  for (std::size_t i = 0; i < s.m.size(); ++i) {
    write_tensor(w, s.m[i]);
    write_tensor(w, s.v[i]);
  }
}

AdamState read_adam(ByteReader& r) {
  AdamState s;
  s.step = static_cast<long long>(r.u64());
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    s.m.push_back(read_tensor(r));
    s.v.push_back(read_tensor(r));
  }
  return s;
}

}  // namespace mtlkd::nk
