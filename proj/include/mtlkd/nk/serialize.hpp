#pragma once

#include "mtlkd/core/binary_io.hpp"
#include "mtlkd/nk/adam.hpp"
#include "mtlkd/nk/tape.hpp"

namespace mtlkd::nk {

// Named-tensor container: u32 count, then per tensor
// str name | u32 rows | u32 cols | rows*cols f64.
void write_tensors(ByteWriter& w, const ParameterStore& store);
// Reads values into an existing store; names and shapes must match.
void read_tensors(ByteReader& r, ParameterStore& store);

void write_tensor(ByteWriter& w, const Tensor& t);
Tensor read_tensor(ByteReader& r);

void write_adam(ByteWriter& w, const AdamState& s);
AdamState read_adam(ByteReader& r);

}  // namespace mtlkd::nk
