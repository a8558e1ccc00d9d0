#pragma once

#include <string>

#include "ntc/sparse_tensor.hpp"

namespace ntc {

// Text format for sparse tensors: one observed entry per line as N 1-based
// indices followed by the value, whitespace separated; '#' starts a
// comment. An optional header "# dims: I1 I2 ... IN" declares the
// dimensions; otherwise they are inferred as componentwise maxima.
// Malformed lines, duplicates, negative and non-finite values are errors
// that name the offending line.
SparseTensor read_tns(const std::string& path);

// Lexicographic entry order with a "# dims:" header; round-trips through
// read_tns to an equal tensor.
void write_tns(const SparseTensor& tensor, const std::string& path);

}  // namespace ntc
