#pragma once

#include <iosfwd>
#include <string>

#include "biot/sparse.hpp"

namespace biot {

enum class MmSymmetry { General, Symmetric };

/// Writes "%%MatrixMarket matrix coordinate real general|symmetric" with
/// 1-based indices. The symmetric form stores the lower triangle only and
/// requires an exactly symmetric input.
void write_matrix_market(const SparseMat& mat, std::ostream& out, MmSymmetry sym = MmSymmetry::General);
void write_matrix_market(const SparseMat& mat, const std::string& path, MmSymmetry sym = MmSymmetry::General);

/// Reads real coordinate files (general or symmetric). Throws std::runtime_error
/// on malformed input.
[[nodiscard]] SparseMat read_matrix_market(std::istream& in);
[[nodiscard]] SparseMat read_matrix_market(const std::string& path);

}  // namespace biot
