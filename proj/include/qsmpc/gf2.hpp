#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qsmpc/error.hpp"

namespace qsmpc::gf2 {

/// Dense square matrix over GF(2), rows packed into 64-bit words.
class Matrix {
 public:
  explicit Matrix(std::size_t size) : size_(size), words_((size + 63) / 64), bits_(size * words_, 0) {}

  std::size_t size() const { return size_; }

  bool get(std::size_t row, std::size_t col) const {
    return (bits_[row * words_ + col / 64] >> (col % 64)) & 1u;
  }
  void set(std::size_t row, std::size_t col, bool value) {
    auto& w = bits_[row * words_ + col / 64];
    const std::uint64_t mask = std::uint64_t{1} << (col % 64);
    w = value ? (w | mask) : (w & ~mask);
  }

  bool is_unit_lower_triangular() const {
    for (std::size_t r = 0; r < size_; ++r) {
      if (!get(r, r)) return false;
      for (std::size_t c = r + 1; c < size_; ++c)
        if (get(r, c)) return false;
    }
    return true;
  }

  /// M * v over GF(2).
  std::vector<std::uint8_t> multiply(const std::vector<std::uint8_t>& v) const {
    require(v.size() == size_, "gf2::Matrix::multiply: size mismatch");
    std::vector<std::uint8_t> out(size_, 0);
    for (std::size_t r = 0; r < size_; ++r) {
      std::uint8_t acc = 0;
      for (std::size_t c = 0; c < size_; ++c) acc ^= static_cast<std::uint8_t>(get(r, c) & (v[c] & 1u));
      out[r] = acc;
    }
    return out;
  }

 private:
  std::size_t size_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

/// Solves M a = b by forward substitution. M must be unit lower triangular.
inline std::vector<std::uint8_t> solve_unit_lower(const Matrix& m, const std::vector<std::uint8_t>& b) {
  require(b.size() == m.size(), "gf2::solve_unit_lower: size mismatch");
  require(m.is_unit_lower_triangular(), "gf2::solve_unit_lower: matrix is not unit lower triangular");
  std::vector<std::uint8_t> a(m.size(), 0);
  for (std::size_t r = 0; r < m.size(); ++r) {
    std::uint8_t acc = b[r] & 1u;
    for (std::size_t c = 0; c < r; ++c)
      if (m.get(r, c)) acc ^= a[c];
    a[r] = acc;
  }
  return a;
}

}  // namespace qsmpc::gf2
