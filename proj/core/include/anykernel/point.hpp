#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

namespace anykernel {

using DenseVector = std::vector<double>;

// Boolean cube element, entries are +1 or -1.
struct BitVector {
  std::vector<std::int8_t> bits;
  friend bool operator==(const BitVector&, const BitVector&) = default;
};

struct UniverseElement;

// Opaque domain element handed to kernels and distinguishers.
class Features {
 public:
  Features() = default;
  Features(DenseVector v) : value_(std::move(v)) {}
  Features(BitVector b) : value_(std::move(b)) {}
  Features(std::shared_ptr<const UniverseElement> u) : value_(std::move(u)) {}

  bool empty() const { return std::holds_alternative<std::monostate>(value_); }
  bool is_dense() const { return std::holds_alternative<DenseVector>(value_); }
  bool is_bits() const { return std::holds_alternative<BitVector>(value_); }
  bool is_element() const;

  // Throw DomainError on the wrong alternative.
  const DenseVector& dense() const;
  const BitVector& bits() const;
  const UniverseElement& element() const;
  const std::shared_ptr<const UniverseElement>& element_ptr() const;

  // Dense view of dense or bit features (bits map to +-1.0).
  DenseVector as_dense() const;

 private:
  std::variant<std::monostate, DenseVector, BitVector, std::shared_ptr<const UniverseElement>> value_;
};

struct Point {
  Features x;
  double p = 0.0;
};

}  // namespace anykernel
