#include "anykernel/point.hpp"

#include "anykernel/errors.hpp"

namespace anykernel {

bool Features::is_element() const {
  const auto* e = std::get_if<std::shared_ptr<const UniverseElement>>(&value_);
  return e != nullptr && *e != nullptr;
}

const DenseVector& Features::dense() const {
  if (const auto* v = std::get_if<DenseVector>(&value_)) return *v;
  throw DomainError("features are not a dense vector");
}

const BitVector& Features::bits() const {
  if (const auto* v = std::get_if<BitVector>(&value_)) return *v;
  throw DomainError("features are not a bit vector");
}

const UniverseElement& Features::element() const { return *element_ptr(); }

const std::shared_ptr<const UniverseElement>& Features::element_ptr() const {
  const auto* e = std::get_if<std::shared_ptr<const UniverseElement>>(&value_);
  if (e == nullptr || *e == nullptr) throw DomainError("features are not a graph universe element");
  return *e;
}

DenseVector Features::as_dense() const {
  if (const auto* v = std::get_if<DenseVector>(&value_)) return *v;
  if (const auto* b = std::get_if<BitVector>(&value_)) {
    DenseVector out(b->bits.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = b->bits[i];
    return out;
  }
  throw DomainError("features have no vector form");
}

}  // namespace anykernel
