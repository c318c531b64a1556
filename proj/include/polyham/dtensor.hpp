#pragma once

// Dense d-tensors with typed index slots.
//
// Every slot is temporal (extent m) or spatial (extent n), upper or lower.
// A polymomentum index pair such as (i)/(a) in p_i^a is stored as two adjacent
// slots, one spatial and one temporal, with `pair_head` set on the first.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "polyham/errors.hpp"
#include "polyham/jet.hpp"

namespace polyham {

enum class IndexClass : std::uint8_t { temporal, spatial };
enum class Variance : std::uint8_t { upper, lower };

struct IndexSlot {
  IndexClass cls = IndexClass::spatial;
  Variance variance = Variance::lower;
  bool pair_head = false;

  friend bool operator==(const IndexSlot&, const IndexSlot&) = default;
};

inline constexpr IndexSlot kTUp{IndexClass::temporal, Variance::upper, false};
inline constexpr IndexSlot kTLo{IndexClass::temporal, Variance::lower, false};
inline constexpr IndexSlot kSUp{IndexClass::spatial, Variance::upper, false};
inline constexpr IndexSlot kSLo{IndexClass::spatial, Variance::lower, false};

inline constexpr IndexSlot pair_head(IndexSlot s) {
  s.pair_head = true;
  return s;
}

struct Dims {
  std::size_t m = 1;  // temporal
  std::size_t n = 1;  // spatial

  std::size_t extent(IndexClass c) const { return c == IndexClass::temporal ? m : n; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

// Enough for every object in the theory (vertical curvature blocks have six).
inline constexpr std::size_t kMaxRank = 8;
using MultiIndex = std::array<std::size_t, kMaxRank>;

std::string describe(std::span<const IndexSlot> slots);
void validate_pairs(std::span<const IndexSlot> slots);

template <class S>
class BasicDTensor {
 public:
  BasicDTensor() = default;
  BasicDTensor(std::vector<IndexSlot> slots, Dims dims, S fill = S{})
      : slots_(std::move(slots)), dims_(dims) {
    if (slots_.size() > kMaxRank) throw SlotMismatch("tensor rank exceeds limit");
    validate_pairs(slots_);
    std::size_t total = 1;
    for (const auto& s : slots_) total *= dims_.extent(s.cls);
    data_.assign(total, fill);
  }

  const std::vector<IndexSlot>& slots() const { return slots_; }
  const IndexSlot& slot(std::size_t k) const { return slots_[k]; }
  Dims dims() const { return dims_; }
  std::size_t rank() const { return slots_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t k) const { return dims_.extent(slots_[k].cls); }

  std::size_t flat(std::span<const std::size_t> idx) const {
    std::size_t f = 0;
    for (std::size_t k = 0; k < slots_.size(); ++k) f = f * extent(k) + idx[k];
    return f;
  }
  std::size_t flat(std::initializer_list<std::size_t> idx) const {
    return flat(std::span<const std::size_t>(idx.begin(), idx.size()));
  }
  MultiIndex unflat(std::size_t f) const {
    MultiIndex idx{};
    for (std::size_t k = slots_.size(); k-- > 0;) {
      idx[k] = f % extent(k);
      f /= extent(k);
    }
    return idx;
  }

  S& operator[](std::size_t f) { return data_[f]; }
  const S& operator[](std::size_t f) const { return data_[f]; }
  S& at(std::initializer_list<std::size_t> idx) { return data_[flat(idx)]; }
  const S& at(std::initializer_list<std::size_t> idx) const { return data_[flat(idx)]; }
  S& at(std::span<const std::size_t> idx) { return data_[flat(idx)]; }
  const S& at(std::span<const std::size_t> idx) const { return data_[flat(idx)]; }

  std::span<S> components() { return data_; }
  std::span<const S> components() const { return data_; }

 private:
  std::vector<IndexSlot> slots_;
  Dims dims_;
  std::vector<S> data_;
};

using DTensor = BasicDTensor<double>;
using JetTensor = BasicDTensor<Jet>;

// Point of the dual 1-jet space: p[i][a] is the polymomentum p_i^a.
struct JetPoint {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<std::vector<double>> p;
};

enum class SlotCheck {
  tensorial,   // cycled/alternated slots must share class and variance
  positional,  // only the class must match (index-position-mixing formulas)
};

namespace detail {

inline void require_slot(std::size_t rank, std::size_t k) {
  if (k >= rank) throw SlotMismatch("slot index out of range");
}

template <class S>
std::vector<IndexSlot> strip_pairs(std::vector<IndexSlot> slots) {
  // A pair loses its tag when one of its halves is removed or moved.
  for (std::size_t k = 0; k < slots.size(); ++k) {
    if (!slots[k].pair_head) continue;
    const bool ok = k + 1 < slots.size() && slots[k].cls != slots[k + 1].cls &&
                    slots[k].variance != slots[k + 1].variance;
    if (!ok) slots[k].pair_head = false;
  }
  return slots;
}

template <class S>
S zero_like(const S& proto) {
  if constexpr (std::is_same_v<S, Jet>) {
    return Jet::constant(proto.space(), 0.0, proto.order());
  } else {
    return S{};
  }
}

}  // namespace detail

// Sum over a repeated upper/lower index pair; both slots are removed.
template <class S>
BasicDTensor<S> contract(const BasicDTensor<S>& t, std::size_t a, std::size_t b) {
  detail::require_slot(t.rank(), a);
  detail::require_slot(t.rank(), b);
  if (a == b || t.slot(a).cls != t.slot(b).cls || t.slot(a).variance == t.slot(b).variance)
    throw SlotMismatch("contraction needs one upper and one lower slot of the same class");
  std::vector<IndexSlot> out_slots;
  for (std::size_t k = 0; k < t.rank(); ++k)
    if (k != a && k != b) out_slots.push_back(t.slot(k));
  const S zero = t.size() ? detail::zero_like(t[0]) : S{};
  BasicDTensor<S> out(detail::strip_pairs<S>(out_slots), t.dims(), zero);
  const std::size_t ext = t.extent(a);
  for (std::size_t f = 0; f < out.size(); ++f) {
    MultiIndex oi = out.unflat(f);
    MultiIndex ti{};
    for (std::size_t k = 0, o = 0; k < t.rank(); ++k)
      if (k != a && k != b) ti[k] = oi[o++];
    for (std::size_t s = 0; s < ext; ++s) {
      ti[a] = ti[b] = s;
      out[f] += t.at(std::span<const std::size_t>(ti.data(), t.rank()));
    }
  }
  return out;
}

template <class S>
BasicDTensor<S> outer(const BasicDTensor<S>& a, const BasicDTensor<S>& b) {
  if (!(a.dims() == b.dims())) throw SlotMismatch("outer product of tensors with different dims");
  std::vector<IndexSlot> slots = a.slots();
  slots.insert(slots.end(), b.slots().begin(), b.slots().end());
  BasicDTensor<S> out(slots, a.dims(), a.size() ? a[0] : S{});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

// result[..i..j..] = T[..i..j..] - T[..j..i..]  (alternate sum, no 1/2).
template <class S>
BasicDTensor<S> antisymmetrize_pair(const BasicDTensor<S>& t, std::size_t a, std::size_t b,
                                    SlotCheck check = SlotCheck::tensorial) {
  detail::require_slot(t.rank(), a);
  detail::require_slot(t.rank(), b);
  if (a == b || t.slot(a).cls != t.slot(b).cls ||
      (check == SlotCheck::tensorial && t.slot(a).variance != t.slot(b).variance))
    throw SlotMismatch("alternation needs two distinct slots of the same class and variance");
  BasicDTensor<S> out = t;
  for (std::size_t f = 0; f < t.size(); ++f) {
    MultiIndex idx = t.unflat(f);
    std::swap(idx[a], idx[b]);
    out[f] = t[f] - t.at(std::span<const std::size_t>(idx.data(), t.rank()));
  }
  return out;
}

// result[..i..j..k..] = T[i,j,k] + T[j,k,i] + T[k,i,j] over the three slots.
template <class S>
BasicDTensor<S> cyclic_sum(const BasicDTensor<S>& t, std::array<std::size_t, 3> s,
                           SlotCheck check = SlotCheck::tensorial) {
  for (auto k : s) detail::require_slot(t.rank(), k);
  if (s[0] == s[1] || s[1] == s[2] || s[0] == s[2])
    throw SlotMismatch("cyclic sum needs three distinct slots");
  for (std::size_t q = 1; q < 3; ++q) {
    if (t.slot(s[q]).cls != t.slot(s[0]).cls ||
        (check == SlotCheck::tensorial && t.slot(s[q]).variance != t.slot(s[0]).variance))
      throw SlotMismatch("cycled slots must share class and variance");
  }
  BasicDTensor<S> out = t;
  for (std::size_t f = 0; f < t.size(); ++f) {
    const MultiIndex idx = t.unflat(f);
    MultiIndex r1 = idx, r2 = idx;
    r1[s[0]] = idx[s[1]];
    r1[s[1]] = idx[s[2]];
    r1[s[2]] = idx[s[0]];
    r2[s[0]] = idx[s[2]];
    r2[s[1]] = idx[s[0]];
    r2[s[2]] = idx[s[1]];
    out[f] = t[f] + t.at(std::span<const std::size_t>(r1.data(), t.rank())) +
             t.at(std::span<const std::size_t>(r2.data(), t.rank()));
  }
  return out;
}

// Reorders slots: out slot k is input slot perm[k].
template <class S>
BasicDTensor<S> permute(const BasicDTensor<S>& t, std::span<const std::size_t> perm) {
  if (perm.size() != t.rank()) throw SlotMismatch("permutation size");
  std::vector<IndexSlot> slots;
  for (auto p : perm) slots.push_back(t.slot(p));
  BasicDTensor<S> out(detail::strip_pairs<S>(slots), t.dims(), t.size() ? t[0] : S{});
  for (std::size_t f = 0; f < out.size(); ++f) {
    MultiIndex oi = out.unflat(f);
    MultiIndex ti{};
    for (std::size_t k = 0; k < perm.size(); ++k) ti[perm[k]] = oi[k];
    out[f] = t.at(std::span<const std::size_t>(ti.data(), t.rank()));
  }
  return out;
}

template <class S>
BasicDTensor<S> scaled(BasicDTensor<S> t, double s) {
  for (auto& v : t.components()) v *= s;
  return t;
}

template <class S>
BasicDTensor<S> sum(BasicDTensor<S> a, const BasicDTensor<S>& b) {
  if (a.slots() != b.slots() || !(a.dims() == b.dims())) throw SlotMismatch("sum of unlike tensors");
  for (std::size_t f = 0; f < a.size(); ++f) a[f] += b[f];
  return a;
}

template <class S>
BasicDTensor<S> difference(BasicDTensor<S> a, const BasicDTensor<S>& b) {
  if (a.slots() != b.slots() || !(a.dims() == b.dims())) throw SlotMismatch("difference of unlike tensors");
  for (std::size_t f = 0; f < a.size(); ++f) a[f] -= b[f];
  return a;
}

double max_abs(const DTensor& t);
// max |a - b| over components; tensors must have equal shape.
double max_abs_diff(const DTensor& a, const DTensor& b);

// Values (order-0 part) of a jet-valued tensor.
DTensor values(const JetTensor& t);
JetTensor jet_tensor(const DTensor& t, const JetSpace& space, int order);

// Inverse of a metric with two lower slots of one class; result has two upper slots.
// Throws AsymmetricInput or SingularMetric (|det| <= 1e-10).
DTensor invert_metric(const DTensor& g);
JetTensor invert_metric(const JetTensor& g);

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kSingularDeterminant = 1e-10;

double determinant(const DTensor& square);

}  // namespace polyham
