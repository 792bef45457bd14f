#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbc4 {

using Index = Eigen::Index;

enum class Party { A, BAlpha, BBeta, C };
enum class Slot { Mu, Nu, None };

inline const char* to_string(Party p) {
  switch (p) {
    case Party::A: return "A";
    case Party::BAlpha: return "B_alpha";
    case Party::BBeta: return "B_beta";
    case Party::C: return "C";
  }
  return "?";
}

inline const char* to_string(Slot s) {
  switch (s) {
    case Slot::Mu: return "mu";
    case Slot::Nu: return "nu";
    case Slot::None: return "none";
  }
  return "?";
}

inline Slot other(Slot s) {
  if (s == Slot::None) throw std::invalid_argument("slot 'none' has no partner");
  return s == Slot::Mu ? Slot::Nu : Slot::Mu;
}

/// Label of one tensor factor: which party's space, which pair slot, which
/// protocol instance. The purification register C carries no slot.
class SubsystemId {
 public:
  SubsystemId(Party party, Slot slot, int instance = 1)
      : party_(party), slot_(slot), instance_(instance) {
    if (instance < 1) throw std::invalid_argument("subsystem instance index must be >= 1");
    if ((party == Party::C) != (slot == Slot::None))
      throw std::invalid_argument("only the C register has slot 'none'");
  }

  static SubsystemId adam(Slot s, int instance = 1) { return {Party::A, s, instance}; }
  static SubsystemId alpha(Slot s, int instance = 1) { return {Party::BAlpha, s, instance}; }
  static SubsystemId beta(Slot s, int instance = 1) { return {Party::BBeta, s, instance}; }
  static SubsystemId purifier(int instance = 1) { return {Party::C, Slot::None, instance}; }

  Party party() const { return party_; }
  Slot slot() const { return slot_; }
  int instance() const { return instance_; }

  std::string label() const {
    std::string out;
    switch (party_) {
      case Party::A: out = std::string("A_") + to_string(slot_); break;
      case Party::BAlpha: out = std::string("B_") + to_string(slot_) + "_alpha"; break;
      case Party::BBeta: out = std::string("B_") + to_string(slot_) + "_beta"; break;
      case Party::C: out = "C"; break;
    }
    return out + "[" + std::to_string(instance_) + "]";
  }

  auto operator<=>(const SubsystemId&) const = default;

 private:
  Party party_;
  Slot slot_;
  int instance_;
};

/// Ancilla factors are ququarts (one level per Pauli); Babe's wires are qubits.
inline Index default_dimension(Party p) {
  switch (p) {
    case Party::A: return 4;
    case Party::BAlpha:
    case Party::BBeta: return 2;
    case Party::C: break;
  }
  throw std::invalid_argument("the C register dimension must be given explicitly");
}

struct Factor {
  SubsystemId id;
  Index dim;
  bool operator==(const Factor&) const = default;
};

/// Ordered list of labeled tensor factors. The first factor is the most
/// significant digit of the joint computational-basis index.
class HilbertRegistry {
 public:
  HilbertRegistry() = default;
  HilbertRegistry(std::initializer_list<Factor> factors) {
    for (const auto& f : factors) add(f.id, f.dim);
  }
  explicit HilbertRegistry(const std::vector<Factor>& factors) {
    for (const auto& f : factors) add(f.id, f.dim);
  }

  HilbertRegistry& add(SubsystemId id, Index dim) {
    if (dim < 1) throw std::invalid_argument("factor dimension must be positive: " + id.label());
    if (contains(id)) throw std::invalid_argument("duplicate subsystem " + id.label());
    factors_.push_back({id, dim});
    return *this;
  }
  HilbertRegistry& add(SubsystemId id) { return add(id, default_dimension(id.party())); }

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  bool empty() const { return factors_.empty(); }

  Index total_dim() const {
    Index d = 1;
    for (const auto& f : factors_) d *= f.dim;
    return d;
  }

  bool contains(const SubsystemId& id) const { return position(id) >= 0; }

  /// Position of `id` in the factor list, or -1.
  Index position(const SubsystemId& id) const {
    for (std::size_t i = 0; i < factors_.size(); ++i)
      if (factors_[i].id == id) return static_cast<Index>(i);
    return -1;
  }

  Index dim_of(const SubsystemId& id) const {
    const Index p = position(id);
    if (p < 0) throw std::invalid_argument("subsystem not in registry: " + id.label());
    return factors_[static_cast<std::size_t>(p)].dim;
  }

  std::vector<SubsystemId> ids() const {
    std::vector<SubsystemId> out;
    out.reserve(factors_.size());
    for (const auto& f : factors_) out.push_back(f.id);
    return out;
  }

  /// The factors named in `keep`, in this registry's order.
  HilbertRegistry subset(const std::vector<SubsystemId>& keep) const {
    for (const auto& id : keep)
      if (!contains(id)) throw std::invalid_argument("subsystem not in registry: " + id.label());
    HilbertRegistry out;
    for (const auto& f : factors_)
      if (std::find(keep.begin(), keep.end(), f.id) != keep.end()) out.add(f.id, f.dim);
    return out;
  }

  /// The factors not named in `drop`, in this registry's order.
  HilbertRegistry complement(const std::vector<SubsystemId>& drop) const {
    HilbertRegistry out;
    for (const auto& f : factors_)
      if (std::find(drop.begin(), drop.end(), f.id) == drop.end()) out.add(f.id, f.dim);
    return out;
  }

  /// Same factors in the order given; `order` must be a permutation.
  HilbertRegistry reordered(const std::vector<SubsystemId>& order) const {
    if (order.size() != factors_.size())
      throw std::invalid_argument("new order is not a permutation of the registry");
    HilbertRegistry out;
    for (const auto& id : order) {
      if (!contains(id)) throw std::invalid_argument("new order is not a permutation of the registry");
      out.add(id, dim_of(id));  // add() rejects repeats
    }
    return out;
  }

  HilbertRegistry concat(const HilbertRegistry& other) const {
    HilbertRegistry out = *this;
    for (const auto& f : other.factors_) out.add(f.id, f.dim);
    return out;
  }

  bool operator==(const HilbertRegistry&) const = default;

 private:
  std::vector<Factor> factors_;
};

namespace detail {

/// For every joint index of `from`, the joint index of the same basis vector
/// in `to`. Both registries must hold the same factors.
inline std::vector<Index> reindex_map(const HilbertRegistry& from, const HilbertRegistry& to) {
  const auto& ff = from.factors();
  const std::size_t n = ff.size();
  std::vector<Index> to_stride(to.size());
  {
    Index s = 1;
    for (std::size_t q = to.size(); q-- > 0;) {
      to_stride[q] = s;
      s *= to.factors()[q].dim;
    }
  }
  std::vector<Index> stride(n), dims(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Index q = to.position(ff[i].id);
    if (q < 0 || to.factors()[static_cast<std::size_t>(q)].dim != ff[i].dim)
      throw std::invalid_argument("registries do not hold the same factors");
    stride[i] = to_stride[static_cast<std::size_t>(q)];
    dims[i] = ff[i].dim;
  }
  const Index total = from.total_dim();
  std::vector<Index> map(static_cast<std::size_t>(total));
  std::vector<Index> digit(n, 0);
  Index target = 0;
  for (Index k = 0; k < total; ++k) {
    map[static_cast<std::size_t>(k)] = target;
    for (std::size_t i = n; i-- > 0;) {  // odometer, last factor fastest
      if (++digit[i] < dims[i]) {
        target += stride[i];
        break;
      }
      target -= (dims[i] - 1) * stride[i];
      digit[i] = 0;
    }
  }
  return map;
}

}  // namespace detail
}  // namespace qbc4
