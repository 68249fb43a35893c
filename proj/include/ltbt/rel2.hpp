#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ltbt/bits.hpp"
#include "ltbt/lts.hpp"

namespace ltbt {

/// A set of state pairs drawn from the product of two LTS state spaces —
/// the value of a dimension-2 proposition. Stored row-major: pair (p,q)
/// lives at bit p*n2 + q.
class Rel2 {
 public:
  Rel2() = default;
  Rel2(std::uint32_t n1, std::uint32_t n2, bool filled = false)
      : n1_(n1), n2_(n2), bits_(n1 * n2, filled) {}

  static Rel2 empty(const Lts& l1, const Lts& l2) {
    return Rel2(l1.num_states(), l2.num_states(), false);
  }
  static Rel2 full(const Lts& l1, const Lts& l2) {
    return Rel2(l1.num_states(), l2.num_states(), true);
  }

  std::uint32_t n1() const { return n1_; }
  std::uint32_t n2() const { return n2_; }
  const Bits& bits() const { return bits_; }
  Bits& bits() { return bits_; }

  bool test(StateId p, StateId q) const { return bits_.test(p * n2_ + q); }
  void set(StateId p, StateId q) { bits_.set(p * n2_ + q); }
  void reset(StateId p, StateId q) { bits_.reset(p * n2_ + q); }

  std::uint32_t count() const { return bits_.count(); }
  bool any() const { return bits_.any(); }
  bool none() const { return bits_.none(); }

  Rel2& operator&=(const Rel2& o) {
    bits_ &= o.bits_;
    return *this;
  }
  Rel2& operator|=(const Rel2& o) {
    bits_ |= o.bits_;
    return *this;
  }
  Rel2& and_not(const Rel2& o) {
    bits_.and_not(o.bits_);
    return *this;
  }
  Rel2& complement() {
    bits_.flip_all();
    return *this;
  }

  bool operator==(const Rel2& o) const {
    return n1_ == o.n1_ && n2_ == o.n2_ && bits_ == o.bits_;
  }
  bool operator!=(const Rel2& o) const { return !(*this == o); }
  bool subset_of(const Rel2& o) const { return bits_.subset_of(o.bits_); }

  template <typename F>
  void for_each_pair(F&& f) const {
    bits_.for_each([&](std::uint32_t i) { f(StateId(i / n2_), StateId(i % n2_)); });
  }

  std::vector<std::pair<StateId, StateId>> pairs() const {
    std::vector<std::pair<StateId, StateId>> out;
    for_each_pair([&](StateId p, StateId q) { out.emplace_back(p, q); });
    return out;
  }

  std::size_t hash() const { return bits_.hash() * 31 + n2_; }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for_each_pair([&](StateId p, StateId q) {
      if (!first) s += ",";
      s += "(" + std::to_string(p) + "," + std::to_string(q) + ")";
      first = false;
    });
    return s + "}";
  }

 private:
  std::uint32_t n1_ = 0, n2_ = 0;
  Bits bits_;
};

inline Rel2 operator&(Rel2 a, const Rel2& b) { return a &= b; }
inline Rel2 operator|(Rel2 a, const Rel2& b) { return a |= b; }

/// Rel2 images of the two modal operators over a fixed pair of LTS.
/// Precomputes, per action and dimension, the set of pairs that can reach
/// each single product bit, so an image is a union of masks over the
/// argument's set bits.
class ModalOps {
 public:
  ModalOps(const Lts& l1, const Lts& l2) : l1_(l1), l2_(l2) {
    const std::uint32_t n1 = l1.num_states(), n2 = l2.num_states();
    const std::uint32_t nb = n1 * n2;
    const std::size_t na = l1.alphabet().size();
    dia1_.assign(na, {});
    dia2_.assign(na, {});
    for (ActionId a = 0; a < na; ++a) {
      dia1_[a].assign(nb, Bits(nb));
      dia2_[a].assign(nb, Bits(nb));
      for (std::uint32_t pp = 0; pp < n1; ++pp)
        for (std::uint32_t q = 0; q < n2; ++q) {
          Bits& m1 = dia1_[a][pp * n2 + q];
          l1.predecessors(pp, a).for_each([&](std::uint32_t p) { m1.set(p * n2 + q); });
        }
      ActionId a2 = l2.require_action(l1.alphabet()[a].name());
      for (std::uint32_t p = 0; p < n1; ++p)
        for (std::uint32_t qq = 0; qq < n2; ++qq) {
          Bits& m2 = dia2_[a][p * n2 + qq];
          l2.predecessors(qq, a2).for_each([&](std::uint32_t q) { m2.set(p * n2 + q); });
        }
    }
    // small products: tabulate the image of every argument code outright
    if (nb > 0 && nb <= 12 && na > 0) {
      cached_ = true;
      img1_.assign(na, {});
      img2_.assign(na, {});
      const std::size_t total = std::size_t(1) << nb;
      for (ActionId a = 0; a < na; ++a) {
        img1_[a].assign(total, 0);
        img2_[a].assign(total, 0);
        for (std::size_t code = 1; code < total; ++code) {
          std::uint32_t low = std::uint32_t(__builtin_ctzll(code));
          img1_[a][code] = img1_[a][code & (code - 1)] | dia1_[a][low].to_code();
          img2_[a][code] = img2_[a][code & (code - 1)] | dia2_[a][low].to_code();
        }
      }
    }
  }

  const Lts& lts1() const { return l1_; }
  const Lts& lts2() const { return l2_; }

  Rel2 empty() const { return Rel2::empty(l1_, l2_); }
  Rel2 full() const { return Rel2::full(l1_, l2_); }

  /// <a>_dim X
  Rel2 diamond(int dim, ActionId a, const Rel2& x) const {
    Rel2 out = empty();
    if (cached_) {
      const auto& img = dim == 1 ? img1_[a] : img2_[a];
      out.bits() = Bits::from_code(x.bits().size(), img[x.bits().to_code()]);
      return out;
    }
    const auto& masks = dim == 1 ? dia1_[a] : dia2_[a];
    x.bits().for_each([&](std::uint32_t i) { out.bits() |= masks[i]; });
    return out;
  }

  /// [a]_dim X = complement of <a>_dim complement(X)
  Rel2 box(int dim, ActionId a, const Rel2& x) const {
    Rel2 y = x;
    y.complement();
    Rel2 out = diamond(dim, a, y);
    out.complement();
    return out;
  }

 private:
  const Lts& l1_;
  const Lts& l2_;
  std::vector<std::vector<Bits>> dia1_, dia2_;  // [action-id of lts1][product bit]
  bool cached_ = false;
  std::vector<std::vector<std::uint64_t>> img1_, img2_;  // [action][argument code]
};

}  // namespace ltbt
