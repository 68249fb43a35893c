#pragma once

#include <cassert>
#include <cstdint>
#include <cstring>
#include <memory>
#include <string>

namespace ltbt {

/// Fixed-size bit set. Sets of up to 128 bits live inline; larger ones on
/// the heap. All binary operations require equal sizes.
class Bits {
 public:
  Bits() = default;

  explicit Bits(std::uint32_t nbits, bool filled = false)
      : nbits_(nbits), nwords_((nbits + 63) / 64) {
    if (nwords_ > kInline) heap_ = std::make_unique<std::uint64_t[]>(nwords_);
    if (filled)
      fill();
    else
      clear();
  }

  Bits(const Bits& o) : nbits_(o.nbits_), nwords_(o.nwords_) {
    if (nwords_ > kInline) heap_ = std::make_unique<std::uint64_t[]>(nwords_);
    std::memcpy(words(), o.words(), nwords_ * 8);
  }

  Bits(Bits&& o) noexcept = default;

  Bits& operator=(const Bits& o) {
    if (this == &o) return *this;
    if (o.nwords_ > kInline && (o.nwords_ != nwords_ || !heap_))
      heap_ = std::make_unique<std::uint64_t[]>(o.nwords_);
    else if (o.nwords_ <= kInline)
      heap_.reset();
    nbits_ = o.nbits_;
    nwords_ = o.nwords_;
    std::memcpy(words(), o.words(), nwords_ * 8);
    return *this;
  }

  Bits& operator=(Bits&& o) noexcept = default;

  std::uint32_t size() const { return nbits_; }

  bool test(std::uint32_t i) const {
    assert(i < nbits_);
    return (words()[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::uint32_t i) {
    assert(i < nbits_);
    words()[i >> 6] |= std::uint64_t(1) << (i & 63);
  }
  void reset(std::uint32_t i) {
    assert(i < nbits_);
    words()[i >> 6] &= ~(std::uint64_t(1) << (i & 63));
  }

  void clear() { std::memset(words(), 0, nwords_ * 8); }

  void fill() {
    if (nwords_ == 0) return;
    std::memset(words(), 0xff, nwords_ * 8);
    words()[nwords_ - 1] &= tail_mask();
  }

  bool any() const {
    for (std::uint32_t w = 0; w < nwords_; ++w)
      if (words()[w]) return true;
    return false;
  }
  bool none() const { return !any(); }

  std::uint32_t count() const {
    std::uint32_t c = 0;
    for (std::uint32_t w = 0; w < nwords_; ++w) c += __builtin_popcountll(words()[w]);
    return c;
  }

  Bits& operator&=(const Bits& o) {
    assert(nbits_ == o.nbits_);
    for (std::uint32_t w = 0; w < nwords_; ++w) words()[w] &= o.words()[w];
    return *this;
  }
  Bits& operator|=(const Bits& o) {
    assert(nbits_ == o.nbits_);
    for (std::uint32_t w = 0; w < nwords_; ++w) words()[w] |= o.words()[w];
    return *this;
  }
  /// this := this \ o
  Bits& and_not(const Bits& o) {
    assert(nbits_ == o.nbits_);
    for (std::uint32_t w = 0; w < nwords_; ++w) words()[w] &= ~o.words()[w];
    return *this;
  }
  /// Complement within the fixed universe [0, size()).
  Bits& flip_all() {
    if (nwords_ == 0) return *this;
    for (std::uint32_t w = 0; w < nwords_; ++w) words()[w] = ~words()[w];
    words()[nwords_ - 1] &= tail_mask();
    return *this;
  }

  bool operator==(const Bits& o) const {
    if (nbits_ != o.nbits_) return false;
    return std::memcmp(words(), o.words(), nwords_ * 8) == 0;
  }
  bool operator!=(const Bits& o) const { return !(*this == o); }

  bool subset_of(const Bits& o) const {
    assert(nbits_ == o.nbits_);
    for (std::uint32_t w = 0; w < nwords_; ++w)
      if (words()[w] & ~o.words()[w]) return false;
    return true;
  }

  bool intersects(const Bits& o) const {
    assert(nbits_ == o.nbits_);
    for (std::uint32_t w = 0; w < nwords_; ++w)
      if (words()[w] & o.words()[w]) return true;
    return false;
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::uint32_t w = 0; w < nwords_; ++w) {
      std::uint64_t x = words()[w];
      while (x) {
        std::uint32_t b = std::uint32_t(__builtin_ctzll(x));
        f(w * 64 + b);
        x &= x - 1;
      }
    }
  }

  /// The whole set as an integer code; only valid for size() <= 63.
  std::uint64_t to_code() const {
    assert(nbits_ <= 63);
    return nwords_ ? words()[0] : 0;
  }

  static Bits from_code(std::uint32_t nbits, std::uint64_t code) {
    assert(nbits <= 63);
    Bits b(nbits);
    if (b.nwords_) b.words()[0] = code;
    return b;
  }

  std::size_t hash() const {
    std::size_t h = 1469598103934665603ull ^ nbits_;
    for (std::uint32_t w = 0; w < nwords_; ++w) {
      h ^= words()[w];
      h *= 1099511628211ull;
    }
    return h;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for_each([&](std::uint32_t i) {
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    });
    return s + "}";
  }

 private:
  static constexpr std::uint32_t kInline = 2;

  std::uint64_t* words() { return nwords_ > kInline ? heap_.get() : inl_; }
  const std::uint64_t* words() const { return nwords_ > kInline ? heap_.get() : inl_; }

  std::uint64_t tail_mask() const {
    std::uint32_t rem = nbits_ & 63;
    return rem ? (std::uint64_t(1) << rem) - 1 : ~std::uint64_t(0);
  }

  std::uint32_t nbits_ = 0;
  std::uint32_t nwords_ = 0;
  std::uint64_t inl_[kInline] = {0, 0};
  std::unique_ptr<std::uint64_t[]> heap_;
};

}  // namespace ltbt
