#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <string>

namespace picomp {

// Identifier: a readable stem plus a disambiguating index.
// Index 0 prints as the bare stem; index k > 0 prints as stem_k.
struct Ident {
  std::string base;
  uint32_t index = 0;

  bool operator==(const Ident&) const = default;
  auto operator<=>(const Ident&) const = default;
};

using IdentSet = std::set<Ident>;

std::string show(const Ident& id);

// Splits a surface spelling back into (base, index); inverse of show.
// A trailing _digits run with no leading zero is the index.
Ident ident_of_string(const std::string& spelling);

// Monotone fresh-name source for one term-construction session.
class NameSupply {
 public:
  explicit NameSupply(uint32_t start = 1) : next_(start) {}

  Ident fresh(std::string base) { return Ident{std::move(base), next_++}; }
  Ident freshen(const Ident& id) { return Ident{id.base, next_++}; }

  // Make sure future names stay above every index already in use.
  void reserve(const IdentSet& used) {
    for (const auto& id : used)
      if (next_ <= id.index) next_ = id.index + 1;
  }

 private:
  uint32_t next_;
};

// Smallest index bump of `candidate` that avoids `taken`.
Ident avoid_collision(const Ident& candidate, const IdentSet& taken);

}  // namespace picomp
