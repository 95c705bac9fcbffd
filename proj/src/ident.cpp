#include "picomp/ident.hpp"

#include <cctype>

namespace picomp {

std::string show(const Ident& id) {
  if (id.index == 0) return id.base;
  return id.base + "_" + std::to_string(id.index);
}

Ident ident_of_string(const std::string& spelling) {
  auto us = spelling.rfind('_');
  if (us == std::string::npos || us == 0 || us + 1 == spelling.size())
    return Ident{spelling, 0};
  // A leading zero keeps the run inside the stem, so show stays injective.
  if (spelling[us + 1] == '0') return Ident{spelling, 0};
  uint64_t value = 0;
  for (size_t i = us + 1; i < spelling.size(); ++i) {
    char c = spelling[i];
    if (!std::isdigit(static_cast<unsigned char>(c))) return Ident{spelling, 0};
    value = value * 10 + static_cast<uint64_t>(c - '0');
    if (value > 0xffffffffull) return Ident{spelling, 0};
  }
  return Ident{spelling.substr(0, us), static_cast<uint32_t>(value)};
}

Ident avoid_collision(const Ident& candidate, const IdentSet& taken) {
  Ident out = candidate;
  while (taken.count(out)) out.index += 1;
  return out;
}

}  // namespace picomp
