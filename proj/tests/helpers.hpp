#pragma once

#include <random>
#include <string>
#include <string_view>

#include "endoring/textformat.hpp"

namespace endoring::testing {

inline GroupRef group_of(std::string_view text) { return parse(text).groups.at(0); }

/// First endo of a document holding one group and one endo, normalized.
inline Endo endo_of(std::string_view text) { return normalize(parse(text).endos.at(0).endo); }

/// Endo on `g` from an endo body in the text format.
inline Endo endo_on(const GroupRef& g, std::string_view body) {
  std::string text = serialize(*g) + "endo e on " + g->name + " {\n" + std::string(body) + "\n}\n";
  Endo e = parse(text).endos.at(0).endo;
  e.group = g;
  return normalize(e);
}

}  // namespace endoring::testing
