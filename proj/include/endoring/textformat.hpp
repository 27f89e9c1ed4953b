#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "endoring/endokit.hpp"
#include "endoring/linmap.hpp"

namespace endoring {

class ParseError : public UsageError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct NamedEndo {
  std::string name;
  Endo endo;
};

struct NamedMatrix {
  std::string name;
  ExactMatrix matrix;
};

struct Document {
  std::vector<GroupRef> groups;
  std::vector<NamedEndo> endos;
  std::vector<NamedMatrix> matrices;

  GroupRef group(const std::string& name) const;
  const Endo* endo(const std::string& name) const;
};

/// Grammar:
///   group A { block B = cyclic(p=5, k=1, mult=omega) ... }
///   endo phi on A { tf[C.0 -> C.0] = 1/5  div[P.0 -> P.1] = 2  div[P] = 3
///                   tf[F] = 2  cyc[B] = 4  tau[C.0 -> P.0] = 1
///                   fin[B.0 mod 5] = {B.1: 1, C.0: 2} }
///   matrix M over F_2 { [1, 1] [0, 1] }      (or "over Q")
/// Statements may end with ';'. '#' starts a comment. Domain problems in
/// endo bodies are kept in Endo::deferred_issues for validate.
Document parse(std::string_view text);
Document parse_file(const std::string& path);

std::string serialize(const GroupDesc& g);
std::string serialize(const std::string& name, const Endo& phi);
std::string serialize(const std::string& name, const ExactMatrix& m);
std::string serialize(const Document& doc);

std::string coord_label(const GroupDesc& g, const Coord& c);

}  // namespace endoring
