#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "endoring/endokit.hpp"
#include "endoring/inertia.hpp"

namespace endoring {

struct FGSubgroup {
  GroupRef group;
  std::vector<Element> generators;
  std::string family;
};

/// Index value; nullopt stands for an infinite index.
using IndexValue = std::optional<Integer>;
std::string to_string(const IndexValue& v);
/// Total order with infinity on top.
bool index_less(const IndexValue& a, const IndexValue& b);

/// |H + phi(H) : H| via Smith normal form of an integer presentation.
IndexValue index_in_sum(const FGSubgroup& h, const Endo& phi);

/// Same index by listing elements; finite groups of order <= 2^12 only.
Integer naive_index(const FGSubgroup& h, const Endo& phi);

/// Random and systematic subgroups of `g` (torsion coordinates use copies
/// below `copy_limit` and Prufer depth <= `depth`).
std::vector<FGSubgroup> sample_subgroups(GroupRef g, std::size_t count, std::uint64_t seed, unsigned copy_limit = 2,
                                         unsigned depth = 2);
/// Every subgroup of a finite group, smallest generating lists found by
/// closure search. Throws UsageError when more than `budget` subgroups exist.
std::vector<FGSubgroup> enumerate_all_subgroups(GroupRef finite, std::size_t budget = 1u << 16);

struct TruncatedEndo {
  Truncation trunc;
  GroupRef group;
  Endo phi;  // projection of phi to the truncated group
};

TruncatedEndo truncate_endo(const Endo& phi, unsigned level);
/// Depth of Prufer layers needed so fin images fit in the truncation.
unsigned required_prufer_depth(const Endo& phi);

enum class Hint { Stable, Growing, Indeterminate };
std::string to_string(Hint h);

struct LevelRecord {
  unsigned level = 0;
  IndexValue max_index;
  std::string argmax_family;
};

struct InertnessEvidence {
  std::vector<LevelRecord> per_level;
  IndexValue untruncated_max;
  std::string untruncated_argmax;
  std::vector<std::string> sampled_families;
  Hint hint = Hint::Indeterminate;
};

InertnessEvidence inertness_profile(const Endo& phi, const std::vector<unsigned>& levels, std::size_t samples,
                                    std::uint64_t seed);

struct FsReport {
  std::vector<std::pair<unsigned, Integer>> per_level;
  Hint hint = Hint::Indeterminate;
};

/// Periodic groups only; throws UsageError otherwise.
FsReport fs_profile(const Endo& phi, const std::vector<unsigned>& levels, std::size_t samples, std::uint64_t seed);

struct WitnessFamily {
  std::string name;
  std::vector<std::pair<unsigned, IndexValue>> indices;  // parameter N -> index
  std::vector<FGSubgroup> members;
  bool unbounded = false;
};

std::optional<WitnessFamily> witness_search(const Endo& phi, const Violation& v, unsigned budget = 6);

/// Systematic families of the truncated profile at parameter n.
std::vector<FGSubgroup> systematic_families(GroupRef g, unsigned n);

}  // namespace endoring
