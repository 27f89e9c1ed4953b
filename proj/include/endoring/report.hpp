#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "endoring/textformat.hpp"

namespace endoring {

inline constexpr const char* kVersion = "1.0.0";

struct SessionConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<unsigned> levels{2, 4, 6, 8};
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  unsigned budget = 6;
  std::optional<std::string> out;
  bool enumerate_all = false;
  std::optional<std::string> only;  // restrict to one endo or matrix
  bool inject_wrong_verdict = false;  // test hook for the contradiction path
};

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 usage error, 2 contradiction
  std::string report;
  std::string error;
};

/// Parses "2,4,6,8"; throws UsageError on bad or non-ascending input.
std::vector<unsigned> parse_levels(const std::string& text);

/// Runs a command on already parsed documents (labels are used as the
/// report's input names).
RunResult run_documents(const SessionConfig& cfg, const std::vector<std::string>& labels,
                        const std::vector<Document>& docs);
/// Reads cfg.inputs and runs the command. Never throws.
RunResult run(const SessionConfig& cfg);

}  // namespace endoring
