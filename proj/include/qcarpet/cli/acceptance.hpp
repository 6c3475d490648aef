#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qcarpet::cli {

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
};

struct AcceptanceOptions {
  unsigned threads = 4;
  std::filesystem::path scratch;  // determinism output files; temp dir if empty
  int velocity_q = 2;             // an odd value reports the constant branch
};

/// Runs every acceptance criterion, printing one line per criterion to
/// `log` as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& log);

std::string format_result(const CriterionResult& r);

}  // namespace qcarpet::cli
