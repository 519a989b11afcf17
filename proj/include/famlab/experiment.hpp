#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "famlab/config.hpp"

/// Experiment runs driven by a JSON spec: density-sweep, intnum-sandwich,
/// tree-audit, fam-limit-run and verify-certificate.
namespace famlab::experiment {

using config::json;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
  std::optional<unsigned> threads;
};

struct Outcome {
  std::string kind;
  bool passed = true;
  json report;
  std::map<std::string, std::string> files;  // name -> contents
};

/// `base` resolves relative paths inside the spec.
Outcome run(const json& spec, const std::filesystem::path& base, const Overrides& o);

/// Re-checks a certificate file written by fam-limit-run.
Outcome verify(const json& certificate_doc);

/// Writes report.json and the other files of `out` below `dir`.
void write(const Outcome& out, const std::filesystem::path& dir);

}  // namespace famlab::experiment
