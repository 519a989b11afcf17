#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

/// Property suites shared by the command line tool and the acceptance run.
namespace famlab::suites {

struct Result {
  std::string name;
  bool passed = true;
  std::size_t checks = 0;
  std::string detail;  // first failure, or a short summary
  double seconds = 0;
};

/// atoms, integration, trees, binomial, sandwich, limits, witness,
/// assembly, determinism
const std::vector<std::string>& names();

/// `data` holds the shipped instances used by witness, assembly and
/// determinism. Throws Errc::missing_input for an unknown name.
Result run(const std::string& name, std::uint64_t seed, const std::filesystem::path& data);

}  // namespace famlab::suites
