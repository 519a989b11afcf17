#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "famlab/config.hpp"
#include "famlab/error.hpp"
#include "famlab/experiment.hpp"
#include "famlab/suites.hpp"

using namespace famlab;

namespace {

enum Exit { ok = 0, other = 1, parse = 2, missing = 3, budget = 4, failed = 5 };

int exit_code(Errc c) {
  switch (c) {
    case Errc::parse: return parse;
    case Errc::missing_input: return missing;
    case Errc::budget_exhausted: return budget;
    case Errc::verification_failed: return failed;
    default: return other;
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("FAMLAB_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw Error(Errc::parse, std::string("FAMLAB_SEED is not an integer: ") + s);
  }
}

void print(const experiment::Outcome& out, const std::filesystem::path& dir) {
  std::cout << out.kind << ": " << (out.passed ? "pass" : "FAIL") << "\n";
  std::cout << "report written to " << (dir / "report.json").string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"famlab: exact experiments on finitely additive measures"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
  std::optional<unsigned> threads;
  std::string out_dir = "famlab-out";
  app.add_option("--seed", seed, "seed for sampled runs (falls back to FAMLAB_SEED)");
  app.add_option("--budget", budget, "path budget for sampled witness search");
  app.add_option("--threads", threads, "worker threads for sampled witness search");
  app.add_option("--out-dir", out_dir, "directory for reports");

  std::string spec_path;
  auto* run = app.add_subcommand("run", "run an experiment spec");
  run->add_option("spec", spec_path, "experiment spec (JSON)")->required();

  std::string cert_path;
  auto* verify = app.add_subcommand("verify", "re-check a certificate file");
  verify->add_option("certificate", cert_path, "certificate.json from fam-limit-run")->required();

  std::string suite_name;
  std::string data_dir = "data";
  auto* suite = app.add_subcommand("suite", "run a property suite, or \"all\"");
  suite->add_option("name", suite_name, "suite name")->required();
  suite->add_option("--data", data_dir, "directory with the shipped instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? ok : parse;
  }

  try {
    experiment::Overrides o{seed ? seed : env_seed(), budget, threads};
    if (*run) {
      std::filesystem::path p(spec_path);
      auto out = experiment::run(config::load_json(p), p.parent_path(), o);
      experiment::write(out, out_dir);
      print(out, out_dir);
      return out.passed ? ok : failed;
    }
    if (*verify) {
      auto out = experiment::verify(config::load_json(cert_path));
      experiment::write(out, out_dir);
      print(out, out_dir);
      return out.passed ? ok : failed;
    }
    std::vector<std::string> names;
    if (suite_name == "all") names = suites::names();
    else names.push_back(suite_name);
    bool all = true;
    for (const auto& n : names) {
      auto r = suites::run(n, o.seed.value_or(1), data_dir);
      std::cout << (r.passed ? "pass " : "FAIL ") << r.name << " (" << r.checks << " checks, "
                << r.seconds << " s) " << r.detail << "\n";
      all = all && r.passed;
    }
    return all ? ok : failed;
  } catch (const Error& e) {
    std::cerr << "famlab: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "famlab: " << e.what() << "\n";
    return other;
  }
}
