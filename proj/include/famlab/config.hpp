#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "famlab/cylinder.hpp"
#include "famlab/famlimit.hpp"
#include "famlab/rational.hpp"

/// JSON input and output. Rationals are written as "num/den"; integers and
/// "n" are accepted on input.
namespace famlab::config {

using json = nlohmann::json;

Rational parse_rational(const json& j);
std::string rational_text(const Rational& q);

/// Reads and parses a JSON file. Errc::missing_input or Errc::parse.
json load_json(const std::filesystem::path& path);

/// {"depth": n} or {"coords": [...]} give a dyadic algebra; {"atoms": n}
/// a uniform one; {"weights": [...]} any positive weights summing to 1.
struct AlgebraSpec {
  boolalg::MeasuredAlgebra algebra;
  std::optional<cylinder::DyadicAlgebra> dyadic;
};

AlgebraSpec parse_algebra(const json& j);

/// "one", "zero", {"atoms": [...]}, {"mask": "0x.."}, {"cylinder": {"c": v}},
/// {"union"|"meet": [...]}, {"minus": [a, b]}, {"complement": e}.
boolalg::Element parse_element(const json& j, const AlgebraSpec& alg);
json element_json(const boolalg::Element& e);

fam::PeriodicFAM parse_fam(const json& j);
fam::IndexPartition parse_partition(const json& j);
famlimit::BlockFamily parse_blocks(const json& j);
famlimit::ConditionSequence parse_sequence(const json& j, const AlgebraSpec& alg);

struct WitnessSpec {
  AlgebraSpec algebra;
  famlimit::WitnessInput input;
  famlimit::SearchOptions search;
  bool seed_given = false;
};

/// The setting part of a fam-limit-run or tree-audit spec.
WitnessSpec parse_witness(const json& j);

json certificate_json(const famlimit::Certificate& c);
famlimit::Certificate parse_certificate(const json& j, const AlgebraSpec& alg);

json report_json(const famlimit::VerificationReport& r);

/// One line per block and per sequence with both sides of every check.
std::string summary_csv(const famlimit::Certificate& c);

}  // namespace famlab::config
