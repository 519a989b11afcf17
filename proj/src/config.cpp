#include "famlab/config.hpp"

#include <fstream>
#include <sstream>

#include "famlab/error.hpp"

namespace famlab::config {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::parse, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::uint64_t to_u64(const json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    bad(std::string(what) + " must be a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

std::vector<Rational> rationals(const json& j) {
  if (!j.is_array()) bad("expected an array of rationals");
  std::vector<Rational> out;
  for (const auto& x : j) out.push_back(parse_rational(x));
  return out;
}

json rational_array(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(rational_text(x));
  return out;
}

}  // namespace

Rational parse_rational(const json& j) {
  if (j.is_number_integer()) return Rational(static_cast<long>(j.get<std::int64_t>()));
  if (!j.is_string()) bad("expected a rational, got " + j.dump());
  std::string s = j.get<std::string>();
  Rational q;
  if (s.empty() || q.set_str(s, 10) != 0) bad("malformed rational \"" + s + "\"");
  if (q.get_den() == 0) bad("zero denominator in \"" + s + "\"");
  q.canonicalize();
  return q;
}

std::string rational_text(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::missing_input, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
}

AlgebraSpec parse_algebra(const json& j) {
  if (j.contains("depth") || j.contains("coords")) {
    std::vector<cylinder::Coord> coords;
    if (j.contains("coords")) {
      for (const auto& c : j.at("coords")) coords.push_back(c.get<cylinder::Coord>());
    } else {
      auto d = to_u64(j.at("depth"), "depth");
      for (std::uint64_t i = 0; i < d; ++i) coords.push_back(static_cast<cylinder::Coord>(i));
    }
    cylinder::DyadicAlgebra alg(coords);
    return AlgebraSpec{alg.algebra(), alg};
  }
  if (j.contains("atoms")) {
    return AlgebraSpec{boolalg::MeasuredAlgebra::uniform(to_u64(j.at("atoms"), "atoms")),
                       std::nullopt};
  }
  if (j.contains("weights")) {
    return AlgebraSpec{boolalg::MeasuredAlgebra(rationals(j.at("weights"))), std::nullopt};
  }
  bad("algebra needs depth, coords, atoms or weights");
}

boolalg::Element parse_element(const json& j, const AlgebraSpec& alg) {
  std::size_t n = alg.algebra.size();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "one") return boolalg::Element::one(n);
    if (s == "zero") return boolalg::Element::zero(n);
    bad("unknown element \"" + s + "\"");
  }
  if (!j.is_object() || j.size() != 1) bad("element must be a one-key object: " + j.dump());
  const auto& [key, val] = *j.items().begin();
  if (key == "atoms") {
    std::vector<std::size_t> atoms;
    for (const auto& a : val) {
      auto x = to_u64(a, "atom");
      if (x >= n) bad("atom " + std::to_string(x) + " out of range");
      atoms.push_back(x);
    }
    return boolalg::Element::from_atoms(n, atoms);
  }
  if (key == "mask") {
    mpz_class m;
    if (!val.is_string() || m.set_str(val.get<std::string>(), 0) != 0) bad("malformed mask");
    boolalg::Element e(n);
    for (std::size_t a = 0; a < n; ++a) {
      if (mpz_tstbit(m.get_mpz_t(), a)) e.set(a);
    }
    return e;
  }
  if (key == "cylinder") {
    if (!alg.dyadic) bad("cylinders need a dyadic algebra");
    cylinder::Cylinder c;
    for (const auto& [coord, v] : val.items()) {
      c.fixed[std::stoll(coord)] = to_u64(v, "cylinder value") != 0;
    }
    return alg.dyadic->embed(c);
  }
  if (key == "union" || key == "meet") {
    boolalg::Element e = key == "union" ? boolalg::Element::zero(n) : boolalg::Element::one(n);
    for (const auto& part : val) {
      if (key == "union") e |= parse_element(part, alg);
      else e &= parse_element(part, alg);
    }
    return e;
  }
  if (key == "minus") {
    if (!val.is_array() || val.size() != 2) bad("minus takes two elements");
    return boolalg::minus(parse_element(val[0], alg), parse_element(val[1], alg));
  }
  if (key == "complement") return boolalg::complement(parse_element(val, alg));
  bad("unknown element form \"" + key + "\"");
}

json element_json(const boolalg::Element& e) { return json{{"atoms", e.atoms()}}; }

fam::PeriodicFAM parse_fam(const json& j) {
  if (j.contains("uniform")) return fam::PeriodicFAM::uniform(to_u64(j.at("uniform"), "period"));
  return fam::PeriodicFAM(to_u64(field(j, "period"), "period"), rationals(field(j, "weights")));
}

fam::IndexPartition parse_partition(const json& j) {
  fam::IndexPartition p;
  p.period = to_u64(field(j, "period"), "period");
  p.blocks = field(j, "blocks").get<std::vector<std::vector<std::uint64_t>>>();
  p.validate();
  return p;
}

famlimit::BlockFamily parse_blocks(const json& j) {
  famlimit::BlockFamily b;
  b.period = to_u64(field(j, "period"), "period");
  b.sizes = field(j, "sizes").get<std::vector<std::uint32_t>>();
  b.validate();
  return b;
}

famlimit::ConditionSequence parse_sequence(const json& j, const AlgebraSpec& alg) {
  famlimit::ConditionSequence s;
  s.period = to_u64(field(j, "period"), "period");
  for (const auto& row : field(j, "table")) {
    std::vector<boolalg::Element> r;
    for (const auto& e : row) r.push_back(parse_element(e, alg));
    s.table.push_back(std::move(r));
  }
  return s;
}

WitnessSpec parse_witness(const json& j) {
  AlgebraSpec alg = parse_algebra(field(j, "algebra"));
  famlimit::BlockFamily blocks;
  if (j.contains("blocks")) blocks = parse_blocks(j.at("blocks"));
  famlimit::Setting s{alg.algebra, parse_fam(field(j, "fam")),
                      parse_partition(field(j, "partition")), blocks, {}, {}};
  famlimit::WitnessInput in{s, {}, {}, std::nullopt, parse_rational(field(j, "eps")),
                            std::nullopt, std::nullopt, {}};
  for (const auto& sj : j.value("sequences", json::array())) {
    in.setting.sequences.push_back(parse_sequence(sj, alg));
    in.conditions.push_back(parse_element(field(sj, "condition"), alg));
    in.eps_i.push_back(parse_rational(field(sj, "eps")));
  }
  if (j.contains("start")) in.start = parse_element(j.at("start"), alg);
  if (j.contains("h_star")) in.h_star = to_u64(j.at("h_star"), "h_star");
  if (j.contains("eps_star")) in.eps_star = parse_rational(j.at("eps_star"));
  for (const auto& k : j.value("F", json::array())) in.F.insert(k.get<fam::Index>());

  WitnessSpec out{alg, std::move(in), {}, false};
  auto mode = j.value("mode", std::string("sampled"));
  if (mode == "exhaustive") out.search.mode = famlimit::SearchMode::exhaustive;
  else if (mode != "sampled") bad("mode must be sampled or exhaustive");
  if (j.contains("seed")) {
    out.search.seed = to_u64(j.at("seed"), "seed");
    out.seed_given = true;
  }
  if (j.contains("budget")) out.search.budget = to_u64(j.at("budget"), "budget");
  if (j.contains("threads")) out.search.threads = static_cast<unsigned>(to_u64(j.at("threads"), "threads"));
  if (j.contains("node_cap")) out.search.node_cap = to_u64(j.at("node_cap"), "node_cap");
  return out;
}

json certificate_json(const famlimit::Certificate& c) {
  json j;
  j["u"] = c.u;
  j["r_plus"] = element_json(c.r_plus);
  j["r"] = element_json(c.r);
  j["block_freq"] = rational_array(c.block_freq);
  j["success"] = rational_array(c.success);
  j["eps"] = rational_text(c.eps);
  j["deltas"] = rational_array(c.deltas);
  j["masses"] = rational_array(c.masses);
  j["h_star"] = c.h_star;
  j["eps_star"] = rational_text(c.eps_star);
  j["empirical"] = c.empirical;
  j["path_index"] = c.path_index;
  j["path_prob"] = rational_text(c.path_prob);
  if (c.prob_event) j["prob_event"] = rational_text(*c.prob_event);
  return j;
}

famlimit::Certificate parse_certificate(const json& j, const AlgebraSpec& alg) {
  famlimit::Certificate c;
  c.u = field(j, "u").get<std::vector<fam::Index>>();
  c.r_plus = parse_element(field(j, "r_plus"), alg);
  c.r = parse_element(field(j, "r"), alg);
  c.block_freq = rationals(field(j, "block_freq"));
  c.success = rationals(field(j, "success"));
  c.eps = parse_rational(field(j, "eps"));
  c.deltas = rationals(field(j, "deltas"));
  c.masses = rationals(field(j, "masses"));
  c.h_star = to_u64(field(j, "h_star"), "h_star");
  c.eps_star = parse_rational(field(j, "eps_star"));
  c.empirical = field(j, "empirical").get<bool>();
  c.path_index = to_u64(field(j, "path_index"), "path_index");
  c.path_prob = parse_rational(field(j, "path_prob"));
  if (j.contains("prob_event")) c.prob_event = parse_rational(j.at("prob_event"));
  return c;
}

json report_json(const famlimit::VerificationReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"check", row.name},
                    {"lhs", rational_text(row.lhs)},
                    {"relation", row.relation},
                    {"rhs", rational_text(row.rhs)},
                    {"pass", row.pass}});
  }
  return json{{"passed", r.passed}, {"rows", rows}};
}

std::string summary_csv(const famlimit::Certificate& c) {
  std::ostringstream os;
  os << "kind,index,value,relation,bound,target\n";
  for (std::size_t m = 0; m < c.block_freq.size(); ++m) {
    Rational dev = abs(c.block_freq[m] - c.masses.at(m));
    os << "block," << m << ',' << rational_text(dev) << ",<," << rational_text(c.eps) << ','
       << rational_text(c.masses[m]) << '\n';
  }
  for (std::size_t i = 0; i < c.success.size(); ++i) {
    os << "sequence," << i << ',' << rational_text(c.success[i]) << ",>=,"
       << rational_text(c.deltas.at(i) - c.eps) << ',' << rational_text(c.deltas[i]) << '\n';
  }
  return os.str();
}

}  // namespace famlab::config
