#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "famlab/boolalg.hpp"
#include "famlab/cylinder.hpp"
#include "famlab/fam.hpp"
#include "famlab/ptree.hpp"
#include "famlab/rational.hpp"

/// Grid refinement, limit construction, the probability-tree witness search
/// and its verification, and the assembly over a density family.
namespace famlab::famlimit {

using boolalg::Element;
using boolalg::MeasuredAlgebra;
using fam::Index;

/// Block sizes |P_k| = sizes[k mod period]. The labels of P_k are 0..|P_k|-1.
struct BlockFamily {
  std::uint64_t period = 1;
  std::vector<std::uint32_t> sizes{1};

  std::size_t size(Index k) const { return sizes[static_cast<std::uint64_t>(k) % period]; }
  void validate() const;
};

/// r_(k,j) = table[k mod period][j] for j < |P_k|.
struct ConditionSequence {
  std::uint64_t period = 1;
  std::vector<std::vector<Element>> table;

  const Element& at(Index k, std::size_t j) const {
    return table[static_cast<std::uint64_t>(k) % period][j];
  }
  void validate(const BlockFamily& blocks, std::size_t atom_count) const;
};

/// Everything the construction is run against.
struct Setting {
  MeasuredAlgebra algebra;
  fam::PeriodicFAM fam;
  fam::IndexPartition partition;
  BlockFamily blocks;
  std::vector<ConditionSequence> sequences;
  std::vector<Rational> deltas;

  std::size_t istar() const noexcept { return sequences.size(); }
  std::size_t mstar() const noexcept { return partition.size(); }
  /// a_m for every block.
  std::vector<Rational> masses() const;
  /// M = {m : a_m > 0}.
  std::vector<std::size_t> positive_blocks() const;
  void validate() const;
};

/// f_{r'}(k) = (1/|P_k|) Σ_{ℓ∈P_k} μ_{r'}(r_ℓ).
fam::PeriodicSimpleFunction f_function(const MeasuredAlgebra& algebra, const BlockFamily& blocks,
                                       const ConditionSequence& seq, const Element& r);

/// ϱ_{r'}(k) = |{ℓ∈P_k : r' ≤ r_ℓ}| / |P_k|.
Rational success_ratio(const BlockFamily& blocks, const ConditionSequence& seq, const Element& r,
                       Index k);

/// ∫_K f_{r'} dΞ
Rational sequence_integral(const MeasuredAlgebra& algebra, const fam::PeriodicFAM& fam,
                           const BlockFamily& blocks, const ConditionSequence& seq,
                           const Element& r);

/// c_{i,m}(r') = (1/a_m) ∫_{B_m} f^i_{r'} dΞ for every i and every m in M.
std::vector<std::vector<Rational>> c_values(const Setting& s, const Element& r);

/// Per-atom integrals. For r' ≤ r, c_{i,m}(r') is the μ_{r'}-average of
/// c_{i,m}(a) over the atoms a ≤ r'.
class AtomProfile {
 public:
  AtomProfile(const Setting& s, const Element& within);

  const Element& within() const noexcept { return within_; }
  /// c[i][position of m in M] for atom a.
  const std::vector<std::vector<Rational>>& c(std::size_t atom) const;
  /// ∫ g^i_a dΞ
  const Rational& integral(std::size_t atom, std::size_t i) const;

 private:
  Element within_;
  std::vector<std::size_t> slot_;  // atom -> row, or npos
  std::vector<std::vector<std::vector<Rational>>> c_;
  std::vector<std::vector<Rational>> integral_;
};

struct GridStep {
  Element r;
  std::vector<std::vector<Rational>> grid;  // c̄ tried at this step
  std::optional<std::size_t> outside_atom;  // an atom below r outside the box
};

struct GridResult {
  Element r_star;
  std::vector<std::vector<Rational>> c;  // c[i][position of m in M]
  std::vector<std::size_t> M;
  Rational tolerance;
  std::uint64_t N = 1;
  std::vector<GridStep> trace;

  /// |c_{i,m}(r') − c_{i,m}| < tolerance for all i, m ∈ M.
  bool in_dstar(const std::vector<std::vector<Rational>>& c_of_r) const;
  bool in_dstar(const Setting& s, const Element& r) const;
};

/// Raises Errc::precondition_failure if some atom a ≤ r has ∫ g^i_a dΞ < δ_i.
GridResult grid_refine(const Setting& s, const Element& r, const Rational& tolerance);

/// The largest r⊗ ≤ r* with ∫ f_r dΞ >= δ for every r ≤ r⊗.
/// Raises Errc::precondition_failure unless μ_{r*}(b_ℓ) >= δ for every ℓ.
Element limit_construct(const MeasuredAlgebra& algebra, const fam::PeriodicFAM& fam,
                        const BlockFamily& blocks, const ConditionSequence& b,
                        const Element& r_star, const Rational& delta);

struct Parameters {
  Rational eps;
  std::size_t h_star = 2;
  Rational eps_star;
  bool empirical = false;
};

/// Minimal even h* and the largest dyadic ε* < ε meeting the Chebyshev
/// constraints for the given masses and i*.
Parameters paper_parameters(const Rational& eps, std::span<const Rational> masses,
                            std::size_t istar);

/// Chosen k's along a path, newest first.
struct PathStep {
  std::size_t m;
  Index k;
  std::shared_ptr<const PathStep> prev;
};

struct NodeState {
  Element r;
  std::size_t m = 0;                      // m_ρ, meaningful at odd depth
  std::shared_ptr<const PathStep> path;   // the (m, k) pairs chosen so far
  std::vector<Rational> z;                // Z^i at this node (even depth > 0)
  std::vector<Rational> zsum;             // Σ Z^i along the path
  std::vector<std::uint32_t> counts;      // U_m along the path
};

/// u_ρ and the atoms y_{ρ,σ} of one odd-depth node.
struct OddExpansion {
  std::vector<Index> u;
  std::vector<boolalg::GeneratedAtom> atoms;
  std::vector<Rational> weights;  // μ_{r_ρ}(y_{ρ,σ})
};

struct LeafEvaluation {
  std::vector<Rational> V;  // per block m < m*
  std::vector<Rational> Y;  // per sequence
  bool in_event = false;
};

/// The alternating tree: even depth picks a block m with probability a_m,
/// odd depth picks (σ, k) with probability μ_{r_ρ}(y_{ρ,σ})/|u_ρ|.
class LemmaTree {
 public:
  using Tree = ptree::ProbTree<NodeState>;

  LemmaTree(const Setting& s, GridResult grid, Parameters params, std::set<Index> F);

  const Setting& setting() const noexcept { return *setting_; }
  const GridResult& grid() const noexcept { return grid_; }
  const Parameters& parameters() const noexcept { return params_; }
  const std::set<Index>& excluded() const noexcept { return F_; }

  NodeState root() const;
  OddExpansion expand_odd(const NodeState& rho) const;
  NodeState odd_child(const NodeState& rho, const OddExpansion& x, std::size_t sigma,
                      std::size_t kidx) const;
  std::vector<Tree::Child> expand(const NodeState& node, std::size_t depth) const;
  Tree tree() const;

  LeafEvaluation evaluate(const NodeState& leaf) const;
  /// u* of a path: the chosen k's in increasing order.
  static std::vector<Index> chosen(const NodeState& leaf);

 private:
  std::shared_ptr<const Setting> setting_;
  GridResult grid_;
  Parameters params_;
  std::set<Index> F_;
  std::vector<Rational> masses_;
};

struct Certificate {
  std::vector<Index> u;
  Element r_plus;
  Element r;  // the condition the search started below
  std::vector<Rational> block_freq;  // |u∩B_m|/|u|
  std::vector<Rational> success;     // (1/|u|)Σ_{k∈u} ϱ^i_{r⊕}(k)
  Rational eps;
  std::vector<Rational> deltas;
  std::vector<Rational> masses;
  std::size_t h_star = 0;
  Rational eps_star;
  bool empirical = false;
  std::uint64_t path_index = 0;
  Rational path_prob;
  std::optional<Rational> prob_event;  // exhaustive mode only
};

struct CheckRow {
  std::string name;  // e.g. "block 0", "sequence 1"
  Rational lhs;
  std::string relation;
  Rational rhs;
  bool pass = false;
};

struct VerificationReport {
  std::vector<CheckRow> rows;
  bool passed = true;
  void add(CheckRow row);
};

/// Re-checks u ≠ ∅, u ∩ F = ∅, 0 ≠ r⊕ ≤ r, and conditions (1) and (2)
/// from scratch, then compares the recorded averages.
VerificationReport verify_certificate(const Certificate& c, const Setting& s,
                                      const std::set<Index>& F);

/// Ξ⁻ uniform on u: |Ξ⁻(u∩B_m) − Ξ(B_m)| < ε, and both
/// Σ_{k} Ξ⁻({k}) ϱ^i(k) >= 1 − ε_i − ε and the strict form.
VerificationReport verify_characterization(const Certificate& c, const Setting& s,
                                           std::span<const Rational> eps_i, const Rational& eps);

enum class SearchMode { exhaustive, sampled };

struct SearchOptions {
  SearchMode mode = SearchMode::sampled;
  std::uint64_t seed = 0;
  std::uint64_t budget = 100'000;
  unsigned threads = 1;
  std::size_t node_cap = 1'000'000;
};

struct TailStats {
  std::uint64_t paths = 0;
  std::uint64_t block_failures = 0;
  std::uint64_t success_failures = 0;
  std::vector<Rational> worst_success;  // smallest Y_i seen per sequence
};

/// Sampled: seeded paths, smallest successful path index wins regardless
/// of thread count. Exhaustive: Pr(E) over the whole last level.
/// Raises Errc::budget_exhausted with tail statistics when nothing is found.
Certificate witness_search(const LemmaTree& tree, const SearchOptions& opt);

/// Seed of path `index` under `seed`.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

/// One sampled path from the root to depth h*.
NodeState sample_leaf(const LemmaTree& tree, std::uint64_t seed, Rational* prob = nullptr);

/// Sequences r̄^i with their conditions s_i and ε_i, δ_i = 1 − ε_i.
struct WitnessInput {
  Setting setting;                 // deltas are overwritten with 1 − ε_i
  std::vector<Element> conditions; // s_i, one per sequence
  std::vector<Rational> eps_i;
  std::optional<Element> start;    // extra condition met into r
  Rational eps;
  std::optional<std::size_t> h_star;  // set: empirical mode
  std::optional<Rational> eps_star;   // empirical default ε/4
  std::set<Index> F;
};

struct WitnessRun {
  Setting setting;
  std::vector<Element> limits;  // lim^{s_i,ε_i}(r̄^i)
  Element r;                    // their meet
  GridResult grid;
  Parameters params;
  Certificate certificate;
  VerificationReport lemma;
  VerificationReport characterization;
};

/// Limits, their meet r, parameters and the grid below r. Raises
/// Errc::precondition_failure when the limits meet in zero.
WitnessRun prepare_witness(WitnessInput in);

/// prepare_witness, then the search and both verifications.
WitnessRun run_witness(WitnessInput in, const SearchOptions& opt);

/// Q_{s,ε} minimal members and the Kelley bound, per (s, ε).
struct AssemblyEntry {
  cylinder::Cylinder s;
  Rational eps;
  std::size_t minimal_members = 0;
  Rational kelley;
  bool bound_holds = false;
};

struct AssemblyReport {
  std::size_t elements = 0;
  std::vector<AssemblyEntry> entries;
  bool covered = false;
  bool bounds_hold = false;
};

/// Checks that every nonzero element lies in some Q_{s,ε} for each ε, and
/// that kelley_lower(Q_{s,ε}) >= 1 − ε. Raises Errc::coverage listing
/// uncovered elements.
AssemblyReport fam_linked_witness(const cylinder::DyadicAlgebra& alg,
                                  std::span<const cylinder::Cylinder> S,
                                  std::span<const Rational> eps_grid);

/// lim^{s,ε}(b̄) = limit_construct(..., s, 1 − ε).
Element limit_map(const cylinder::DyadicAlgebra& alg, const fam::PeriodicFAM& fam,
                  const BlockFamily& blocks, const ConditionSequence& b, const Element& s,
                  const Rational& eps);

}  // namespace famlab::famlimit
