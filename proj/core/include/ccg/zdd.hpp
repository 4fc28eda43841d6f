#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccg/network.hpp"
#include "ccg/random.hpp"
#include "ccg/strategy.hpp"

namespace ccg {

/// Reference to a diagram node. 0 and 1 are the reject (⊥) and accept (⊤)
/// terminals; internal node i is stored at index i - 2 of `Zdd::nodes()`.
using NodeRef = std::uint32_t;
inline constexpr NodeRef kBottom = 0;
inline constexpr NodeRef kTop = 1;

struct ZddNode {
  Resource label = 0;
  NodeRef lo = kBottom;
  NodeRef hi = kBottom;
  friend bool operator==(const ZddNode&, const ZddNode&) = default;
};

/// Reduced, ordered zero-suppressed decision diagram over resources [0, n).
///
/// Children always have smaller references than their parent, so iterating
/// nodes in increasing reference order is a reverse topological order. Every
/// root-to-⊤ path spells one member of the family through its hi-arcs.
class Zdd {
 public:
  /// Validates every structural invariant; throws ValidationError.
  static Zdd from_nodes(std::size_t resource_count, std::vector<Resource> variable_order,
                        std::vector<ZddNode> nodes, NodeRef root);
  /// Compiles an explicit family (duplicates collapse).
  static Zdd from_family(std::size_t resource_count, std::span<const Strategy> family,
                         std::vector<Resource> variable_order = {});

  std::size_t resource_count() const noexcept { return order_.size(); }
  std::span<const Resource> variable_order() const noexcept { return order_; }
  /// Position of resource r in the variable order.
  std::size_t level_of(Resource r) const { return level_.at(r); }

  NodeRef root() const noexcept { return root_; }
  /// Internal node count.
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::span<const ZddNode> nodes() const noexcept { return nodes_; }
  const ZddNode& node(NodeRef ref) const { return nodes_.at(ref - 2); }
  static bool is_terminal(NodeRef ref) noexcept { return ref < 2; }

  /// Throws ValidationError describing the first violated invariant.
  void check_invariants() const;

  friend bool operator==(const Zdd&, const Zdd&) = default;

 private:
  Zdd() = default;
  std::vector<Resource> order_;
  std::vector<std::size_t> level_;
  std::vector<ZddNode> nodes_;
  NodeRef root_ = kBottom;

  friend class ZddBuilder;
};

/// Identity permutation of [0, n).
std::vector<Resource> identity_order(std::size_t n);

/// Frontier-based top-down compilation of a strategy family. An infeasible
/// family yields a ⊥-rooted diagram. `variable_order` defaults to the
/// network's edge order.
Zdd build_family(const Network& net, const FamilySpec& spec,
                 std::vector<Resource> variable_order = {});

/// Lists every member, sorted. Throws CapExceededError when the family has
/// more than `cap` members.
std::vector<Strategy> enumerate(const Zdd& zdd, std::size_t cap);

struct FamilyCount {
  double log_count = 0.0;               ///< natural log; -inf for the empty family
  std::optional<std::uint64_t> exact;   ///< present when the count is <= 2^63
};
FamilyCount count(const Zdd& zdd);

struct MinCostResult {
  Strategy strategy;
  double cost = 0.0;
};

/// Exact minimum of sum_{i in S} w_i over the family. Ties follow lo.
MinCostResult min_cost(const Zdd& zdd, std::span<const double> weights);

/// Per-node counts of completions that select exactly r more items, in the
/// log domain, for r in [0, max_length].
class LengthCountTable {
 public:
  explicit LengthCountTable(const Zdd& zdd);

  std::size_t max_length() const noexcept { return max_length_; }
  double log_count(NodeRef ref, std::size_t r) const;
  /// Exact counts are available when every entry fits in 63 bits.
  std::optional<std::uint64_t> exact_count(NodeRef ref, std::size_t r) const;
  bool has_exact() const noexcept { return !exact_.empty(); }
  /// {r : N_r(root) > 0}, ascending.
  std::span<const std::size_t> feasible_lengths() const noexcept { return feasible_; }
  NodeRef root() const noexcept { return root_; }

 private:
  std::size_t width() const noexcept { return max_length_ + 1; }
  std::size_t max_length_ = 0;
  NodeRef root_ = kBottom;
  std::vector<double> log_;
  std::vector<std::uint64_t> exact_;
  std::vector<std::size_t> feasible_;
};

LengthCountTable count_by_length(const Zdd& zdd);

/// US: uniform over strategies. UL: uniform length class, then uniform
/// within it. HL: length r with weight 1/r over r >= 1, then uniform.
enum class SamplingScheme { US, UL, HL };

SamplingScheme parse_scheme(std::string_view text);
std::string_view to_string(SamplingScheme scheme);

/// Randomized root-to-⊤ traversal with branch probabilities formed from
/// log-domain counts. Holds a non-owning reference to the diagram.
class ZddSampler {
 public:
  ZddSampler(const Zdd& zdd, SamplingScheme scheme);

  SamplingScheme scheme() const noexcept { return scheme_; }
  const Zdd& diagram() const noexcept { return *zdd_; }

  Strategy draw(Rng& rng) const;
  std::vector<Strategy> draw(std::size_t m, Rng& rng) const;

  /// Analytic probability q(S) of drawing S (S assumed to be a member).
  double probability(const Strategy& s) const;
  /// Probability of each length class; zero outside the feasible set.
  std::span<const double> length_weights() const noexcept { return length_weights_; }

 private:
  const Zdd* zdd_;
  SamplingScheme scheme_;
  std::vector<double> log_node_count_;
  std::optional<LengthCountTable> lengths_;
  std::vector<double> length_weights_;
  std::vector<double> length_cdf_;
};

/// m i.i.d. draws, deterministic in `seed`.
std::vector<Strategy> sample(const Zdd& zdd, SamplingScheme scheme, std::size_t m,
                             std::uint64_t seed);

/// Best of m sampled strategies under `weights`; ties go to the earlier draw.
MinCostResult subsampled_lmo(const ZddSampler& sampler, std::size_t m,
                             std::span<const double> weights, Rng& rng);
MinCostResult subsampled_lmo(const Zdd& zdd, SamplingScheme scheme, std::size_t m,
                             std::span<const double> weights, std::uint64_t seed);

/// q(Opt(w)) computed by enumeration; a test oracle for families of at most
/// `cap` members.
double optimizer_mass(const Zdd& zdd, SamplingScheme scheme, std::span<const double> weights,
                      std::size_t cap = 100000);

// Binary cache ------------------------------------------------------------------

/// Key identifying a compiled family: network fingerprint, family text and
/// variable order.
std::uint64_t zdd_cache_key(const Network& net, const FamilySpec& spec,
                            std::span<const Resource> variable_order);

void write_zdd(const std::filesystem::path& path, const Zdd& zdd, std::uint64_t key);
/// Reads a cache file. Throws ValidationError on a bad header, a key
/// mismatch (when `expected_key` is given) or a structurally invalid diagram.
Zdd read_zdd(const std::filesystem::path& path, std::optional<std::uint64_t> expected_key = {});

/// Returns the cached diagram when `cache` exists with a matching key,
/// otherwise compiles it and writes the cache.
Zdd load_or_build(const Network& net, const FamilySpec& spec, const std::filesystem::path& cache,
                  std::vector<Resource> variable_order = {});

}  // namespace ccg
