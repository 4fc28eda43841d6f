#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ccg/congestion.hpp"
#include "ccg/equilibrium.hpp"
#include "ccg/leader.hpp"
#include "ccg/network.hpp"
#include "ccg/zdd.hpp"

namespace ccg {

inline constexpr int kScenarioVersion = 1;

struct InlineEdge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 0.0;
};

struct NetworkSource {
  std::optional<std::filesystem::path> tntp;
  std::optional<std::filesystem::path> coords;
  std::vector<InlineEdge> edges;       ///< used when no TNTP file is given
  std::vector<NodeId> subgraph_nodes;  ///< empty keeps the whole component
  bool euclidean = false;              ///< weights from coordinates instead of free-flow times
  bool normalize = true;
};

/// A strategy family given member by member over `resources` items, for
/// instances (such as parallel links) that a simple graph cannot express.
struct ExplicitFamily {
  std::size_t resources = 0;
  std::vector<Strategy> strategies;
};

struct CostSpec {
  std::string family = "fractional";  ///< fractional | two_link | parallel_kinks
  double c_scale = 1.0;
  std::vector<double> free_flow;      ///< explicit d; required for explicit families
  std::size_t n = 0;                  ///< parallel_kinks link count
  double m = 4.0;                     ///< parallel_kinks M
};

struct InnerSettings {
  std::size_t T = 3000;
  LmoKind lmo = LmoKind::ZddExact;
  SamplingScheme scheme = SamplingScheme::US;
  std::size_t m = 1;
  std::size_t gap_every = 100;
};

std::string_view to_string(LmoKind kind);
LmoKind parse_lmo_kind(std::string_view text);

struct Variant {
  std::string name;
  InnerSettings inner;
  ZoConfig zo;
};

struct ScenarioConfig {
  std::string name;
  std::filesystem::path base_dir;  ///< relative paths resolve against this
  std::optional<NetworkSource> network;
  std::optional<FamilySpec> family;
  std::optional<ExplicitFamily> explicit_family;
  std::vector<Resource> variable_order;
  std::optional<std::filesystem::path> zdd_cache;
  CostSpec cost;
  std::optional<std::vector<double>> theta0;
  std::vector<Variant> variants;  ///< never empty after parsing
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output = "results";
  std::optional<std::size_t> workers;
};

/// Parses a scenario document (JSON text). Throws ValidationError with the
/// offending key on schema violations.
ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir);
/// Reads and parses a file; a missing file is a ValidationError naming it.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Resolved objects for a scenario: network, diagram, cost model and
/// samplers. Immutable apart from lazily built samplers (thread-safe).
class Instance {
 public:
  explicit Instance(const ScenarioConfig& config);
  Instance(const Instance&) = delete;
  Instance& operator=(const Instance&) = delete;

  const CostFamily& model() const { return *model_; }
  const Network* network() const { return network_ ? &*network_ : nullptr; }
  const Zdd& zdd() const { return *zdd_; }
  const ZddSampler& sampler(SamplingScheme scheme) const;
  LmoConfig lmo(const InnerSettings& inner) const;
  std::vector<double> theta0() const { return theta0_; }
  /// Preprocessing notes worth recording with a run (warnings, clamps).
  const std::vector<std::string>& notes() const { return notes_; }

 private:
  std::optional<Network> network_;
  std::optional<FamilySpec> family_;
  std::unique_ptr<Zdd> zdd_;
  std::unique_ptr<CostFamily> model_;
  std::vector<double> theta0_;
  std::vector<std::string> notes_;
  mutable std::array<std::once_flag, 3> sampler_once_;
  mutable std::array<std::unique_ptr<ZddSampler>, 3> samplers_;
};

/// Builds the network described by `source` (paths relative to `base_dir`).
Network load_network(const NetworkSource& source, const std::filesystem::path& base_dir);

/// --workers flag, then CCG_WORKERS, then the scenario value, then 1.
std::size_t resolve_workers(std::optional<std::size_t> flag,
                            std::optional<std::size_t> scenario);

}  // namespace ccg
