#include "ccg/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ccg/errors.hpp"

namespace ccg {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void fail(std::string_view where, const std::string& what) {
  throw ValidationError("scenario: " + std::string(where) + ": " + what);
}

void check_keys(const json& obj, std::string_view where,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(where, "unknown key '" + key + "'");
    }
  }
}

std::string join(std::string_view where, std::string_view key) {
  return std::string(where) + "." + std::string(key);
}

double get_number(const json& v, std::string_view where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

std::uint64_t get_unsigned(const json& v, std::string_view where) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned())) {
    fail(where, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

NodeId get_node(const json& v, std::string_view where) {
  if (!v.is_number_integer()) fail(where, "expected a node id");
  const auto id = v.get<std::int64_t>();
  if (id < 1 || id > std::numeric_limits<NodeId>::max()) fail(where, "node id out of range");
  return static_cast<NodeId>(id);
}

std::string get_string(const json& v, std::string_view where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& v, std::string_view where) {
  if (!v.is_boolean()) fail(where, "expected true or false");
  return v.get<bool>();
}

const json& array_at(const json& obj, std::string_view key, std::string_view where) {
  const auto& v = obj.at(std::string(key));
  if (!v.is_array()) fail(join(where, key), "expected an array");
  return v;
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

NetworkSource parse_network(const json& obj, const fs::path& base) {
  constexpr std::string_view where = "network";
  check_keys(obj, where, {"tntp", "coords", "edges", "subgraph_nodes", "weights", "normalize"});
  NetworkSource src;
  if (obj.contains("tntp")) src.tntp = get_string(obj["tntp"], "network.tntp");
  if (obj.contains("coords")) src.coords = get_string(obj["coords"], "network.coords");
  for (const auto& opt : {src.tntp, src.coords}) {
    if (opt && !fs::exists(resolve(base, *opt))) {
      fail(where, "file not found: " + resolve(base, *opt).string());
    }
  }
  if (obj.contains("edges")) {
    if (src.tntp) fail(where, "give either 'tntp' or 'edges', not both");
    for (const auto& e : array_at(obj, "edges", where)) {
      if (!e.is_array() || e.size() != 3) fail("network.edges", "each edge is [u, v, weight]");
      src.edges.push_back({get_node(e[0], "network.edges"), get_node(e[1], "network.edges"),
                           get_number(e[2], "network.edges")});
    }
  }
  if (!src.tntp && src.edges.empty()) fail(where, "needs 'tntp' or a nonempty 'edges' list");
  if (obj.contains("subgraph_nodes")) {
    for (const auto& v : array_at(obj, "subgraph_nodes", where)) {
      src.subgraph_nodes.push_back(get_node(v, "network.subgraph_nodes"));
    }
  }
  if (obj.contains("weights")) {
    const auto w = get_string(obj["weights"], "network.weights");
    if (w == "euclidean") {
      src.euclidean = true;
    } else if (w != "freeflow") {
      fail("network.weights", "expected freeflow or euclidean");
    }
  }
  if (src.euclidean && !src.coords) fail(where, "euclidean weights need 'coords'");
  if (obj.contains("normalize")) src.normalize = get_bool(obj["normalize"], "network.normalize");
  return src;
}

std::vector<NodeId> node_list(const json& obj, std::string_view key, std::string_view where) {
  std::vector<NodeId> out;
  for (const auto& v : array_at(obj, key, where)) out.push_back(get_node(v, join(where, key)));
  return out;
}

void parse_family(const json& obj, ScenarioConfig& cfg) {
  constexpr std::string_view where = "family";
  if (!obj.is_object() || !obj.contains("kind")) fail(where, "needs a 'kind'");
  const auto kind = get_string(obj["kind"], "family.kind");
  if (kind == "st_paths" || kind == "hamiltonian_st_paths") {
    check_keys(obj, where, {"kind", "s", "t"});
    if (!obj.contains("s") || !obj.contains("t")) fail(where, kind + " needs 's' and 't'");
    const NodeId s = get_node(obj["s"], "family.s");
    const NodeId t = get_node(obj["t"], "family.t");
    if (kind == "st_paths") {
      cfg.family = StPaths{s, t};
    } else {
      cfg.family = HamiltonianStPaths{s, t};
    }
  } else if (kind == "steiner_cycles") {
    check_keys(obj, where, {"kind", "terminals"});
    if (!obj.contains("terminals")) fail(where, "steiner_cycles needs 'terminals'");
    cfg.family = SteinerCycles{node_list(obj, "terminals", where)};
  } else if (kind == "explicit") {
    check_keys(obj, where, {"kind", "resources", "strategies"});
    if (!obj.contains("resources") || !obj.contains("strategies")) {
      fail(where, "explicit families need 'resources' and 'strategies'");
    }
    ExplicitFamily fam;
    fam.resources = get_unsigned(obj["resources"], "family.resources");
    if (fam.resources == 0) fail("family.resources", "must be positive");
    for (const auto& s : array_at(obj, "strategies", where)) {
      if (!s.is_array()) fail("family.strategies", "each strategy is a list of resources");
      std::vector<Resource> items;
      for (const auto& r : s) {
        const auto idx = get_unsigned(r, "family.strategies");
        if (idx >= fam.resources) fail("family.strategies", "resource index out of range");
        items.push_back(static_cast<Resource>(idx));
      }
      fam.strategies.push_back(Strategy::from_indices(std::move(items)));
    }
    if (fam.strategies.empty()) fail(where, "explicit family is empty");
    cfg.explicit_family = std::move(fam);
  } else {
    fail("family.kind", "unknown kind '" + kind + "'");
  }
  if (cfg.family) {
    try {
      validate(*cfg.family);
    } catch (const ValidationError& e) {
      fail(where, e.what());
    }
  }
}

CostSpec parse_cost(const json& obj) {
  constexpr std::string_view where = "cost";
  check_keys(obj, where, {"family", "C", "d", "n", "M"});
  CostSpec cost;
  if (obj.contains("family")) cost.family = get_string(obj["family"], "cost.family");
  if (cost.family == "fractional") {
    if (!obj.contains("C")) fail(where, "fractional cost needs 'C'");
    cost.c_scale = get_number(obj["C"], "cost.C");
    if (!(cost.c_scale > 0.0)) fail("cost.C", "must be positive");
    if (obj.contains("d")) {
      for (const auto& v : array_at(obj, "d", where)) cost.free_flow.push_back(get_number(v, "cost.d"));
    }
  } else if (cost.family == "two_link") {
    check_keys(obj, where, {"family"});
  } else if (cost.family == "parallel_kinks") {
    check_keys(obj, where, {"family", "n", "M"});
    if (obj.contains("n")) cost.n = get_unsigned(obj["n"], "cost.n");
    if (obj.contains("M")) cost.m = get_number(obj["M"], "cost.M");
  } else {
    fail("cost.family", "unknown family '" + cost.family + "'");
  }
  return cost;
}

void apply_inner(const json& obj, std::string_view where, InnerSettings& inner) {
  check_keys(obj, where, {"T", "lmo", "scheme", "m", "gap_every"});
  if (obj.contains("T")) inner.T = get_unsigned(obj["T"], join(where, "T"));
  if (obj.contains("lmo")) {
    try {
      inner.lmo = parse_lmo_kind(get_string(obj["lmo"], join(where, "lmo")));
    } catch (const ValidationError& e) {
      fail(join(where, "lmo"), e.what());
    }
  }
  if (obj.contains("scheme")) {
    try {
      inner.scheme = parse_scheme(get_string(obj["scheme"], join(where, "scheme")));
    } catch (const ValidationError& e) {
      fail(join(where, "scheme"), e.what());
    }
  }
  if (obj.contains("m")) inner.m = get_unsigned(obj["m"], join(where, "m"));
  if (obj.contains("gap_every")) {
    inner.gap_every = get_unsigned(obj["gap_every"], join(where, "gap_every"));
  }
  if (inner.T < 1) fail(join(where, "T"), "must be >= 1");
  if (inner.m < 1) fail(join(where, "m"), "must be >= 1");
}

void apply_zo(const json& obj, std::string_view where, ZoConfig& zo) {
  check_keys(obj, where, {"K", "B", "rho", "eta", "directions", "interiorize", "seed"});
  if (obj.contains("K")) zo.K = get_unsigned(obj["K"], join(where, "K"));
  if (obj.contains("B")) zo.B = get_unsigned(obj["B"], join(where, "B"));
  if (obj.contains("rho")) zo.rho = get_number(obj["rho"], join(where, "rho"));
  if (obj.contains("eta")) zo.eta = get_number(obj["eta"], join(where, "eta"));
  if (obj.contains("directions")) {
    try {
      zo.directions = parse_direction_kind(get_string(obj["directions"], join(where, "directions")));
    } catch (const ValidationError& e) {
      fail(join(where, "directions"), e.what());
    }
  }
  if (obj.contains("interiorize")) {
    zo.interiorize = get_bool(obj["interiorize"], join(where, "interiorize"));
  }
  if (obj.contains("seed")) zo.seed = get_unsigned(obj["seed"], join(where, "seed"));
  try {
    zo.validate();
  } catch (const ValidationError& e) {
    fail(where, e.what());
  }
}

bool safe_name(const std::string& name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

std::string_view to_string(LmoKind kind) {
  switch (kind) {
    case LmoKind::ShortestPath:
      return "shortest_path";
    case LmoKind::ZddExact:
      return "zdd_exact";
    case LmoKind::ZddSubsampled:
      return "zdd_subsampled";
  }
  return "?";
}

LmoKind parse_lmo_kind(std::string_view text) {
  if (text == "shortest_path") return LmoKind::ShortestPath;
  if (text == "zdd_exact") return LmoKind::ZddExact;
  if (text == "zdd_subsampled") return LmoKind::ZddSubsampled;
  throw ValidationError("unknown lmo '" + std::string(text) +
                        "' (expected shortest_path, zdd_exact or zdd_subsampled)");
}

ScenarioConfig parse_scenario(std::string_view text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("scenario: not valid JSON: ") + e.what());
  }
  check_keys(doc, "scenario",
             {"scenario_version", "name", "network", "family", "variable_order", "zdd_cache",
              "cost", "theta0", "inner", "zo", "variants", "seeds", "output", "workers"});
  if (!doc.contains("scenario_version")) fail("scenario", "missing 'scenario_version'");
  if (get_unsigned(doc["scenario_version"], "scenario_version") != kScenarioVersion) {
    fail("scenario_version", "unsupported version (expected 1)");
  }

  ScenarioConfig cfg;
  cfg.base_dir = base_dir;
  cfg.name = doc.contains("name") ? get_string(doc["name"], "name") : "scenario";
  if (!doc.contains("family")) fail("scenario", "missing 'family'");
  parse_family(doc["family"], cfg);
  if (doc.contains("network")) {
    if (cfg.explicit_family) fail("network", "explicit families take no network");
    cfg.network = parse_network(doc["network"], base_dir);
  } else if (!cfg.explicit_family) {
    fail("scenario", "missing 'network'");
  }
  if (doc.contains("variable_order")) {
    for (const auto& v : array_at(doc, "variable_order", "scenario")) {
      cfg.variable_order.push_back(static_cast<Resource>(get_unsigned(v, "variable_order")));
    }
  }
  if (doc.contains("zdd_cache")) {
    if (cfg.explicit_family) fail("zdd_cache", "explicit families are not cached");
    cfg.zdd_cache = resolve(base_dir, get_string(doc["zdd_cache"], "zdd_cache"));
  }
  if (!doc.contains("cost")) fail("scenario", "missing 'cost'");
  cfg.cost = parse_cost(doc["cost"]);
  if (doc.contains("theta0")) {
    std::vector<double> t;
    for (const auto& v : array_at(doc, "theta0", "scenario")) t.push_back(get_number(v, "theta0"));
    cfg.theta0 = std::move(t);
  }

  InnerSettings inner;
  if (doc.contains("inner")) apply_inner(doc["inner"], "inner", inner);
  ZoConfig zo;
  if (doc.contains("zo")) apply_zo(doc["zo"], "zo", zo);
  if (doc.contains("variants")) {
    const auto& list = array_at(doc, "variants", "scenario");
    if (list.empty()) fail("variants", "must not be empty");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string where = "variants[" + std::to_string(i) + "]";
      check_keys(list[i], where, {"name", "inner", "zo"});
      if (!list[i].contains("name")) fail(where, "missing 'name'");
      Variant v{get_string(list[i]["name"], where + ".name"), inner, zo};
      if (!safe_name(v.name)) fail(where + ".name", "use letters, digits, '_', '-' or '.'");
      for (const auto& other : cfg.variants) {
        if (other.name == v.name) fail(where + ".name", "duplicate variant '" + v.name + "'");
      }
      if (list[i].contains("inner")) apply_inner(list[i]["inner"], where + ".inner", v.inner);
      if (list[i].contains("zo")) apply_zo(list[i]["zo"], where + ".zo", v.zo);
      cfg.variants.push_back(std::move(v));
    }
  } else {
    cfg.variants.push_back({"default", inner, zo});
  }
  if (doc.contains("seeds")) {
    for (const auto& v : array_at(doc, "seeds", "scenario")) cfg.seeds.push_back(get_unsigned(v, "seeds"));
  }
  if (doc.contains("output")) cfg.output = resolve(base_dir, get_string(doc["output"], "output"));
  if (doc.contains("workers")) {
    const auto w = get_unsigned(doc["workers"], "workers");
    if (w < 1) fail("workers", "must be >= 1");
    cfg.workers = w;
  }
  return cfg;
}

ScenarioConfig load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("scenario file not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str(), path.parent_path());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Network load_network(const NetworkSource& source, const fs::path& base_dir) {
  Network net = [&] {
    if (source.tntp) return symmetrize(parse_tntp_file(resolve(base_dir, *source.tntp)));
    DirectedNetwork d;
    for (const auto& e : source.edges) {
      d.node_count = std::max({d.node_count, e.u, e.v});
      d.arcs.push_back({e.u, e.v, e.weight, {}});
    }
    return symmetrize(d);
  }();
  if (source.coords) net = net.with_coordinates(parse_coordinates_file(resolve(base_dir, *source.coords)));
  if (!source.subgraph_nodes.empty()) net = induced_subgraph(net, source.subgraph_nodes);
  if (source.euclidean) net = euclidean_weights(net);
  if (source.normalize) net = normalize_freeflow(net);
  return net;
}

Instance::Instance(const ScenarioConfig& config) {
  std::size_t n = 0;
  if (config.explicit_family) {
    zdd_ = std::make_unique<Zdd>(Zdd::from_family(config.explicit_family->resources,
                                                  config.explicit_family->strategies,
                                                  config.variable_order));
  } else {
    if (!config.network || !config.family) throw ValidationError("scenario needs a network and family");
    network_ = load_network(*config.network, config.base_dir);
    family_ = config.family;
    for (const auto& w : network_->warnings()) notes_.push_back(w);
    zdd_ = std::make_unique<Zdd>(
        config.zdd_cache ? load_or_build(*network_, *family_, *config.zdd_cache, config.variable_order)
                         : build_family(*network_, *family_, config.variable_order));
  }
  n = zdd_->resource_count();

  const auto& cost = config.cost;
  if (cost.family == "fractional") {
    std::vector<double> d = cost.free_flow;
    if (d.empty()) {
      if (!network_) throw ValidationError("scenario: cost.d is required for explicit families");
      d.assign(network_->weights().begin(), network_->weights().end());
    }
    if (d.size() != n) {
      throw ValidationError("scenario: cost.d has " + std::to_string(d.size()) +
                            " entries but the family has " + std::to_string(n) + " resources");
    }
    const auto zeros = std::count(d.begin(), d.end(), 0.0);
    auto model = std::make_unique<FractionalCost>(std::move(d), cost.c_scale);
    if (zeros > 0) {
      notes_.push_back(std::to_string(zeros) +
                       " resources have zero free-flow weight; costs are not strictly increasing "
                       "there before clamping");
    }
    if (model->clamped_resources() > 0) {
      notes_.push_back("clamped " + std::to_string(model->clamped_resources()) +
                       " free-flow weights to 1e-6 * max d");
    }
    model_ = std::move(model);
  } else if (cost.family == "two_link") {
    if (n != 2) throw ValidationError("scenario: two_link cost needs exactly 2 resources");
    model_ = std::make_unique<TwoLinkCost>();
  } else {
    const std::size_t links = cost.n == 0 ? n : cost.n;
    if (links != n) throw ValidationError("scenario: parallel_kinks n differs from the family size");
    model_ = std::make_unique<ParallelKinksCost>(links, cost.m);
  }

  theta0_ = config.theta0.value_or(std::vector<double>(model_->parameter_count(), 1.0));
  if (theta0_.size() != model_->parameter_count()) {
    throw ValidationError("scenario: theta0 has " + std::to_string(theta0_.size()) +
                          " entries, expected " + std::to_string(model_->parameter_count()));
  }
}

const ZddSampler& Instance::sampler(SamplingScheme scheme) const {
  const auto i = static_cast<std::size_t>(scheme);
  std::call_once(sampler_once_[i],
                 [&] { samplers_[i] = std::make_unique<ZddSampler>(*zdd_, scheme); });
  if (!samplers_[i]) throw ValidationError("sampler construction failed earlier");
  return *samplers_[i];
}

LmoConfig Instance::lmo(const InnerSettings& inner) const {
  switch (inner.lmo) {
    case LmoKind::ShortestPath: {
      const auto* st = family_ ? std::get_if<StPaths>(&*family_) : nullptr;
      if (!network_ || st == nullptr) {
        throw ValidationError("shortest_path oracle needs an st_paths family on a network");
      }
      return LmoConfig::shortest_path(*network_, st->s, st->t);
    }
    case LmoKind::ZddExact:
      return LmoConfig::zdd_exact(*zdd_);
    case LmoKind::ZddSubsampled:
      return LmoConfig::zdd_subsampled(sampler(inner.scheme), inner.m);
  }
  throw ValidationError("unknown oracle kind");
}

std::size_t resolve_workers(std::optional<std::size_t> flag, std::optional<std::size_t> scenario) {
  if (flag) {
    if (*flag < 1) throw ValidationError("--workers must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("CCG_WORKERS"); env != nullptr && *env != '\0') {
    std::size_t w = 0;
    const std::string_view text(env);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), w);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || w < 1) {
      throw ValidationError("CCG_WORKERS must be a positive integer");
    }
    return w;
  }
  return scenario.value_or(1);
}

}  // namespace ccg
