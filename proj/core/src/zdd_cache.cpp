// Cache layout (all integers little-endian):
//   "ZDD1" | u64 key | u32 n | u32 node_count | u32 root
//   | n x u32 variable order | node_count x (u32 label, u32 lo, u32 hi)
// Node i of the array has reference i + 2; 0 is ⊥ and 1 is ⊤.

#include <array>
#include <cstring>
#include <fstream>

#include "ccg/errors.hpp"
#include "ccg/zdd.hpp"

namespace ccg {

namespace {

constexpr std::array<char, 4> kMagic = {'Z', 'D', 'D', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw ValidationError("truncated ZDD cache file");
  return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
         std::uint32_t{b[3]} << 24;
}

std::uint64_t get_u64(std::istream& in) {
  const std::uint64_t lo = get_u32(in);
  return lo | std::uint64_t{get_u32(in)} << 32;
}

}  // namespace

std::uint64_t zdd_cache_key(const Network& net, const FamilySpec& spec,
                            std::span<const Resource> variable_order) {
  std::uint64_t h = network_hash(net);
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte & 0xffU;
    h *= 1099511628211ULL;
  };
  for (char c : to_string(spec)) mix(static_cast<unsigned char>(c));
  for (Resource r : variable_order) {
    for (int i = 0; i < 4; ++i) mix(r >> (8 * i));
  }
  return h;
}

void write_zdd(const std::filesystem::path& path, const Zdd& zdd, std::uint64_t key) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write ZDD cache: " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, key);
  put_u32(out, static_cast<std::uint32_t>(zdd.resource_count()));
  put_u32(out, static_cast<std::uint32_t>(zdd.node_count()));
  put_u32(out, zdd.root());
  for (Resource r : zdd.variable_order()) put_u32(out, r);
  for (const ZddNode& v : zdd.nodes()) {
    put_u32(out, v.label);
    put_u32(out, v.lo);
    put_u32(out, v.hi);
  }
  if (!out) throw Error("failed writing ZDD cache: " + path.string());
}

Zdd read_zdd(const std::filesystem::path& path, std::optional<std::uint64_t> expected_key) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open ZDD cache: " + path.string());
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ValidationError(path.string() + ": not a ZDD1 cache file");
  }
  const std::uint64_t key = get_u64(in);
  if (expected_key && key != *expected_key) {
    throw ValidationError(path.string() + ": cache key does not match network/family/order");
  }
  const std::uint32_t n = get_u32(in);
  const std::uint32_t count = get_u32(in);
  const NodeRef root = get_u32(in);
  std::vector<Resource> order(n);
  for (auto& r : order) r = get_u32(in);
  std::vector<ZddNode> nodes(count);
  for (auto& v : nodes) {
    v.label = get_u32(in);
    v.lo = get_u32(in);
    v.hi = get_u32(in);
  }
  return Zdd::from_nodes(n, std::move(order), std::move(nodes), root);
}

Zdd load_or_build(const Network& net, const FamilySpec& spec, const std::filesystem::path& cache,
                  std::vector<Resource> variable_order) {
  if (variable_order.empty()) variable_order = identity_order(net.edge_count());
  const std::uint64_t key = zdd_cache_key(net, spec, variable_order);
  if (std::filesystem::exists(cache)) {
    try {
      return read_zdd(cache, key);
    } catch (const ValidationError&) {
      // Stale or foreign cache: rebuild below.
    }
  }
  Zdd zdd = build_family(net, spec, std::move(variable_order));
  write_zdd(cache, zdd, key);
  return zdd;
}

}  // namespace ccg
