#include <algorithm>
#include <cmath>
#include <limits>

#include "ccg/errors.hpp"
#include "ccg/zdd.hpp"
#include "zdd_internal.hpp"

namespace ccg {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

SamplingScheme parse_scheme(std::string_view text) {
  if (text == "US" || text == "us") return SamplingScheme::US;
  if (text == "UL" || text == "ul") return SamplingScheme::UL;
  if (text == "HL" || text == "hl") return SamplingScheme::HL;
  throw ValidationError("unknown sampling scheme '" + std::string(text) + "' (expected US, UL or HL)");
}

std::string_view to_string(SamplingScheme scheme) {
  switch (scheme) {
    case SamplingScheme::US:
      return "US";
    case SamplingScheme::UL:
      return "UL";
    case SamplingScheme::HL:
      return "HL";
  }
  return "?";
}

ZddSampler::ZddSampler(const Zdd& zdd, SamplingScheme scheme) : zdd_(&zdd), scheme_(scheme) {
  if (zdd.root() == kBottom) throw EmptyFamilyError("cannot sample from an empty family");

  if (scheme == SamplingScheme::US) {
    const std::size_t refs = zdd.node_count() + 2;
    log_node_count_.assign(refs, kNegInf);
    log_node_count_[kTop] = 0.0;
    for (std::size_t ref = 2; ref < refs; ++ref) {
      const ZddNode& v = zdd.nodes()[ref - 2];
      log_node_count_[ref] = log_add_exp(log_node_count_[v.lo], log_node_count_[v.hi]);
    }
    return;
  }

  lengths_.emplace(zdd);
  const auto feasible = lengths_->feasible_lengths();
  length_weights_.assign(lengths_->max_length() + 1, 0.0);
  if (scheme == SamplingScheme::UL) {
    for (std::size_t r : feasible) length_weights_[r] = 1.0 / static_cast<double>(feasible.size());
  } else {
    double total = 0.0;
    for (std::size_t r : feasible) {
      if (r > 0) total += 1.0 / static_cast<double>(r);
    }
    if (total == 0.0) {
      throw ValidationError("harmonic-length sampling is undefined when only the empty strategy exists");
    }
    for (std::size_t r : feasible) {
      if (r > 0) length_weights_[r] = (1.0 / static_cast<double>(r)) / total;
    }
  }
  length_cdf_.resize(length_weights_.size());
  double acc = 0.0;
  for (std::size_t r = 0; r < length_weights_.size(); ++r) {
    acc += length_weights_[r];
    length_cdf_[r] = acc;
  }
}

Strategy ZddSampler::draw(Rng& rng) const {
  const Zdd& zdd = *zdd_;
  std::vector<Resource> items;
  if (scheme_ == SamplingScheme::US) {
    for (NodeRef ref = zdd.root(); !Zdd::is_terminal(ref);) {
      const ZddNode& v = zdd.node(ref);
      const double p_lo = std::exp(log_node_count_[v.lo] - log_node_count_[ref]);
      if (uniform01(rng) < p_lo) {
        ref = v.lo;
      } else {
        items.push_back(v.label);
        ref = v.hi;
      }
    }
    return Strategy::from_indices(std::move(items));
  }

  const double u = uniform01(rng) * length_cdf_.back();
  auto it = std::upper_bound(length_cdf_.begin(), length_cdf_.end(), u);
  std::size_t r = static_cast<std::size_t>(it - length_cdf_.begin());
  // Rounding can land past the last class with positive weight.
  while (r >= length_weights_.size() || length_weights_[r] == 0.0) --r;

  for (NodeRef ref = zdd.root(); !Zdd::is_terminal(ref);) {
    const ZddNode& v = zdd.node(ref);
    const double p_lo = std::exp(lengths_->log_count(v.lo, r) - lengths_->log_count(ref, r));
    if (uniform01(rng) < p_lo) {
      ref = v.lo;
    } else {
      items.push_back(v.label);
      ref = v.hi;
      --r;
    }
  }
  return Strategy::from_indices(std::move(items));
}

std::vector<Strategy> ZddSampler::draw(std::size_t m, Rng& rng) const {
  std::vector<Strategy> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) out.push_back(draw(rng));
  return out;
}

double ZddSampler::probability(const Strategy& s) const {
  if (scheme_ == SamplingScheme::US) return std::exp(-log_node_count_[zdd_->root()]);
  const std::size_t r = s.size();
  if (r >= length_weights_.size() || length_weights_[r] == 0.0) return 0.0;
  return length_weights_[r] * std::exp(-lengths_->log_count(zdd_->root(), r));
}

std::vector<Strategy> sample(const Zdd& zdd, SamplingScheme scheme, std::size_t m,
                             std::uint64_t seed) {
  const ZddSampler sampler(zdd, scheme);
  Rng rng(seed);
  return sampler.draw(m, rng);
}

MinCostResult subsampled_lmo(const ZddSampler& sampler, std::size_t m,
                             std::span<const double> weights, Rng& rng) {
  if (m == 0) throw ValidationError("subsampled LMO needs m >= 1");
  if (weights.size() != sampler.diagram().resource_count()) {
    throw ValidationError("weight vector length does not match resource count");
  }
  MinCostResult best;
  best.cost = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    Strategy s = sampler.draw(rng);
    const double c = s.cost(weights);
    if (c < best.cost) {
      best.cost = c;
      best.strategy = std::move(s);
    }
  }
  return best;
}

MinCostResult subsampled_lmo(const Zdd& zdd, SamplingScheme scheme, std::size_t m,
                             std::span<const double> weights, std::uint64_t seed) {
  const ZddSampler sampler(zdd, scheme);
  Rng rng(seed);
  return subsampled_lmo(sampler, m, weights, rng);
}

double optimizer_mass(const Zdd& zdd, SamplingScheme scheme, std::span<const double> weights,
                      std::size_t cap) {
  const auto family = enumerate(zdd, cap);
  if (family.empty()) throw EmptyFamilyError("optimizer mass of an empty family");
  const ZddSampler sampler(zdd, scheme);
  std::vector<double> costs;
  costs.reserve(family.size());
  for (const Strategy& s : family) costs.push_back(s.cost(weights));
  const double best = *std::min_element(costs.begin(), costs.end());
  const double tol = 1e-12 * std::max(1.0, std::abs(best));
  double mass = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (costs[i] <= best + tol) mass += sampler.probability(family[i]);
  }
  return mass;
}

}  // namespace ccg
