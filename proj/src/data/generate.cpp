#include "mtlkd/data/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mtlkd/core/error.hpp"

namespace mtlkd::data {
namespace {

double dist(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

Instance generate_instance(VariantSpec variant, int n, Rng& rng) {
  if (n < 1) throw ContractViolation("generate_instance: n must be >= 1");
  Instance inst;
  inst.variant = variant;
  inst.name = variant.name() + "-n" + std::to_string(n);
  inst.capacity = kDefaultCapacity;
  inst.duration_limit = kDefaultDurationLimit;
  inst.speed = 1.0;

  const int nodes = n + 1;
  inst.coords.resize(nodes);
  inst.coords[0] = {rng.uniform(), rng.uniform()};
  // With time windows a customer must be reachable and able to return by the
  // depot deadline: 2 * a_i + service <= 3. Only points within ~0.02 of the
  // far corner violate this; they are redrawn.
  const double max_reach = (kDepotHorizon - kDefaultServiceTime) / 2.0;
  for (int i = 1; i < nodes; ++i) {
    do {
      inst.coords[i] = {rng.uniform(), rng.uniform()};
    } while (variant.time_window && dist(inst.coords[0], inst.coords[i]) > max_reach);
  }

  inst.demand.assign(nodes, 0);
  for (int i = 1; i < nodes; ++i) inst.demand[i] = static_cast<int>(rng.uniform_int(1, 9));
  if (variant.backhaul) {
    const int nb = static_cast<int>(std::lround(kBackhaulFraction * n));
    std::vector<int> ids(n);
    std::iota(ids.begin(), ids.end(), 1);
    // Partial Fisher-Yates: the first nb slots are a uniform subset.
    for (int k = 0; k < nb; ++k) {
      const auto j = static_cast<int>(rng.uniform_int(k, n - 1));
      std::swap(ids[k], ids[j]);
    }
    for (int k = 0; k < nb; ++k) {
      inst.demand[ids[k]] = -static_cast<int>(rng.uniform_int(1, 9));
    }
  }

  inst.service_time.assign(nodes, 0.0);
  inst.tw.assign(nodes, TimeWindow{0.0, kDepotHorizon});
  if (variant.time_window) {
    for (int i = 1; i < nodes; ++i) {
      const double a = dist(inst.coords[0], inst.coords[i]) / inst.speed;
      const double w = rng.uniform(kMinWindowWidth, kMaxWindowWidth);
      const double hi = std::max(a, kDepotHorizon - kDefaultServiceTime - a - w);
      const double start = rng.uniform(a, hi);
      const double latest =
          std::min(start + w, kDepotHorizon - kDefaultServiceTime - a);
      inst.tw[i] = {start, latest};
      inst.service_time[i] = kDefaultServiceTime;
    }
  }
  return inst;
}

Instance generate_instance(VariantSpec variant, int n, std::uint64_t seed) {
  Rng rng(seed);
  return generate_instance(variant, n, rng);
}

std::vector<Instance> generate_instances(VariantSpec variant, int n, int count,
                                         std::uint64_t seed) {
  std::vector<Instance> out;
  out.reserve(count);
  const Rng root(seed);
  for (int k = 0; k < count; ++k) {
    Rng rng = root.substream(static_cast<std::uint64_t>(k));
    out.push_back(generate_instance(variant, n, rng));
    out.back().name += "-" + std::to_string(k);
  }
  return out;
}

}  // namespace mtlkd::data
