#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "difflog/common.hpp"
#include "difflog/events.hpp"
#include "difflog/graph.hpp"

namespace difflog {

// ---------------------------------------------------------------------------
// Deterministic graph generation
// ---------------------------------------------------------------------------

enum class GraphKind { Chain, Star, WattsStrogatz, BarabasiAlbert };

struct GraphConfig {
  GraphKind kind = GraphKind::Chain;
  std::size_t n = 2;        // node count
  std::size_t ws_k = 4;     // ring-lattice neighbors (even), watts-strogatz
  double ws_beta = 0.1;     // rewiring probability
  std::size_t ba_m = 2;     // follow links per new node, barabasi-albert
  std::uint64_t seed = 1;
};

namespace detail {

/// mt19937_64-free uniform stream: all randomness in this module is produced
/// by counter-based splitmix64 so results are identical across platforms.
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed) : state_(splitmix64(seed ^ 0x6a09e667f3bcc909ull)) {}
  std::uint64_t next_u64() { return state_ = splitmix64(state_); }
  double next_unit() { return to_unit_double(next_u64()); }
  std::size_t next_below(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

 private:
  std::uint64_t state_;
};

inline std::string node_name(std::size_t i, std::size_t n) {
  std::size_t width = 1;
  for (std::size_t v = n - 1; v >= 10; v /= 10) ++width;
  auto s = std::to_string(i);
  return "u" + std::string(width - std::min(width, s.size()), '0') + s;
}

}  // namespace detail

/// Directed follow graph of the requested topology, deterministic under seed.
/// Chain and star are oriented so a cascade started at u0 reaches everyone;
/// watts-strogatz edges are mutual follows; barabasi-albert newcomers follow
/// earlier nodes.
inline SocialGraph generate_graph(const GraphConfig& cfg) {
  if (cfg.n < 2) throw input_error("generate_graph: need at least 2 nodes");
  auto name = [&](std::size_t i) { return detail::node_name(i, cfg.n); };
  SocialGraph g;
  for (std::size_t i = 0; i < cfg.n; ++i) g.add_user(name(i));

  switch (cfg.kind) {
    case GraphKind::Chain:
      for (std::size_t i = 1; i < cfg.n; ++i) g.add_edge(name(i), name(i - 1));
      break;
    case GraphKind::Star:
      for (std::size_t i = 1; i < cfg.n; ++i) g.add_edge(name(i), name(0));
      break;
    case GraphKind::WattsStrogatz: {
      if (cfg.ws_k < 2 || cfg.ws_k % 2 != 0 || cfg.ws_k >= cfg.n)
        throw input_error("watts-strogatz needs an even neighbor count k with 2 <= k < n");
      if (cfg.ws_beta < 0.0 || cfg.ws_beta > 1.0)
        throw input_error("watts-strogatz rewiring probability must be in [0, 1]");
      detail::SeededStream rng(cfg.seed);
      std::set<std::pair<std::size_t, std::size_t>> edges;
      auto key = [](std::size_t a, std::size_t b) {
        return std::pair<std::size_t, std::size_t>(std::min(a, b), std::max(a, b));
      };
      for (std::size_t i = 0; i < cfg.n; ++i)
        for (std::size_t j = 1; j <= cfg.ws_k / 2; ++j) edges.insert(key(i, (i + j) % cfg.n));
      // rewire one endpoint of each lattice edge with probability beta
      std::vector<std::pair<std::size_t, std::size_t>> lattice(edges.begin(), edges.end());
      for (auto [a, b] : lattice) {
        if (rng.next_unit() >= cfg.ws_beta) continue;
        std::size_t c = rng.next_below(cfg.n);
        if (c == a || edges.count(key(a, c))) continue;  // keep the original edge
        edges.erase(key(a, b));
        edges.insert(key(a, c));
      }
      for (auto [a, b] : edges) {
        g.add_edge(name(a), name(b));
        g.add_edge(name(b), name(a));
      }
      break;
    }
    case GraphKind::BarabasiAlbert: {
      if (cfg.ba_m < 1 || cfg.ba_m >= cfg.n)
        throw input_error("barabasi-albert needs 1 <= m < n");
      detail::SeededStream rng(cfg.seed);
      // seed clique of m+1 mutual followers, then preferential attachment
      std::vector<std::size_t> endpoint_pool;  // node repeated once per incident link
      for (std::size_t i = 0; i <= cfg.ba_m; ++i)
        for (std::size_t j = 0; j < i; ++j) {
          g.add_edge(name(i), name(j));
          g.add_edge(name(j), name(i));
          endpoint_pool.push_back(i);
          endpoint_pool.push_back(j);
        }
      for (std::size_t i = cfg.ba_m + 1; i < cfg.n; ++i) {
        std::set<std::size_t> targets;
        while (targets.size() < cfg.ba_m)
          targets.insert(endpoint_pool[rng.next_below(endpoint_pool.size())]);
        for (auto t : targets) {
          g.add_edge(name(i), name(t));
          endpoint_pool.push_back(i);
          endpoint_pool.push_back(t);
        }
      }
      break;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Cascade simulation: follower channel + post-promotion random channel
// ---------------------------------------------------------------------------

struct SimConfig {
  double p_follow = 0.05;   // per-exposure hourly vote probability
  double q_random = 0.0;    // hourly vote probability once promoted
  int t_promote = 1 << 30;  // promotion hour; random channel active for h >= t_promote
  int horizon = 50;         // simulated hours
  std::uint64_t seed = 1;

  void validate() const {
    if (p_follow < 0.0 || p_follow > 1.0 || q_random < 0.0 || q_random > 1.0)
      throw input_error("simulation probabilities must lie in [0, 1]");
    if (horizon < 1) throw input_error("simulation horizon must be >= 1 hour");
  }
};

namespace detail {

/// Counter-based draw for (seed, user, hour): independent of iteration order
/// and of the probabilities, which is what makes common-random-number
/// coupling across parameter values exact.
inline double cascade_draw(std::uint64_t seed, std::uint64_t user, std::uint64_t hour,
                           std::uint64_t salt) {
  std::uint64_t x = splitmix64(seed ^ (0x9e3779b97f4a7c15ull * (user + 1)));
  x = splitmix64(x ^ (0xc2b2ae3d27d4eb4full * (hour + 1)) ^ salt);
  return to_unit_double(x);
}

}  // namespace detail

/// Hour-stepped cascade from the initiator. Within each hour every non-voter
/// seeing k prior voters among their followees votes with probability
/// 1 - (1 - p_follow)^k; from the promotion hour on, any non-voter votes with
/// at least q_random. New voters only expose others from the next hour.
inline VoteLog generate_cascade(const SocialGraph& graph, const SimConfig& config,
                                const UserId& initiator, const std::string& story_id = "s1") {
  config.validate();
  const std::uint32_t src = graph.index_of(initiator);  // throws input_error if unknown
  const auto n = static_cast<std::uint32_t>(graph.num_users());

  std::vector<std::int64_t> vote_time(n, -1);
  vote_time[src] = 0;
  std::vector<std::uint32_t> voted_last_hour{src};

  std::vector<std::uint32_t> exposure_count(n, 0);
  for (int hour = 1; hour <= config.horizon; ++hour) {
    // exposures accumulate from everything voted before this hour
    for (auto v : voted_last_hour)
      for (auto f : graph.followers_of(v)) ++exposure_count[f];
    voted_last_hour.clear();

    const bool promoted = hour >= config.t_promote;
    for (std::uint32_t u = 0; u < n; ++u) {
      if (vote_time[u] >= 0) continue;
      double p = 0.0;
      if (exposure_count[u] > 0)
        p = 1.0 - std::pow(1.0 - config.p_follow, static_cast<double>(exposure_count[u]));
      if (promoted) p = 1.0 - (1.0 - p) * (1.0 - config.q_random);
      if (p <= 0.0) continue;
      if (detail::cascade_draw(config.seed, u, static_cast<std::uint64_t>(hour), 0x5eedull) < p) {
        auto offset = static_cast<std::int64_t>(
            detail::cascade_draw(config.seed, u, static_cast<std::uint64_t>(hour), 0x7157ull) *
            3600.0);
        vote_time[u] = static_cast<std::int64_t>(hour - 1) * 3600 + 1 + offset;  // within hour h
        voted_last_hour.push_back(u);
      }
    }
  }

  std::vector<RawVoteRecord> records;
  for (std::uint32_t u = 0; u < n; ++u)
    if (vote_time[u] >= 0) records.push_back(RawVoteRecord{story_id, graph.user_at(u), vote_time[u]});
  return ingest_votes(std::move(records));
}

}  // namespace difflog
