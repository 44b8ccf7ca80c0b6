#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "difflog/common.hpp"

namespace difflog {

using UserId = std::string;
using ContentSet = std::unordered_set<std::string>;

/// Directed follow graph. An edge (follower -> followee) means the follower
/// sees what the followee votes for, so information travels followee -> follower.
/// Self-loops and duplicate edges are dropped and counted.
/// Immutable once built; concurrent readers need no synchronization.
class SocialGraph {
 public:
  std::uint32_t add_user(const UserId& id) {
    auto it = index_.find(id);
    if (it != index_.end()) return it->second;
    auto idx = static_cast<std::uint32_t>(ids_.size());
    ids_.push_back(id);
    index_.emplace(id, idx);
    followees_.emplace_back();
    followers_.emplace_back();
    return idx;
  }

  void add_edge(const UserId& follower, const UserId& followee) {
    if (follower == followee) {
      ++dropped_self_loops_;
      return;
    }
    auto f = add_user(follower);
    auto g = add_user(followee);
    if (!edge_set_.insert((static_cast<std::uint64_t>(f) << 32) | g).second) {
      ++dropped_duplicate_edges_;
      return;
    }
    followees_[f].push_back(g);
    followers_[g].push_back(f);
  }

  bool contains(const UserId& id) const { return index_.count(id) != 0; }
  std::size_t num_users() const { return ids_.size(); }
  std::size_t num_edges() const { return edge_set_.size(); }
  const std::vector<UserId>& users() const { return ids_; }
  const UserId& user_at(std::uint32_t idx) const { return ids_[idx]; }

  std::uint32_t index_of(const UserId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw input_error("unknown user id: " + id);
    return it->second;
  }

  /// Users this user follows (whose votes they can see).
  const std::vector<std::uint32_t>& followees_of(std::uint32_t idx) const { return followees_[idx]; }
  /// Users following this user (who can see this user's votes).
  const std::vector<std::uint32_t>& followers_of(std::uint32_t idx) const { return followers_[idx]; }

  std::size_t dropped_self_loops() const { return dropped_self_loops_; }
  std::size_t dropped_duplicate_edges() const { return dropped_duplicate_edges_; }

  /// All edges as (follower, followee) id pairs, sorted for stable output.
  std::vector<std::pair<UserId, UserId>> edges_sorted() const {
    std::vector<std::pair<UserId, UserId>> out;
    out.reserve(edge_set_.size());
    for (std::uint32_t f = 0; f < followees_.size(); ++f)
      for (auto g : followees_[f]) out.emplace_back(ids_[f], ids_[g]);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<UserId> ids_;
  std::unordered_map<UserId, std::uint32_t> index_;
  std::vector<std::vector<std::uint32_t>> followees_;
  std::vector<std::vector<std::uint32_t>> followers_;
  std::unordered_set<std::uint64_t> edge_set_;
  std::size_t dropped_self_loops_ = 0;
  std::size_t dropped_duplicate_edges_ = 0;
};

enum class DistanceMetric { FriendshipHops, SharedInterests };

/// Disjoint user groups keyed by integer distance 1..m from a source user.
struct DistancePartition {
  UserId source;
  DistanceMetric metric = DistanceMetric::FriendshipHops;
  std::map<int, std::set<UserId>> groups;  // distance -> users at that distance
  int max_distance = 0;

  /// Internal consistency check run by every factory: groups pairwise
  /// disjoint and the source in none of them.
  void assert_valid() const {
    std::unordered_set<UserId> seen;
    for (const auto& [d, us] : groups) {
      (void)d;
      for (const auto& u : us) {
        if (u == source) throw std::logic_error("partition contains its source");
        if (!seen.insert(u).second) throw std::logic_error("partition groups overlap on " + u);
      }
    }
  }
};

/// BFS hop counts from `source`, expanding followee -> follower (the
/// direction information actually travels). Unreachable users are absent.
inline std::unordered_map<UserId, int> hop_distances(const SocialGraph& graph, const UserId& source) {
  std::uint32_t s = graph.index_of(source);  // throws input_error if unknown
  std::vector<int> dist(graph.num_users(), -1);
  std::queue<std::uint32_t> q;
  dist[s] = 0;
  q.push(s);
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (auto v : graph.followers_of(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  std::unordered_map<UserId, int> out;
  for (std::uint32_t i = 0; i < dist.size(); ++i)
    if (dist[i] >= 0) out.emplace(graph.user_at(i), dist[i]);
  return out;
}

namespace detail {
struct SetOverlap {
  std::size_t intersection = 0;
  std::size_t set_union = 0;
};

inline SetOverlap overlap_counts(const ContentSet& a, const ContentSet& b) {
  const ContentSet& small = a.size() <= b.size() ? a : b;
  const ContentSet& large = a.size() <= b.size() ? b : a;
  SetOverlap o;
  for (const auto& x : small)
    if (large.count(x)) ++o.intersection;
  o.set_union = a.size() + b.size() - o.intersection;
  return o;
}
}  // namespace detail

/// Shared-interest distance: 1 - |A∩B| / |A∪B|, in [0, 1].
inline double shared_interest_distance(const ContentSet& contents_a, const ContentSet& contents_b) {
  if (contents_a.empty() && contents_b.empty())
    throw input_error("shared_interest_distance: both content sets are empty");
  auto o = detail::overlap_counts(contents_a, contents_b);
  return 1.0 - static_cast<double>(o.intersection) / static_cast<double>(o.set_union);
}

/// Groups U_1..U_max by hop distance; users farther than max_distance are dropped.
inline DistancePartition partition_by_hops(const SocialGraph& graph, const UserId& source,
                                           int max_distance) {
  if (max_distance < 1) throw input_error("partition_by_hops: max_distance must be >= 1");
  auto dist = hop_distances(graph, source);
  DistancePartition p;
  p.source = source;
  p.metric = DistanceMetric::FriendshipHops;
  p.max_distance = max_distance;
  for (int d = 1; d <= max_distance; ++d) p.groups[d];
  for (const auto& [uid, d] : dist)
    if (d >= 1 && d <= max_distance) p.groups[d].insert(uid);
  p.assert_valid();
  return p;
}

/// Buckets every other user with a non-empty vote history by interest distance
/// to the source. Bucket i covers [(i-1)/b, i/b); the last bucket is closed at
/// 1.0. Bucket assignment is done in exact integer arithmetic on the overlap
/// counts, so boundary distances land deterministically.
inline DistancePartition partition_by_interest(
    const std::unordered_map<UserId, ContentSet>& vote_history, const UserId& source,
    int bucket_count) {
  if (bucket_count < 2) throw input_error("partition_by_interest: bucket_count must be >= 2");
  auto src_it = vote_history.find(source);
  if (src_it == vote_history.end() || src_it->second.empty())
    throw input_error("partition_by_interest: source '" + source + "' has an empty vote history");
  const ContentSet& cs = src_it->second;

  DistancePartition p;
  p.source = source;
  p.metric = DistanceMetric::SharedInterests;
  p.max_distance = bucket_count;
  for (int d = 1; d <= bucket_count; ++d) p.groups[d];
  const auto b = static_cast<std::uint64_t>(bucket_count);
  for (const auto& [uid, contents] : vote_history) {
    if (uid == source || contents.empty()) continue;
    auto o = detail::overlap_counts(cs, contents);
    // distance = (union - intersection) / union; bucket = 1 + floor(distance * b)
    std::uint64_t num = b * (o.set_union - o.intersection);
    auto bucket = static_cast<int>(num / o.set_union) + 1;
    if (bucket > bucket_count) bucket = bucket_count;  // distance exactly 1.0
    p.groups[bucket].insert(uid);
  }
  p.assert_valid();
  return p;
}

/// |U_x| for each distance; the neighbor-distribution report.
inline std::map<int, std::size_t> partition_sizes(const DistancePartition& partition) {
  std::map<int, std::size_t> sizes;
  for (const auto& [d, us] : partition.groups) sizes[d] = us.size();
  return sizes;
}

// ---------------------------------------------------------------------------
// CSV interchange: `follower,followee` with a header row
// ---------------------------------------------------------------------------

inline SocialGraph read_graph_csv(std::istream& in, const std::string& name = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) throw input_error("empty graph file: " + name);
  auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "follower" || header[1] != "followee")
    throw input_error("graph CSV must start with header 'follower,followee': " + name);
  SocialGraph g;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cols = split_csv_line(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty())
      throw input_error("bad edge row at " + name + ":" + std::to_string(lineno));
    g.add_edge(cols[0], cols[1]);
  }
  return g;
}

inline SocialGraph load_graph_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open graph file: " + path);
  return read_graph_csv(in, path);
}

inline void write_graph_csv(const SocialGraph& graph, std::ostream& out) {
  out << "follower,followee\n";
  for (const auto& [f, g] : graph.edges_sorted()) out << f << ',' << g << '\n';
}

}  // namespace difflog
