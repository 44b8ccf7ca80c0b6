#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "difflog/common.hpp"
#include "difflog/graph.hpp"

namespace difflog {

struct Vote {
  UserId user;
  std::int64_t time_s = 0;  // seconds; the first vote defines the origin
};

/// One story's votes, sorted ascending by time with one vote per user (the
/// earliest wins). The first vote identifies the initiator.
struct VoteLog {
  std::string story_id;
  std::vector<Vote> votes;
  std::size_t duplicates_dropped = 0;

  const UserId& initiator() const { return votes.front().user; }
  std::int64_t origin_time() const { return votes.front().time_s; }
};

struct RawVoteRecord {
  std::string story_id;
  UserId user;
  std::int64_t time_s = 0;
};

/// Sorts, deduplicates and wraps raw vote records into a VoteLog.
/// Ties in time break on user id so ingestion is order-independent.
inline VoteLog ingest_votes(std::vector<RawVoteRecord> records) {
  if (records.empty()) throw input_error("ingest_votes: no vote records");
  std::sort(records.begin(), records.end(), [](const RawVoteRecord& a, const RawVoteRecord& b) {
    return a.time_s != b.time_s ? a.time_s < b.time_s : a.user < b.user;
  });
  VoteLog log;
  log.story_id = records.front().story_id;
  std::unordered_set<UserId> seen;
  for (auto& r : records) {
    if (r.story_id != log.story_id)
      throw input_error("ingest_votes: mixed story ids '" + log.story_id + "' and '" + r.story_id +
                        "'");
    if (!seen.insert(r.user).second) {
      ++log.duplicates_dropped;
      continue;
    }
    log.votes.push_back(Vote{std::move(r.user), r.time_s});
  }
  return log;
}

// ---------------------------------------------------------------------------
// Density surface I(x, t): percent of each distance group influenced by hour t
// ---------------------------------------------------------------------------

/// Cumulative influenced-user density in percent, per distance bin and hour.
/// Distances with empty groups are omitted. Group sizes are retained for
/// reconstruction; surfaces read back from CSV carry zero sizes.
struct DensitySurface {
  std::vector<int> distances;                // sorted ascending
  int horizon = 0;                           // hours 1..horizon
  std::vector<std::vector<double>> values;   // values[d_idx][t - 1], percent
  std::vector<std::size_t> group_sizes;      // |U_x| aligned with distances
  std::size_t unclassified_voters = 0;       // voters not in any distance group

  bool has_distance(int x) const {
    return std::binary_search(distances.begin(), distances.end(), x);
  }

  std::size_t row_index(int x) const {
    auto it = std::lower_bound(distances.begin(), distances.end(), x);
    if (it == distances.end() || *it != x)
      throw input_error("density surface has no distance " + std::to_string(x));
    return static_cast<std::size_t>(std::distance(distances.begin(), it));
  }

  double value(int x, int t) const {
    if (t < 1 || t > horizon)
      throw input_error("density surface has no time column t = " + std::to_string(t));
    return values[row_index(x)][static_cast<std::size_t>(t - 1)];
  }
};

/// Counts, per distance group, the members who voted by each whole hour after
/// the story's first vote. Cell = 100 * |voters in U_x by hour t| / |U_x|.
inline DensitySurface empirical_density(const VoteLog& log, const DistancePartition& partition,
                                        int horizon_hours) {
  if (horizon_hours < 1) throw input_error("empirical_density: horizon must be >= 1 hour");
  if (partition.source != log.initiator())
    throw input_error("empirical_density: partition source '" + partition.source +
                      "' does not match the story initiator '" + log.initiator() + "'");

  std::unordered_map<UserId, std::int64_t> vote_time;
  vote_time.reserve(log.votes.size());
  for (const auto& v : log.votes) vote_time.emplace(v.user, v.time_s);
  const std::int64_t origin = log.origin_time();

  DensitySurface s;
  s.horizon = horizon_hours;
  std::unordered_set<UserId> classified;
  for (const auto& [dist, group] : partition.groups) {
    for (const auto& u : group) classified.insert(u);
    if (group.empty()) continue;  // omit empty groups entirely
    s.distances.push_back(dist);
    s.group_sizes.push_back(group.size());
    std::vector<double> row(static_cast<std::size_t>(horizon_hours), 0.0);
    // hour-bin counts first, then a cumulative pass
    for (const auto& u : group) {
      auto it = vote_time.find(u);
      if (it == vote_time.end()) continue;
      auto delta = it->second - origin;
      auto bin = delta <= 0 ? std::int64_t{1} : (delta + 3599) / 3600;  // vote at hour t if <= origin + t*3600
      if (bin <= horizon_hours) row[static_cast<std::size_t>(bin - 1)] += 1.0;
    }
    // one correctly-rounded division per cell keeps full groups at exactly 100
    double cum = 0.0;
    for (auto& cell : row) {
      cum += cell;
      cell = 100.0 * cum / static_cast<double>(group.size());
    }
    s.values.push_back(std::move(row));
  }
  for (const auto& v : log.votes)
    if (v.user != log.initiator() && !classified.count(v.user)) ++s.unclassified_voters;
  return s;
}

/// Column I[.][t]: the density per distance at one hour (spline input).
inline std::map<int, double> density_slice_at(const DensitySurface& surface, int t) {
  if (t < 1 || t > surface.horizon)
    throw input_error("density slice requested at t = " + std::to_string(t) + ", surface has [1, " +
                      std::to_string(surface.horizon) + "]");
  std::map<int, double> slice;
  for (std::size_t i = 0; i < surface.distances.size(); ++i)
    slice[surface.distances[i]] = surface.values[i][static_cast<std::size_t>(t - 1)];
  return slice;
}

// ---------------------------------------------------------------------------
// CSV interchange
// ---------------------------------------------------------------------------

inline std::vector<RawVoteRecord> read_votes_csv(std::istream& in,
                                                 const std::string& name = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) throw input_error("empty votes file: " + name);
  auto header = split_csv_line(line);
  if (header.size() != 3 || header[0] != "story_id" || header[1] != "user_id" ||
      header[2] != "timestamp")
    throw input_error("votes CSV must start with header 'story_id,user_id,timestamp': " + name);
  std::vector<RawVoteRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cols = split_csv_line(line);
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty())
      throw input_error("bad vote row at " + name + ":" + std::to_string(lineno));
    records.push_back(RawVoteRecord{
        cols[0], cols[1], parse_int(cols[2], name + ":" + std::to_string(lineno))});
  }
  if (records.empty()) throw input_error("votes file has no data rows: " + name);
  return records;
}

inline std::vector<RawVoteRecord> load_votes_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open votes file: " + path);
  return read_votes_csv(in, path);
}

inline std::vector<RawVoteRecord> votes_for_story(const std::vector<RawVoteRecord>& records,
                                                  const std::string& story_id) {
  std::vector<RawVoteRecord> out;
  for (const auto& r : records)
    if (r.story_id == story_id) out.push_back(r);
  if (out.empty()) throw input_error("no votes found for story id '" + story_id + "'");
  return out;
}

/// Voted-content sets per user, the input of the shared-interest metric.
inline std::unordered_map<UserId, ContentSet> vote_histories(
    const std::vector<RawVoteRecord>& records) {
  std::unordered_map<UserId, ContentSet> h;
  for (const auto& r : records) h[r.user].insert(r.story_id);
  return h;
}

inline void write_votes_csv(const VoteLog& log, std::ostream& out) {
  out << "story_id,user_id,timestamp\n";
  for (const auto& v : log.votes) out << log.story_id << ',' << v.user << ',' << v.time_s << '\n';
}

inline void write_density_csv(const DensitySurface& surface, std::ostream& out) {
  out << "distance";
  for (int t = 1; t <= surface.horizon; ++t) out << ",t" << t;
  out << '\n';
  for (std::size_t i = 0; i < surface.distances.size(); ++i) {
    out << surface.distances[i];
    for (double v : surface.values[i]) out << ',' << format_double(v);
    out << '\n';
  }
}

inline DensitySurface read_density_csv(std::istream& in, const std::string& name = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) throw input_error("empty density file: " + name);
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "distance")
    throw input_error("density CSV must start with header 'distance,t1,...': " + name);
  DensitySurface s;
  s.horizon = static_cast<int>(header.size()) - 1;
  for (std::size_t t = 1; t < header.size(); ++t)
    if (header[t] != "t" + std::to_string(t))
      throw input_error("density CSV time columns must be t1,t2,...: " + name);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cols = split_csv_line(line);
    if (cols.size() != header.size())
      throw input_error("row width mismatch at " + name + ":" + std::to_string(lineno));
    auto where = name + ":" + std::to_string(lineno);
    s.distances.push_back(static_cast<int>(parse_int(cols[0], where)));
    std::vector<double> row;
    row.reserve(cols.size() - 1);
    for (std::size_t c = 1; c < cols.size(); ++c) row.push_back(parse_double(cols[c], where));
    s.values.push_back(std::move(row));
    s.group_sizes.push_back(0);  // sizes are not part of the interchange format
  }
  if (s.distances.empty()) throw input_error("density file has no rows: " + name);
  if (!std::is_sorted(s.distances.begin(), s.distances.end()))
    throw input_error("density rows must be sorted by distance: " + name);
  return s;
}

inline DensitySurface load_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open density file: " + path);
  return read_density_csv(in, path);
}

inline void write_partition_sizes_csv(const DistancePartition& partition, std::ostream& out) {
  out << "distance,count\n";
  for (const auto& [d, n] : partition_sizes(partition)) out << d << ',' << n << '\n';
}

}  // namespace difflog
