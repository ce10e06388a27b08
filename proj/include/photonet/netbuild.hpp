#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "photonet/corpus.hpp"
#include "photonet/ids.hpp"

namespace photonet {

/// Face co-occurrence dictionary of one target: for every other known
/// identity, the photos it shares with the target. Zero entries are kept.
struct CooccurrenceDict {
  IdentityId target;
  std::map<IdentityId, std::size_t> freq;
  std::map<IdentityId, std::set<PhotoId>> evidence;
};

struct Edge {
  IdentityId a;  // a < b
  IdentityId b;
  std::size_t frequency = 0;
  std::vector<PhotoId> shared_photos;  // sorted
  std::optional<double> strength;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Target-centred layered network. layers maps every member to its distance
/// from the root; edges are sorted by (a, b).
struct CommunityGraph {
  IdentityId root;
  std::map<IdentityId, std::size_t> layers;
  std::vector<Edge> edges;

  std::size_t size() const noexcept { return layers.size(); }
  bool contains(const IdentityId& id) const { return layers.contains(id); }
  std::set<IdentityId> members() const;
  std::size_t depth() const;

  friend bool operator==(const CommunityGraph&, const CommunityGraph&) = default;
};

struct BuildParams {
  /// An edge qualifies when its frequency is strictly greater than this.
  std::size_t threshold = 0;
  std::optional<std::size_t> max_layers;
  LabelSource label_source = LabelSource::true_labels;
};

/// Throws Error(unknown_target) if target has no photo under label_source.
CooccurrenceDict cooccurrence_frequencies(const Corpus& corpus,
                                          const IdentityId& target,
                                          LabelSource label_source);

/// Recursive layered expansion from target.
///
/// Layer 1 holds the identities whose co-occurrence frequency with the root
/// exceeds the threshold. Every member of the newest layer is then expanded
/// in ascending id order and identities not yet in the network form the next
/// layer, until an expansion adds nobody or max_layers is reached. All
/// qualifying edges among members are kept, including same-layer ones.
CommunityGraph build_network(const Corpus& corpus, const IdentityId& target,
                             const BuildParams& params);

/// Test oracle for build_network: counts every identity pair over all photos,
/// drops pairs at or below the threshold, and runs a plain BFS from target.
std::map<IdentityId, std::size_t> reachable_bruteforce(
    const Corpus& corpus, const IdentityId& target, const BuildParams& params);

// Graph JSON: {root, members:[{id, layer}], edges:[{a, b, frequency,
// shared_photos, strength}]}. Members are sorted by (layer, id).
std::string graph_to_json(const CommunityGraph& graph);
CommunityGraph graph_from_json(const std::string& json);
void write_graph_json(const std::filesystem::path& path,
                      const CommunityGraph& graph);
CommunityGraph read_graph_json(const std::filesystem::path& path);

/// Undirected DOT, one line per node and per edge. Edge labels carry the
/// strength with two decimals (the frequency when unweighted); pen width is
/// proportional to strength.
void write_dot(std::ostream& out, const CommunityGraph& graph);

/// Edge list CSV: a, b, frequency, strength (6 decimals, empty when
/// unweighted), then one field per shared photo key.
void write_edges_csv(std::ostream& out, const CommunityGraph& graph);
std::vector<Edge> read_edges_csv(std::istream& in);

}  // namespace photonet
