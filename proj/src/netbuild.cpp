#include "photonet/netbuild.hpp"

#include <algorithm>
#include <deque>

#include "photonet/errors.hpp"

namespace photonet {

std::set<IdentityId> CommunityGraph::members() const {
  std::set<IdentityId> out;
  for (const auto& [id, layer] : layers) out.insert(id);
  return out;
}

std::size_t CommunityGraph::depth() const {
  std::size_t d = 0;
  for (const auto& [id, layer] : layers) d = std::max(d, layer);
  return d;
}

namespace {

void require_known(const Corpus& corpus, const IdentityId& target,
                   LabelSource source) {
  if (!corpus.knows(target, source)) {
    throw Error(ErrorKind::unknown_target,
                "unknown target " + target.str() + " under " +
                    to_string(source) + " labels");
  }
}

}  // namespace

CooccurrenceDict cooccurrence_frequencies(const Corpus& corpus,
                                          const IdentityId& target,
                                          LabelSource label_source) {
  require_known(corpus, target, label_source);
  CooccurrenceDict dict{target, {}, {}};
  for (const IdentityId& id : corpus.identities(label_source)) {
    if (id == target) continue;
    dict.freq.emplace(id, 0);
    dict.evidence.emplace(id, std::set<PhotoId>{});
  }
  for (const PhotoId& photo : corpus.photos_of(target, label_source)) {
    for (const IdentityId& other : corpus.identities_in(photo, label_source)) {
      if (other == target) continue;
      ++dict.freq[other];
      dict.evidence[other].insert(photo);
    }
  }
  return dict;
}

CommunityGraph build_network(const Corpus& corpus, const IdentityId& target,
                             const BuildParams& params) {
  require_known(corpus, target, params.label_source);
  CommunityGraph graph{target, {{target, 0}}, {}};
  std::map<IdentityId, CooccurrenceDict> dicts;
  auto dict_of = [&](const IdentityId& id) -> const CooccurrenceDict& {
    auto it = dicts.find(id);
    if (it == dicts.end()) {
      it = dicts.emplace(id, cooccurrence_frequencies(corpus, id,
                                                      params.label_source))
               .first;
    }
    return it->second;
  };

  std::set<IdentityId> frontier{target};
  std::size_t depth = 0;
  while (!frontier.empty() && (!params.max_layers || depth < *params.max_layers)) {
    std::set<IdentityId> next;
    for (const IdentityId& member : frontier) {  // ascending id order
      for (const auto& [other, f] : dict_of(member).freq) {
        if (f > params.threshold && !graph.contains(other)) next.insert(other);
      }
    }
    ++depth;
    for (const IdentityId& id : next) graph.layers.emplace(id, depth);
    frontier = std::move(next);
  }

  for (const auto& [member, layer] : graph.layers) {
    const CooccurrenceDict& dict = dict_of(member);
    for (const auto& [other, f] : dict.freq) {
      if (f <= params.threshold || !(member < other)) continue;
      auto it = graph.layers.find(other);
      if (it == graph.layers.end()) continue;
      const std::size_t gap =
          layer > it->second ? layer - it->second : it->second - layer;
      if (gap > 1) {
        throw Error(ErrorKind::consistency,
                    "edge " + member.str() + "-" + other.str() +
                        " spans more than one layer");
      }
      const auto& photos = dict.evidence.at(other);
      graph.edges.push_back(Edge{member, other, f,
                                 {photos.begin(), photos.end()}, std::nullopt});
    }
  }
  return graph;
}

std::map<IdentityId, std::size_t> reachable_bruteforce(
    const Corpus& corpus, const IdentityId& target, const BuildParams& params) {
  const LabelSource source = params.label_source;
  bool found = false;
  std::map<std::pair<IdentityId, IdentityId>, std::size_t> pair_count;
  for (const FaceInstance& a : corpus.instances()) {
    if (a.quality != Quality::usable || !a.label(source)) continue;
    if (*a.label(source) == target) found = true;
  }
  if (!found) {
    throw Error(ErrorKind::unknown_target, "unknown target " + target.str());
  }

  // Exhaustive enumeration over every photo's label set.
  for (const PhotoId& photo : corpus.photos()) {
    std::vector<IdentityId> present;
    for (const FaceInstance& f : corpus.instances()) {
      if (f.photo == photo && f.quality == Quality::usable && f.label(source)) {
        present.push_back(*f.label(source));
      }
    }
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    for (std::size_t i = 0; i < present.size(); ++i) {
      for (std::size_t j = i + 1; j < present.size(); ++j) {
        ++pair_count[{present[i], present[j]}];
      }
    }
  }

  std::map<IdentityId, std::vector<IdentityId>> adjacency;
  for (const auto& [pair, count] : pair_count) {
    if (count <= params.threshold) continue;
    adjacency[pair.first].push_back(pair.second);
    adjacency[pair.second].push_back(pair.first);
  }

  std::map<IdentityId, std::size_t> dist{{target, 0}};
  std::deque<IdentityId> queue{target};
  while (!queue.empty()) {
    IdentityId u = queue.front();
    queue.pop_front();
    const std::size_t du = dist.at(u);
    if (params.max_layers && du >= *params.max_layers) continue;
    for (const IdentityId& v : adjacency[u]) {
      if (dist.emplace(v, du + 1).second) queue.push_back(v);
    }
  }
  return dist;
}

}  // namespace photonet
