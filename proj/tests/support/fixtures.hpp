#pragma once

// Shared test fixtures: literal corpora, a random corpus generator for
// property tests, and brute-force oracles that work on plain photo lists
// rather than on Corpus indices.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "photonet/corpus.hpp"
#include "photonet/rng.hpp"

namespace photonet::testing {

/// photo name -> identity labels, in face order.
using PhotoList = std::vector<std::pair<std::string, std::vector<std::string>>>;

inline Corpus make_corpus(const PhotoList& photos) {
  std::vector<FaceInstance> faces;
  for (const auto& [photo, ids] : photos) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      FaceInstance f{PhotoId(photo), static_cast<std::uint32_t>(i)};
      f.true_identity = IdentityId(ids[i]);
      faces.push_back(std::move(f));
    }
  }
  return Corpus(std::move(faces));
}

inline IdentityId id(const std::string& s) { return IdentityId(s); }

/// C0 = {p1:{A,B}, p2:{A,C}, p3:{A,B,C}, p4:{B,C}, p5:{A}, p6:{D,E}}.
inline PhotoList c0_photos() {
  return {{"p1", {"A", "B"}}, {"p2", {"A", "C"}}, {"p3", {"A", "B", "C"}},
          {"p4", {"B", "C"}}, {"p5", {"A"}},      {"p6", {"D", "E"}}};
}
inline Corpus c0() { return make_corpus(c0_photos()); }

/// Random photo list: up to max_ids identities over up to max_photos photos,
/// 1-5 people each. Identities are drawn from a small pool per corpus so
/// pairs repeat and thresholds 0-3 all matter.
inline PhotoList random_photos(Rng& rng, std::size_t max_ids,
                               std::size_t max_photos) {
  const auto n_ids = static_cast<std::size_t>(rng.between(2, static_cast<std::int64_t>(max_ids)));
  const auto n_photos = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_photos)));
  PhotoList photos;
  for (std::size_t p = 0; p < n_photos; ++p) {
    const auto k = static_cast<std::size_t>(
        rng.between(1, static_cast<std::int64_t>(std::min<std::size_t>(5, n_ids))));
    std::vector<std::size_t> pool(n_ids);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(pool[i], pool[i + rng.below(n_ids - i)]);
    }
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < k; ++i) ids.push_back("i" + std::to_string(pool[i]));
    photos.emplace_back("ph" + std::to_string(p), std::move(ids));
  }
  return photos;
}

inline std::set<std::string> identities_of(const PhotoList& photos) {
  std::set<std::string> out;
  for (const auto& [p, ids] : photos) out.insert(ids.begin(), ids.end());
  return out;
}

/// Number of photos in which a and b both appear.
inline std::size_t pair_frequency(const PhotoList& photos, const std::string& a,
                                  const std::string& b) {
  std::size_t n = 0;
  for (const auto& [p, ids] : photos) {
    const bool has_a = std::find(ids.begin(), ids.end(), a) != ids.end();
    const bool has_b = std::find(ids.begin(), ids.end(), b) != ids.end();
    n += has_a && has_b;
  }
  return n;
}

/// Connected components of the co-occurrence graph with edges whose
/// frequency exceeds threshold (union-find over identity pairs).
inline std::set<std::set<std::string>> components(const PhotoList& photos,
                                                  std::size_t threshold) {
  const auto ids_set = identities_of(photos);
  const std::vector<std::string> ids(ids_set.begin(), ids_set.end());
  std::vector<std::size_t> parent(ids.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (pair_frequency(photos, ids[i], ids[j]) > threshold) {
        parent[find(i)] = find(j);
      }
    }
  }
  std::map<std::size_t, std::set<std::string>> groups;
  for (std::size_t i = 0; i < ids.size(); ++i) groups[find(i)].insert(ids[i]);
  std::set<std::set<std::string>> out;
  for (auto& [root, g] : groups) out.insert(std::move(g));
  return out;
}

}  // namespace photonet::testing
