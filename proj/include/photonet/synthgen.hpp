#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>

#include "photonet/corpus.hpp"
#include "photonet/ids.hpp"

namespace photonet {

struct IntRange {
  std::size_t min = 0;
  std::size_t max = 0;
};

struct SynthParams {
  std::size_t n_communities = 1;
  IntRange sizes{3, 6};
  /// Group photos per community; raised to size - 1 when smaller so the
  /// spanning tree fits.
  IntRange photos_per_community{6, 10};
  IntRange persons_per_photo{2, 3};
  /// Chance that each group photo is followed by a solo photo of one of its
  /// community's members.
  double solo_photo_rate = 0.0;
  std::uint64_t seed = 0;

  /// Throws Error(parameter) for empty ranges, persons_per_photo.min < 2,
  /// persons_per_photo.max > sizes.min, or a rate outside [0, 1].
  void validate() const;
};

struct SynthCorpus {
  Corpus corpus;
  std::map<IdentityId, std::size_t> planted;  // identity -> community index
};

/// Disjoint planted communities. Each community first gets a random spanning
/// tree of pair photos, then random group photos drawn from its own members,
/// so every community is connected at threshold 0.
SynthCorpus generate(const SynthParams& params);

void write_planted(std::ostream& out,
                   const std::map<IdentityId, std::size_t>& planted);
std::map<IdentityId, std::size_t> read_planted(std::istream& in);

}  // namespace photonet
