#include "photonet/synthgen.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>

#include "photonet/errors.hpp"
#include "photonet/rng.hpp"
#include "text_util.hpp"

namespace photonet {

void SynthParams::validate() const {
  auto bad = [](const std::string& what) {
    throw Error(ErrorKind::parameter, "synthetic corpus: " + what);
  };
  if (n_communities < 1) bad("need at least one community");
  if (sizes.min > sizes.max) bad("empty size range");
  if (photos_per_community.min > photos_per_community.max) bad("empty photo range");
  if (persons_per_photo.min > persons_per_photo.max) bad("empty persons-per-photo range");
  if (persons_per_photo.min < 2) bad("group photos need at least 2 persons");
  if (persons_per_photo.max > sizes.min) {
    bad("persons_per_photo max exceeds the smallest community size");
  }
  if (!(solo_photo_rate >= 0.0 && solo_photo_rate <= 1.0)) {
    bad("solo photo rate must lie in [0, 1]");
  }
}

namespace {

std::string padded(const char* prefix, std::size_t a, const char* mid,
                   std::size_t b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%03zu%s%04zu", prefix, a, mid, b);
  return buf;
}

std::size_t draw(Rng& rng, IntRange r) {
  return static_cast<std::size_t>(
      rng.between(static_cast<std::int64_t>(r.min), static_cast<std::int64_t>(r.max)));
}

}  // namespace

SynthCorpus generate(const SynthParams& params) {
  params.validate();
  Rng rng(params.seed);
  SynthCorpus out;
  std::vector<FaceInstance> faces;
  std::size_t next_person = 0;

  for (std::size_t c = 0; c < params.n_communities; ++c) {
    const std::size_t size = draw(rng, params.sizes);
    std::vector<IdentityId> members;
    for (std::size_t i = 0; i < size; ++i) {
      members.emplace_back(padded("id", c, "_", next_person++));
      out.planted.emplace(members.back(), c);
    }

    std::size_t photo_no = 0;
    auto emit = [&](const std::vector<std::size_t>& who) {
      PhotoId photo(padded("c", c, "_p", photo_no++));
      for (std::size_t k = 0; k < who.size(); ++k) {
        FaceInstance f{photo};
        f.face_index = static_cast<std::uint32_t>(k);
        f.true_identity = members[who[k]];
        faces.push_back(std::move(f));
      }
    };
    auto maybe_solo = [&]() {
      if (params.solo_photo_rate > 0 && rng.bernoulli(params.solo_photo_rate)) {
        emit({static_cast<std::size_t>(rng.below(size))});
      }
    };

    // Random spanning tree: attach each node of a shuffled order to a random
    // earlier one.
    std::vector<std::size_t> order(size);
    for (std::size_t i = 0; i < size; ++i) order[i] = i;
    for (std::size_t i = size; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t i = 1; i < size; ++i) {
      emit({order[rng.below(i)], order[i]});
      maybe_solo();
    }

    const std::size_t photos = std::max(draw(rng, params.photos_per_community), size - 1);
    for (std::size_t p = size - 1; p < photos; ++p) {
      const std::size_t k = draw(rng, params.persons_per_photo);
      // Partial Fisher-Yates for k distinct members.
      std::vector<std::size_t> pool(size);
      for (std::size_t i = 0; i < size; ++i) pool[i] = i;
      for (std::size_t i = 0; i < k; ++i) {
        std::swap(pool[i], pool[i + rng.below(size - i)]);
      }
      pool.resize(k);
      emit(pool);
      maybe_solo();
    }
  }
  out.corpus = Corpus(std::move(faces));
  return out;
}

void write_planted(std::ostream& out,
                   const std::map<IdentityId, std::size_t>& planted) {
  out << "identity\tcommunity_index\n";
  for (const auto& [id, c] : planted) out << id << '\t' << c << '\n';
}

std::map<IdentityId, std::size_t> read_planted(std::istream& in) {
  std::map<IdentityId, std::size_t> planted;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto text = text::strip_cr(raw);
    if (text.empty() || text.front() == '#' || line == 1) continue;
    auto fields = text::split(text, '\t');
    auto c = fields.size() == 2 ? text::parse_uint(fields[1]) : std::nullopt;
    if (!c || fields[0].empty()) {
      throw Error(ErrorKind::parse,
                  "line " + std::to_string(line) + ": expected identity, community_index");
    }
    planted.emplace(IdentityId(std::string(fields[0])), *c);
  }
  return planted;
}

}  // namespace photonet
