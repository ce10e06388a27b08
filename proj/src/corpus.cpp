#include "photonet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "photonet/errors.hpp"
#include "photonet/rng.hpp"

namespace photonet {

const char* to_string(Quality q) {
  return q == Quality::usable ? "usable" : "rejected";
}

const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::test: return "test";
    case Split::unassigned: return "unassigned";
  }
  return "unassigned";
}

const char* to_string(LabelSource s) {
  return s == LabelSource::true_labels ? "true" : "predicted";
}

const char* to_string(AugTransform t) {
  switch (t) {
    case AugTransform::rotate: return "rotate";
    case AugTransform::flip: return "flip";
    case AugTransform::scale: return "scale";
  }
  return "rotate";
}

namespace {

bool canonical_less(const FaceInstance& a, const FaceInstance& b) {
  if (auto c = a.photo <=> b.photo; c != 0) return c < 0;
  return a.face_index < b.face_index;
}

std::string face_ref(const FaceInstance& f) {
  return f.photo.key() + "#" + std::to_string(f.face_index);
}

}  // namespace

Corpus::Corpus(std::vector<FaceInstance> instances)
    : instances_(std::move(instances)) {
  std::sort(instances_.begin(), instances_.end(), canonical_less);

  for (std::size_t i = 0; i < instances_.size(); ++i) {
    const FaceInstance& f = instances_[i];
    if (f.bbox && !(f.bbox->w > 0 && f.bbox->h > 0)) {
      throw Error(ErrorKind::structural,
                  "bounding box of face " + face_ref(f) +
                      " must have positive width and height");
    }
    auto [it, inserted] = photo_keys_.try_emplace(f.photo.key(), f.photo);
    if (!inserted && !(it->second == f.photo)) {
      throw Error(ErrorKind::structural,
                  "two photos share the key " + f.photo.key());
    }
    if (i > 0 && instances_[i - 1].photo == f.photo) {
      if (instances_[i - 1].face_index == f.face_index) {
        throw Error(ErrorKind::structural,
                    "duplicate face_index in photo: " + face_ref(f));
      }
    }
  }

  // A person appears at most once per photo.
  for (std::size_t begin = 0; begin < instances_.size();) {
    std::size_t end = begin;
    std::set<IdentityId> seen;
    while (end < instances_.size() &&
           instances_[end].photo == instances_[begin].photo) {
      if (const auto& id = instances_[end].true_identity) {
        if (!seen.insert(*id).second) {
          throw Error(ErrorKind::structural,
                      "identity " + id->str() + " appears twice in photo " +
                          instances_[end].photo.key());
        }
      }
      ++end;
    }
    begin = end;
  }

  for (const FaceInstance& f : instances_) {
    if (f.quality != Quality::usable) continue;
    for (auto [source, idx] : {std::pair{LabelSource::true_labels, &by_true_},
                               std::pair{LabelSource::predicted_labels,
                                         &by_predicted_}}) {
      const auto& label = f.label(source);
      if (!label) continue;
      idx->identities.insert(*label);
      idx->photos_of[*label].insert(f.photo);
      idx->identities_in[f.photo].insert(*label);
    }
  }
}

std::vector<PhotoId> Corpus::photos() const {
  std::vector<PhotoId> out;
  for (const FaceInstance& f : instances_) {
    if (out.empty() || !(out.back() == f.photo)) out.push_back(f.photo);
  }
  return out;
}

const Corpus::PhotoSet& Corpus::photos_of(const IdentityId& id,
                                          LabelSource source) const {
  static const PhotoSet kEmpty;
  const auto& m = index(source).photos_of;
  auto it = m.find(id);
  return it == m.end() ? kEmpty : it->second;
}

const Corpus::IdentitySet& Corpus::identities_in(const PhotoId& photo,
                                                 LabelSource source) const {
  static const IdentitySet kEmpty;
  const auto& m = index(source).identities_in;
  auto it = m.find(photo);
  return it == m.end() ? kEmpty : it->second;
}

const FaceInstance* Corpus::find(const PhotoId& photo,
                                 std::uint32_t face_index) const {
  auto it = std::lower_bound(
      instances_.begin(), instances_.end(), std::pair{&photo, face_index},
      [](const FaceInstance& f, const std::pair<const PhotoId*, std::uint32_t>& k) {
        if (auto c = f.photo <=> *k.first; c != 0) return c < 0;
        return f.face_index < k.second;
      });
  if (it == instances_.end() || !(it->photo == photo) ||
      it->face_index != face_index) {
    return nullptr;
  }
  return &*it;
}

std::optional<PhotoId> Corpus::photo_by_key(const std::string& key) const {
  auto it = photo_keys_.find(key);
  if (it == photo_keys_.end()) return std::nullopt;
  return it->second;
}

Corpus clean(const Corpus& corpus) {
  std::vector<FaceInstance> kept;
  kept.reserve(corpus.size());
  for (const FaceInstance& f : corpus.instances()) {
    if (f.quality == Quality::usable) kept.push_back(f);
  }
  return Corpus(std::move(kept));
}

std::size_t stratified_train_count(std::size_t n, double train_frac) {
  auto k = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(n)));
  if (n >= 2 && k == 0) k = 1;
  return std::min(k, n);
}

std::pair<Corpus, Corpus> stratified_split(const Corpus& corpus,
                                           double train_frac,
                                           std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw Error(ErrorKind::precondition, "train fraction must lie in (0, 1)");
  }
  std::map<IdentityId, std::vector<const FaceInstance*>> classes;
  for (const FaceInstance& f : corpus.instances()) {
    if (f.quality != Quality::usable) continue;
    if (!f.true_identity) {
      throw Error(ErrorKind::precondition,
                  "face " + face_ref(f) + " has no true identity to stratify on");
    }
    classes[*f.true_identity].push_back(&f);
  }

  std::vector<FaceInstance> train;
  std::vector<FaceInstance> test;
  for (auto& [id, members] : classes) {
    // Per-class streams keep a class's assignment independent of the others.
    Rng rng(derive_seed(seed, id.str()));
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.below(i)]);
    }
    const std::size_t k = stratified_train_count(members.size(), train_frac);
    for (std::size_t i = 0; i < members.size(); ++i) {
      FaceInstance f = *members[i];
      f.split = i < k ? Split::train : Split::test;
      (i < k ? train : test).push_back(std::move(f));
    }
  }
  return {Corpus(std::move(train)), Corpus(std::move(test))};
}

AugPlan augmentation_plan(const Corpus& train, std::size_t min_per_class) {
  if (min_per_class < 1) {
    throw Error(ErrorKind::precondition, "min_per_class must be at least 1");
  }
  std::map<IdentityId, std::size_t> existing;
  for (const FaceInstance& f : train.instances()) {
    if (f.quality == Quality::usable && f.true_identity) {
      ++existing[*f.true_identity];
    }
  }
  static constexpr AugTransform kCycle[] = {
      AugTransform::rotate, AugTransform::flip, AugTransform::scale};
  AugPlan plan;
  for (const auto& [id, n] : existing) {
    const std::size_t need = n >= min_per_class ? 0 : min_per_class - n;
    plan.counts.emplace(id, need);
    auto& tags = plan.transforms[id];
    for (std::size_t i = 0; i < need; ++i) tags.push_back(kCycle[i % 3]);
    plan.total_augmented += need;
  }
  return plan;
}

}  // namespace photonet
