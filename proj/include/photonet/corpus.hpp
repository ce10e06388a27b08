#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "photonet/ids.hpp"

namespace photonet {

enum class Quality { usable, rejected };
enum class Split { train, test, unassigned };
enum class LabelSource { true_labels, predicted_labels };
enum class AnnotationFormat { generic_tsv, pipa_index };

const char* to_string(Quality q);
const char* to_string(Split s);
const char* to_string(LabelSource s);

/// Pixel box; w and h are strictly positive.
struct BoundingBox {
  double x = 0, y = 0, w = 0, h = 0;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct FaceInstance {
  explicit FaceInstance(PhotoId p, std::uint32_t index = 0)
      : photo(std::move(p)), face_index(index) {}

  PhotoId photo;
  std::uint32_t face_index = 0;
  std::optional<BoundingBox> bbox;
  std::optional<IdentityId> true_identity;
  std::optional<IdentityId> predicted_identity;
  Quality quality = Quality::usable;
  Split split = Split::unassigned;

  const std::optional<IdentityId>& label(LabelSource source) const {
    return source == LabelSource::true_labels ? true_identity
                                              : predicted_identity;
  }

  friend bool operator==(const FaceInstance&, const FaceInstance&) = default;
};

/// An immutable collection of face instances with derived lookup indices.
///
/// Instances are kept sorted by (photo, face_index). The identity and photo
/// indices cover usable instances only, one pair per label source; the
/// identities of a photo always form a set.
class Corpus {
 public:
  using IdentitySet = std::set<IdentityId>;
  using PhotoSet = std::set<PhotoId>;

  Corpus() = default;
  /// Throws Error(structural) on a duplicate face_index within a photo, a
  /// repeated true identity within a photo, a non-positive bbox, or two
  /// distinct photos sharing one key.
  explicit Corpus(std::vector<FaceInstance> instances);

  const std::vector<FaceInstance>& instances() const noexcept {
    return instances_;
  }
  std::size_t size() const noexcept { return instances_.size(); }
  bool empty() const noexcept { return instances_.empty(); }

  /// Distinct photos that hold at least one instance, in canonical order.
  std::vector<PhotoId> photos() const;

  const IdentitySet& identities(LabelSource source) const {
    return index(source).identities;
  }
  bool knows(const IdentityId& id, LabelSource source) const {
    return index(source).photos_of.contains(id);
  }
  const PhotoSet& photos_of(const IdentityId& id, LabelSource source) const;
  const IdentitySet& identities_in(const PhotoId& photo,
                                   LabelSource source) const;
  const std::map<PhotoId, IdentitySet>& photo_index(LabelSource source) const {
    return index(source).identities_in;
  }

  const FaceInstance* find(const PhotoId& photo,
                           std::uint32_t face_index) const;
  std::optional<PhotoId> photo_by_key(const std::string& key) const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.instances_ == b.instances_;
  }

 private:
  struct Index {
    IdentitySet identities;
    std::map<IdentityId, PhotoSet> photos_of;
    std::map<PhotoId, IdentitySet> identities_in;
  };
  const Index& index(LabelSource source) const {
    return source == LabelSource::true_labels ? by_true_ : by_predicted_;
  }

  std::vector<FaceInstance> instances_;
  std::map<std::string, PhotoId> photo_keys_;
  Index by_true_;
  Index by_predicted_;
};

struct IngestResult {
  Corpus corpus;
  /// Rows dropped because their (photo, identity) pair was already present.
  std::size_t collapsed_duplicates = 0;
};

/// Parses an annotation stream. Errors name the 1-based line number.
IngestResult parse_annotations(std::istream& in, AnnotationFormat format);
IngestResult read_annotations(const std::filesystem::path& path,
                              AnnotationFormat format);
AnnotationFormat parse_annotation_format(const std::string& name);

/// Canonical generic TSV: header plus one row per instance, in corpus order.
void write_corpus(std::ostream& out, const Corpus& corpus);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

/// Drops rejected instances (and with them any photo or identity left empty).
Corpus clean(const Corpus& corpus);

/// Stratified train/test partition of the usable instances.
///
/// Each true-identity class of size n puts round(train_frac * n) instances in
/// train, at least one when n >= 2, and the rest in test. The choice of which
/// instances is a deterministic function of seed; the counts are not.
std::pair<Corpus, Corpus> stratified_split(const Corpus& corpus,
                                           double train_frac,
                                           std::uint64_t seed);

/// Number of train instances a class of size n receives.
std::size_t stratified_train_count(std::size_t n, double train_frac);

enum class AugTransform { rotate, flip, scale };
const char* to_string(AugTransform t);

struct AugPlan {
  std::map<IdentityId, std::size_t> counts;
  std::map<IdentityId, std::vector<AugTransform>> transforms;
  std::size_t total_augmented = 0;
};

/// Counts synthetic instances each class needs to reach min_per_class.
/// Only the plan is produced; no pixels are touched.
AugPlan augmentation_plan(const Corpus& train, std::size_t min_per_class);
void write_augmentation_plan(std::ostream& out, const AugPlan& plan);
AugPlan read_augmentation_plan(std::istream& in);

}  // namespace photonet
