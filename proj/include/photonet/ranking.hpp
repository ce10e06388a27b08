#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <vector>

#include "photonet/corpus.hpp"
#include "photonet/ids.hpp"
#include "photonet/netbuild.hpp"

namespace photonet {

/// The TF-IDF "documents": photos holding at least two distinct identities.
class GroupPhotoSet {
 public:
  GroupPhotoSet() = default;
  explicit GroupPhotoSet(std::map<PhotoId, std::vector<IdentityId>> photos);

  std::size_t size() const noexcept { return photos_.size(); }
  bool empty() const noexcept { return photos_.empty(); }
  const std::map<PhotoId, std::vector<IdentityId>>& photos() const noexcept {
    return photos_;
  }
  bool contains(const PhotoId& p) const { return photos_.contains(p); }

 private:
  std::map<PhotoId, std::vector<IdentityId>> photos_;
};

GroupPhotoSet group_photos(const Corpus& corpus, LabelSource label_source);

inline constexpr double kDefaultLogBase = 10.0;

/// Throws Error(parameter) unless base is finite and greater than 1.
void validate_log_base(double base);

struct IdfTable {
  double log_base = kDefaultLogBase;
  std::map<IdentityId, double> idf;
};

struct PhotoScoreTable {
  std::map<PhotoId, double> score;
};

/// IDF(c) = log_base(|G| / f_c), f_c being the number of group photos that
/// contain c. TF is always 1 since a person appears once per photo.
IdfTable idf_table(const GroupPhotoSet& groups, double log_base = kDefaultLogBase);

/// Mean member IDF per group photo. Throws Error(consistency) naming any
/// member missing from the table.
PhotoScoreTable photo_scores(const GroupPhotoSet& groups, const IdfTable& idf);

/// Sets each edge's strength to the sum of its shared photos' scores.
/// Throws Error(consistency) for an unscored shared photo.
CommunityGraph relationship_strengths(CommunityGraph graph,
                                      const PhotoScoreTable& scores);

// Score exports: header line then one row per entry, values with 6 decimals.
void write_photo_scores(std::ostream& out, const PhotoScoreTable& scores);
void write_idf_table(std::ostream& out, const IdfTable& idf);
PhotoScoreTable read_photo_scores(std::istream& in);
IdfTable read_idf_table(std::istream& in, double log_base = kDefaultLogBase);

}  // namespace photonet
