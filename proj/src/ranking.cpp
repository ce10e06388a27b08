#include "photonet/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "photonet/errors.hpp"
#include "text_util.hpp"

namespace photonet {

GroupPhotoSet::GroupPhotoSet(std::map<PhotoId, std::vector<IdentityId>> photos)
    : photos_(std::move(photos)) {
  for (auto& [photo, members] : photos_) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.size() < 2) {
      throw Error(ErrorKind::precondition,
                  "group photo " + photo.key() + " has fewer than 2 identities");
    }
  }
}

GroupPhotoSet group_photos(const Corpus& corpus, LabelSource label_source) {
  std::map<PhotoId, std::vector<IdentityId>> photos;
  for (const auto& [photo, ids] : corpus.photo_index(label_source)) {
    if (ids.size() >= 2) photos.emplace(photo, std::vector(ids.begin(), ids.end()));
  }
  return GroupPhotoSet(std::move(photos));
}

void validate_log_base(double base) {
  // Bases in (0, 1) would make every IDF negative and invert the rankings.
  if (!(std::isfinite(base) && base > 1.0)) {
    throw Error(ErrorKind::parameter, "log base must be finite and > 1");
  }
}

IdfTable idf_table(const GroupPhotoSet& groups, double log_base) {
  validate_log_base(log_base);
  if (groups.empty()) {
    throw Error(ErrorKind::precondition, "IDF needs at least one group photo");
  }
  std::map<IdentityId, std::size_t> occurrences;
  for (const auto& [photo, members] : groups.photos()) {
    for (const IdentityId& id : members) ++occurrences[id];
  }
  const double total = static_cast<double>(groups.size());
  const double scale = std::log(log_base);
  IdfTable table{log_base, {}};
  for (const auto& [id, f] : occurrences) {
    // Exact zero when c is in every photo.
    table.idf.emplace(id, f == groups.size()
                              ? 0.0
                              : std::log(total / static_cast<double>(f)) / scale);
  }
  return table;
}

PhotoScoreTable photo_scores(const GroupPhotoSet& groups, const IdfTable& idf) {
  PhotoScoreTable table;
  for (const auto& [photo, members] : groups.photos()) {
    double sum = 0;
    for (const IdentityId& id : members) {
      auto it = idf.idf.find(id);
      if (it == idf.idf.end()) {
        throw Error(ErrorKind::consistency,
                    "no IDF entry for identity " + id.str() + " in photo " +
                        photo.key());
      }
      sum += it->second;
    }
    table.score.emplace(photo, sum / static_cast<double>(members.size()));
  }
  return table;
}

CommunityGraph relationship_strengths(CommunityGraph graph,
                                      const PhotoScoreTable& scores) {
  for (Edge& e : graph.edges) {
    double strength = 0;
    for (const PhotoId& p : e.shared_photos) {
      auto it = scores.score.find(p);
      if (it == scores.score.end()) {
        throw Error(ErrorKind::consistency,
                    "shared photo " + p.key() + " of edge " + e.a.str() + "-" +
                        e.b.str() + " has no score");
      }
      strength += it->second;
    }
    e.strength = strength;
  }
  return graph;
}

void write_photo_scores(std::ostream& out, const PhotoScoreTable& scores) {
  out << "photo_id\tscore\n";
  for (const auto& [photo, s] : scores.score) {
    out << photo.key() << '\t' << text::format_fixed(s, 6) << '\n';
  }
}

void write_idf_table(std::ostream& out, const IdfTable& idf) {
  out << "identity\tidf\n";
  for (const auto& [id, v] : idf.idf) {
    out << id << '\t' << text::format_fixed(v, 6) << '\n';
  }
}

namespace {

template <typename Fn>
void read_two_columns(std::istream& in, const char* header, Fn&& row) {
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = text::strip_cr(raw);
    if (text.empty() || text.front() == '#') continue;
    auto fields = text::split(text, '\t');
    if (fields.size() != 2) {
      throw Error(ErrorKind::parse,
                  "line " + std::to_string(line) + ": expected 2 fields");
    }
    if (fields[0] == header) continue;
    auto v = text::parse_double(fields[1]);
    if (!v) {
      throw Error(ErrorKind::parse, "line " + std::to_string(line) +
                                        ": bad number '" +
                                        std::string(fields[1]) + "'");
    }
    row(fields[0], *v);
  }
}

}  // namespace

PhotoScoreTable read_photo_scores(std::istream& in) {
  PhotoScoreTable table;
  read_two_columns(in, "photo_id", [&](std::string_view key, double v) {
    table.score.emplace(PhotoId::from_key(key), v);
  });
  return table;
}

IdfTable read_idf_table(std::istream& in, double log_base) {
  IdfTable table{log_base, {}};
  read_two_columns(in, "identity", [&](std::string_view id, double v) {
    table.idf.emplace(IdentityId(std::string(id)), v);
  });
  return table;
}

}  // namespace photonet
